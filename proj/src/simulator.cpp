#include "daqc/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "daqc/error.hpp"

namespace daqc {

using cd = std::complex<double>;

namespace {

std::uint64_t qubit_mask(int q, int n) { return std::uint64_t{1} << (n - 1 - q); }

void check_dimension(const Circuit& c, const SimulationOptions& o) {
  if (c.num_qubits() > o.max_qubits)
    throw NumericalError("circuit has " + std::to_string(c.num_qubits()) +
                         " qubits, simulator cap is " + std::to_string(o.max_qubits));
}

double layer_time(const Circuit& c, const SimulationOptions& o) {
  const auto& md = c.metadata();
  if (md.contains("sqg_time")) return md.at("sqg_time").get<double>();
  return o.sqg_time;
}

std::vector<double> zz_diagonal(int n, int a, int b) {
  const std::size_t dim = std::size_t{1} << n;
  const std::uint64_t mask = qubit_mask(a, n) | qubit_mask(b, n);
  std::vector<double> d(dim);
  for (std::size_t i = 0; i < dim; ++i) d[i] = (std::popcount(i & mask) & 1) ? -1.0 : 1.0;
  return d;
}

// Caches the nominal resource diagonal for one simulation run.
class DiagonalCache {
 public:
  explicit DiagonalCache(const Circuit& c) : circuit_(c) {}

  const std::vector<double>& get(const AnalogBlock& a) {
    if (!a.coupling_scale.empty()) {
      scratch_ = circuit_.resource()->diagonal(&a.coupling_scale);
      return scratch_;
    }
    if (nominal_.empty()) nominal_ = circuit_.resource()->diagonal();
    return nominal_;
  }

 private:
  const Circuit& circuit_;
  std::vector<double> nominal_;
  std::vector<double> scratch_;
};

void run_stepwise(const Circuit& c, Matrix& m) {
  const int n = c.num_qubits();
  DiagonalCache cache(c);
  for (const auto& ins : c.instructions()) {
    if (const auto* g = std::get_if<SingleQubitGate>(&ins.op)) {
      apply_single_qubit(m, n, g->qubit, gate_matrix(*g));
    } else if (const auto* z = std::get_if<ZZGate>(&ins.op)) {
      apply_diagonal_evolution(m, zz_diagonal(n, z->q0, z->q1), z->phase);
    } else {
      const auto& a = std::get<AnalogBlock>(ins.op);
      apply_diagonal_evolution(m, cache.get(a), a.duration);
    }
  }
}

// Lowered per-qubit chain of a gap: virtual gates are attached in front of
// the physical gate that follows them.
struct GapChain {
  std::vector<std::vector<SingleQubitGate>> pre_virtual;  // per physical slot
  std::vector<SingleQubitGate> physical;
  std::vector<SingleQubitGate> trailing_virtual;
};

void run_gap(Matrix& m, const Circuit& c, const std::vector<SingleQubitGate>& gates,
             const AnalogBlock* block, double dt) {
  const int n = c.num_qubits();
  std::vector<GapChain> chains(n);
  for (const auto& g : gates) {
    for (const auto& l : lower(g)) {
      auto& ch = chains[l.qubit];
      if (l.kind == GateKind::Rz) {
        ch.trailing_virtual.push_back(l);
      } else {
        ch.pre_virtual.push_back(std::move(ch.trailing_virtual));
        ch.trailing_virtual.clear();
        ch.physical.push_back(l);
      }
    }
  }
  std::size_t layers = 1;
  for (const auto& ch : chains) layers = std::max(layers, ch.physical.size());
  const std::vector<double>* scale = block && !block->coupling_scale.empty() ? &block->coupling_scale : nullptr;
  for (std::size_t k = 0; k < layers; ++k) {
    std::vector<Eigen::Matrix2cd> gens(n, Eigen::Matrix2cd::Zero());
    for (int q = 0; q < n; ++q) {
      const auto& ch = chains[q];
      if (k >= ch.physical.size()) continue;
      for (const auto& v : ch.pre_virtual[k]) apply_single_qubit(m, n, q, gate_matrix(v));
      gens[q] = rxy_generator(ch.physical[k].theta, ch.physical[k].axis, dt);
    }
    if (c.resource()) {
      apply_overlap_layer(m, *c.resource(), scale, gens, dt);
    } else {
      for (int q = 0; q < n; ++q)
        if (k < chains[q].physical.size()) apply_single_qubit(m, n, q, gate_matrix(chains[q].physical[k]));
    }
  }
  for (int q = 0; q < n; ++q)
    for (const auto& v : chains[q].trailing_virtual) apply_single_qubit(m, n, q, gate_matrix(v));
}

void run_banged(const Circuit& c, Matrix& m, double dt) {
  DiagonalCache cache(c);
  const AnalogBlock* last = nullptr;
  std::vector<SingleQubitGate> gap;
  for (const auto& i : c.instructions()) {
    if (const auto* g = std::get_if<SingleQubitGate>(&i.op)) {
      gap.push_back(*g);
      continue;
    }
    const auto& a = std::get<AnalogBlock>(i.op);
    run_gap(m, c, gap, &a, dt);
    gap.clear();
    apply_diagonal_evolution(m, cache.get(a), a.duration);
    last = &a;
  }
  if (last || !gap.empty()) run_gap(m, c, gap, last, dt);
}

void run(const Circuit& c, Matrix& m, const SimulationOptions& o) {
  if (c.paradigm() == Paradigm::bDAQC) run_banged(c, m, layer_time(c, o));
  else run_stepwise(c, m);
}

}  // namespace

UnitaryResult simulate_unitary(const Circuit& circuit, const SimulationOptions& options) {
  check_dimension(circuit, options);
  const std::size_t dim = std::size_t{1} << circuit.num_qubits();
  Matrix m = Matrix::Identity(dim, dim);
  run(circuit, m, options);
  return {std::move(m), dim};
}

StateResult simulate_state(const Circuit& circuit, const Vector& initial, const SimulationOptions& options) {
  check_dimension(circuit, options);
  const std::size_t dim = std::size_t{1} << circuit.num_qubits();
  if (static_cast<std::size_t>(initial.size()) != dim) throw std::invalid_argument("initial state has wrong dimension");
  Matrix m = initial;
  run(circuit, m, options);
  return {m.col(0)};
}

Matrix unitary_of_ideal(const Circuit& circuit) { return simulate_unitary(circuit).matrix; }

double average_unitary_fidelity(const Matrix& u, const Matrix& u_ref) {
  if (u.rows() != u_ref.rows() || u.cols() != u_ref.cols() || u.rows() != u.cols())
    throw std::invalid_argument("fidelity of matrices with different dimensions");
  const double n = static_cast<double>(u.rows());
  const cd tr = (u_ref.adjoint() * u).trace();
  return (n + std::norm(tr)) / (n * (n + 1));
}

double state_fidelity(const Vector& psi, const Vector& phi) {
  if (psi.size() != phi.size()) throw std::invalid_argument("fidelity of states with different dimensions");
  return std::norm(psi.dot(phi));
}

double unitarity_error(const Matrix& u) {
  return ((u.adjoint() * u) - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

Vector basis_state(int num_qubits, std::size_t index) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (index >= dim) throw std::out_of_range("basis index out of range");
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return v;
}

Vector ghz_state(int num_qubits) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  Vector v = Vector::Zero(dim);
  v(0) = v(dim - 1) = 1.0 / std::sqrt(2.0);
  return v;
}

void apply_single_qubit(Matrix& m, int num_qubits, int q, const Eigen::Matrix2cd& u) {
  const std::size_t dim = static_cast<std::size_t>(m.rows());
  const std::size_t mask = qubit_mask(q, num_qubits);
  const cd u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    cd* v = m.col(col).data();
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & mask) continue;
      const cd a = v[i], b = v[i | mask];
      v[i] = u00 * a + u01 * b;
      v[i | mask] = u10 * a + u11 * b;
    }
  }
}

void apply_diagonal_evolution(Matrix& m, const std::vector<double>& diag, double t) {
  if (static_cast<Eigen::Index>(diag.size()) != m.rows()) throw std::invalid_argument("diagonal size mismatch");
  Vector phase(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) phase(i) = std::polar(1.0, -t * diag[i]);
  m = phase.asDiagonal() * m;
}

Eigen::Matrix2cd rxy_generator(double theta, double axis, double dt) {
  Eigen::Matrix2cd h;
  const double a = theta / (2 * dt);
  h << 0, a * std::polar(1.0, -axis), a * std::polar(1.0, axis), 0;
  return h;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

void apply_overlap_layer(Matrix& m, const IsingHamiltonian& resource, const std::vector<double>* coupling_scale,
                         const std::vector<Eigen::Matrix2cd>& generators, double dt) {
  const int n = resource.num_qubits();
  const std::size_t dim = std::size_t{1} << n;
  if (static_cast<std::size_t>(m.rows()) != dim) throw std::invalid_argument("state dimension mismatch");
  const auto& tuples = resource.connectivity().tuples();
  std::vector<double> coeff = resource.coefficients();
  if (coupling_scale)
    for (std::size_t b = 0; b < coeff.size(); ++b) coeff[b] *= (*coupling_scale)[b];

  std::vector<bool> active(n, false);
  for (int q = 0; q < n && q < static_cast<int>(generators.size()); ++q)
    active[q] = generators[q].cwiseAbs().maxCoeff() > 0.0;

  UnionFind uf(n);
  std::vector<double> passive_diag(dim, 0.0);
  std::vector<std::vector<std::size_t>> touching;  // per root: tuple indices
  touching.assign(n, {});
  for (std::size_t b = 0; b < tuples.size(); ++b) {
    if (coeff[b] == 0.0) continue;
    int first_active = -1;
    for (int q : tuples[b]) {
      if (!active[q]) continue;
      if (first_active < 0) first_active = q;
      else uf.unite(first_active, q);
    }
    if (first_active < 0) {
      const std::uint64_t mask = tuple_mask(tuples[b], n);
      for (std::size_t i = 0; i < dim; ++i) passive_diag[i] += (std::popcount(i & mask) & 1) ? -coeff[b] : coeff[b];
    }
  }
  for (std::size_t b = 0; b < tuples.size(); ++b) {
    if (coeff[b] == 0.0) continue;
    for (int q : tuples[b])
      if (active[q]) {
        touching[uf.find(q)].push_back(b);
        break;
      }
  }
  apply_diagonal_evolution(m, passive_diag, dt);

  for (int root = 0; root < n; ++root) {
    if (!active[root] || uf.find(root) != root) continue;
    std::vector<int> comp;
    for (int q = 0; q < n; ++q)
      if (active[q] && uf.find(q) == root) comp.push_back(q);
    const int k = static_cast<int>(comp.size());
    const std::size_t sub = std::size_t{1} << k;
    std::uint64_t comp_mask = 0;
    std::vector<std::size_t> offset(sub, 0);
    for (int j = 0; j < k; ++j) comp_mask |= qubit_mask(comp[j], n);
    for (std::size_t s = 0; s < sub; ++s)
      for (int j = 0; j < k; ++j)
        if (s & (std::size_t{1} << (k - 1 - j))) offset[s] |= qubit_mask(comp[j], n);

    // Neighbouring passive qubits whose Z value conditions the component.
    std::uint64_t cond_mask = 0;
    for (std::size_t b : touching[root]) cond_mask |= tuple_mask(tuples[b], n) & ~comp_mask;
    std::vector<int> cond_bits;
    for (int q = 0; q < n; ++q)
      if (cond_mask & qubit_mask(q, n)) cond_bits.push_back(q);

    Matrix h_gen = Matrix::Zero(sub, sub);
    for (int j = 0; j < k; ++j) {
      const auto& g = generators[comp[j]];
      const std::size_t bit = std::size_t{1} << (k - 1 - j);
      for (std::size_t s = 0; s < sub; ++s) {
        const int in = (s & bit) ? 1 : 0;
        for (int out = 0; out < 2; ++out) {
          const std::size_t t = out ? (s | bit) : (s & ~bit);
          h_gen(t, s) += g(out, in);
        }
      }
    }

    std::vector<Matrix> cache(std::size_t{1} << cond_bits.size());
    std::vector<bool> have(cache.size(), false);
    Eigen::SelfAdjointEigenSolver<Matrix> eig;
    Matrix block(sub, m.cols());
    for (std::size_t base = 0; base < dim; ++base) {
      if (base & comp_mask) continue;
      std::size_t cfg = 0;
      for (int q : cond_bits) cfg = (cfg << 1) | ((base & qubit_mask(q, n)) ? 1 : 0);
      if (!have[cfg]) {
        Matrix h = h_gen;
        for (std::size_t s = 0; s < sub; ++s) {
          const std::size_t idx = base | offset[s];
          double e = 0.0;
          for (std::size_t b : touching[root])
            e += (std::popcount(idx & tuple_mask(tuples[b], n)) & 1) ? -coeff[b] : coeff[b];
          h(s, s) += e;
        }
        eig.compute(h);
        Vector ph(sub);
        for (std::size_t s = 0; s < sub; ++s) ph(s) = std::polar(1.0, -dt * eig.eigenvalues()(s));
        cache[cfg] = eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();
        have[cfg] = true;
      }
      for (std::size_t s = 0; s < sub; ++s) block.row(s) = m.row(base | offset[s]);
      block = cache[cfg] * block;
      for (std::size_t s = 0; s < sub; ++s) m.row(base | offset[s]) = block.row(s);
    }
  }
}

}  // namespace daqc
