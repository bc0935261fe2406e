#include "daqc/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>

#include "daqc/error.hpp"

namespace daqc {

using std::numbers::pi;

int flip_sign(const Tuple& coupling, const std::vector<int>& flipped) {
  int count = 0;
  for (int q : coupling)
    if (std::find(flipped.begin(), flipped.end(), q) != flipped.end()) ++count;
  return (count % 2) ? -1 : 1;
}

namespace {

SignMatrix sign_matrix_from_flips(std::vector<Tuple> couplings, std::vector<std::vector<int>> flips,
                                  SignMatrixKind kind) {
  const auto c = static_cast<Eigen::Index>(couplings.size());
  SignMatrix m{Eigen::MatrixXd(c, c), std::move(couplings), std::move(flips), kind};
  for (Eigen::Index r = 0; r < c; ++r)
    for (Eigen::Index a = 0; a < c; ++a) m.entries(r, a) = flip_sign(m.couplings[r], m.flips[a]);
  return m;
}

}  // namespace

SignMatrix build_sign_matrix_general(const Connectivity& connectivity) {
  if (connectivity.has_higher_order())
    throw std::invalid_argument("general sign matrix needs a pair-only connectivity");
  std::vector<Tuple> couplings = connectivity.tuples();
  std::vector<std::vector<int>> flips = couplings;
  return sign_matrix_from_flips(std::move(couplings), std::move(flips), SignMatrixKind::GeneralXX);
}

SignMatrix build_sign_matrix_star(int num_qubits) {
  if (num_qubits < 2) throw std::invalid_argument("star protocol needs N >= 2");
  const int c = num_qubits - 1;
  std::vector<Tuple> couplings;
  std::vector<std::vector<int>> flips(c);
  for (int k = 1; k <= c; ++k) couplings.push_back({0, k});
  for (int a = 0; a < c; ++a)
    for (int slot = a + 1; slot < c; ++slot) flips[a].push_back(slot + 1);
  return sign_matrix_from_flips(std::move(couplings), std::move(flips), SignMatrixKind::StarOptimized);
}

SignMatrix sign_matrix_for(const Connectivity& connectivity) {
  return connectivity.has_higher_order() ? build_joint_matrix_mbody(connectivity)
                                         : build_sign_matrix_general(connectivity);
}

SignMatrix build_joint_matrix_mbody(const Connectivity& connectivity) {
  std::vector<Tuple> couplings = connectivity.tuples();
  std::vector<std::vector<int>> flips = couplings;
  return sign_matrix_from_flips(std::move(couplings), std::move(flips), SignMatrixKind::JointMBody);
}

namespace {

void flag_times(ScheduleSolve& s) {
  const double scale = s.t.size() ? s.t.cwiseAbs().maxCoeff() : 0.0;
  const double tol = kZeroBlockTolerance * scale;
  for (Eigen::Index a = 0; a < s.t.size(); ++a) {
    if (std::abs(s.t(a)) <= tol) {
      s.t(a) = 0.0;
      s.diagnostics.dropped.push_back(static_cast<std::size_t>(a));
    } else if (s.t(a) < 0) {
      s.diagnostics.negative_times = true;
    }
  }
  s.diagnostics.dropped_zero_blocks = !s.diagnostics.dropped.empty();
}

}  // namespace

TimeSolver::TimeSolver(SignMatrix m) : m_(std::move(m)) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m_.entries);
  const auto& sv = svd.singularValues();
  min_sv_ = sv.size() ? sv(sv.size() - 1) : 0.0;
  singular_ = min_sv_ < 1e-9 * static_cast<double>(m_.size());
  if (!singular_) lu_.compute(m_.entries);
}

ScheduleSolve TimeSolver::solve(const Eigen::VectorXd& G, double t_f) const {
  if (G.size() != m_.entries.rows()) throw std::invalid_argument("G has wrong length for sign matrix");
  if (!(t_f > 0)) throw std::invalid_argument("t_f must be positive");
  ScheduleSolve s;
  s.G = G;
  s.t_f = t_f;
  s.diagnostics.min_singular_value = min_sv_;
  if (singular_) {
    s.diagnostics.singular_M = true;
    return s;
  }
  s.t = lu_.solve(G * t_f);
  flag_times(s);
  return s;
}

ScheduleSolve solve_times(const SignMatrix& m, const Eigen::VectorXd& G, double t_f) {
  return TimeSolver(m).solve(G, t_f);
}

ScheduleSolve solve_times(const SignMatrix& m, const IsingHamiltonian& target, const IsingHamiltonian& resource,
                          double t_f) {
  if (!(target.connectivity() == resource.connectivity()))
    throw std::invalid_argument("target and resource have different connectivities");
  const auto& g = target.coefficients();
  const auto& gbar = resource.coefficients();
  Eigen::VectorXd G(static_cast<Eigen::Index>(g.size()));
  for (std::size_t b = 0; b < g.size(); ++b) {
    if (gbar[b] == 0.0) throw std::invalid_argument("resource coefficient is zero");
    G(static_cast<Eigen::Index>(b)) = g[b] / gbar[b];
  }
  return solve_times(m, G, t_f);
}

ScheduleSolve solve_times_star(const Eigen::VectorXd& G, double t_f) {
  if (!(t_f > 0)) throw std::invalid_argument("t_f must be positive");
  const Eigen::Index c = G.size();
  if (c < 1) throw std::invalid_argument("star protocol needs at least one connection");
  for (Eigen::Index i = 0; i < c; ++i) {
    if (G(i) < 0) throw std::invalid_argument("star protocol needs nonnegative G");
    if (i > 0 && G(i) > G(i - 1)) throw std::invalid_argument("star protocol needs G sorted descending");
  }
  ScheduleSolve s;
  s.G = G;
  s.t_f = t_f;
  s.t.resize(c);
  for (Eigen::Index a = 0; a + 1 < c; ++a) s.t(a) = (G(a) - G(a + 1)) * t_f / 2;
  s.t(c - 1) = (G(0) + G(c - 1)) * t_f / 2;
  s.diagnostics.min_singular_value = std::numeric_limits<double>::quiet_NaN();
  flag_times(s);
  return s;
}

NormalizedG normalize_G(const IsingHamiltonian& target, const IsingHamiltonian& resource, double t_f) {
  if (!(t_f > 0)) throw std::invalid_argument("t_f must be positive");
  if (!(target.connectivity() == resource.connectivity()))
    throw std::invalid_argument("target and resource have different connectivities");
  const auto& g = target.coefficients();
  const auto& gbar = resource.coefficients();
  const std::size_t c = g.size();
  std::vector<double> G(c);
  NormalizedG out;
  for (std::size_t b = 0; b < c; ++b) {
    if (gbar[b] == 0.0) throw std::invalid_argument("resource coefficient is zero");
    G[b] = g[b] / gbar[b];
    if (G[b] < 0) {
      // phase t_f g -> t_f g + sign(gbar) 2pi flips the sign of G
      G[b] += 2 * pi / (t_f * std::abs(gbar[b]));
      out.shifted.push_back(b);
    }
  }
  out.permutation.resize(c);
  std::iota(out.permutation.begin(), out.permutation.end(), std::size_t{0});
  std::stable_sort(out.permutation.begin(), out.permutation.end(),
                   [&](std::size_t a, std::size_t b) { return G[a] > G[b]; });
  out.G.resize(static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < c; ++i) out.G(static_cast<Eigen::Index>(i)) = G[out.permutation[i]];
  return out;
}

std::string to_string(Protocol p) { return p == Protocol::Star ? "star" : "general"; }

Protocol protocol_from_string(const std::string& s) {
  if (s == "general") return Protocol::General;
  if (s == "star") return Protocol::Star;
  throw ConfigError("unknown protocol '" + s + "' (expected general or star)");
}

namespace {

double canonical_phase(double phase) {
  double p = phase - 2 * pi * std::floor(phase / (2 * pi));  // [0, 2pi)
  if (p >= 2 * pi) p -= 2 * pi;
  return p - 2 * pi;
}

Circuit emit_blocks(const IsingHamiltonian& resource, const ScheduleSolve& s,
                    const std::vector<std::vector<int>>& flips, bool drop_zero) {
  Circuit c(resource.num_qubits(), Paradigm::sDAQC, resource);
  for (Eigen::Index a = 0; a < s.t.size(); ++a) {
    if (drop_zero && s.t(a) == 0.0) continue;
    for (int q : flips[a]) c.x(q);
    c.analog(s.t(a));
    for (int q : flips[a]) c.x(q);
  }
  return c;
}

// Qubits to conjugate with X so that exactly the pairs marked in `cut` change
// sign.  On a tree every edge set is a cut: walk from qubit 0 and flip a child
// whenever its parent edge is marked and the parent is unflipped, or vice versa.
std::vector<int> tree_cut(const Connectivity& conn, const std::vector<bool>& cut) {
  const int n = conn.num_qubits();
  std::vector<std::vector<std::pair<int, std::size_t>>> adj(n);
  for (std::size_t e = 0; e < conn.pairs().size(); ++e) {
    const auto [a, b] = conn.pairs()[e];
    adj[a].emplace_back(b, e);
    adj[b].emplace_back(a, e);
  }
  std::vector<int> state(n, -1);
  std::vector<int> stack{0};
  state[0] = 0;
  while (!stack.empty()) {
    const int q = stack.back();
    stack.pop_back();
    for (const auto& [r, e] : adj[q])
      if (state[r] < 0) {
        state[r] = state[q] ^ static_cast<int>(cut[e]);
        stack.push_back(r);
      }
  }
  std::vector<int> out;
  for (int q = 0; q < n; ++q)
    if (state[q] == 1) out.push_back(q);
  return out;
}

std::string describe_times(const Eigen::VectorXd& t) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index a = 0; a < t.size(); ++a) os << (a ? ", " : "") << t(a) * 1e9;
  os << "] ns";
  return os.str();
}

}  // namespace

CompileResult compile_target(const IsingHamiltonian& target, const IsingHamiltonian& resource, double t_f,
                             Protocol protocol, Paradigm paradigm, const CompileOptions& options,
                             const TimeSolver* solver) {
  if (paradigm == Paradigm::DQC) throw CompileError("compile_target produces sDAQC or bDAQC circuits only");
  if (!(target.connectivity() == resource.connectivity()))
    throw CompileError("target and resource connectivities differ");
  for (double g : resource.coefficients())
    if (g == 0.0) throw CompileError("resource Hamiltonian has a zero coupling");

  ScheduleSolve solve;
  std::vector<std::vector<int>> flips;
  if (protocol == Protocol::Star) {
    const auto& conn = resource.connectivity();
    if (!conn.is_tree()) throw CompileError("star protocol requires a tree connectivity (star or chain)");
    const NormalizedG norm = normalize_G(target, resource, t_f);
    solve = solve_times_star(norm.G, t_f);
    const auto c = norm.permutation.size();
    flips.resize(c);
    for (std::size_t a = 0; a < c; ++a) {
      std::vector<bool> cut(c, false);
      for (std::size_t slot = a + 1; slot < c; ++slot) cut[norm.permutation[slot]] = true;
      flips[a] = tree_cut(conn, cut);
    }
  } else {
    std::optional<TimeSolver> own;
    if (!solver || !(solver->matrix().couplings == resource.connectivity().tuples()))
      solver = &own.emplace(sign_matrix_for(resource.connectivity()));
    const SignMatrix& m = solver->matrix();
    Eigen::VectorXd G(static_cast<Eigen::Index>(m.size()));
    for (std::size_t b = 0; b < m.size(); ++b) {
      double phase = t_f * target.coefficient(b);
      if (options.phase_convention == PhaseConvention::Canonical) phase = canonical_phase(phase);
      G(static_cast<Eigen::Index>(b)) = phase / (t_f * resource.coefficient(b));
    }
    solve = solver->solve(G, t_f);
    if (solve.diagnostics.singular_M) {
      std::ostringstream os;
      os << "sign matrix is singular (smallest singular value " << solve.diagnostics.min_singular_value
         << ") for this connectivity";
      throw CompileError(os.str());
    }
    flips = m.flips;
  }

  CompileResult result{emit_blocks(resource, solve, flips, options.drop_zero_blocks), solve, 0, {}};
  result.x_gates_before_peephole = result.circuit.count_sqg(true);
  if (options.peephole) result.circuit = peephole(result.circuit);
  if (solve.diagnostics.negative_times)
    result.warnings.push_back("negative analog block times " + describe_times(solve.t));
  if (paradigm == Paradigm::bDAQC)
    result.circuit = bang_transform(result.circuit, options.sqg_time, options.short_blocks);
  result.circuit.metadata()["protocol"] = to_string(protocol);
  result.circuit.metadata()["t_f"] = t_f;
  return result;
}

namespace {

bool is_self_inverse(const SingleQubitGate& g) { return g.kind == GateKind::X || g.kind == GateKind::H; }

bool same_scale(const AnalogBlock& a, const AnalogBlock& b) { return a.coupling_scale == b.coupling_scale; }

// One sweep of: drop zero blocks, cancel g.g pairs, merge blocks separated by
// virtual gates only.  Returns true when anything changed.
bool peephole_pass(int n, std::vector<Instruction>& ins) {
  bool changed = false;
  std::vector<Instruction> out;
  std::vector<bool> alive;
  std::vector<std::vector<std::size_t>> last(n);  // per-qubit stack of live output indices
  std::ptrdiff_t last_block = -1;
  bool only_virtual_since_block = false;

  for (auto& i : ins) {
    if (const auto* g = std::get_if<SingleQubitGate>(&i.op)) {
      auto& stack = last[g->qubit];
      if (is_self_inverse(*g) && !stack.empty()) {
        const auto* prev = std::get_if<SingleQubitGate>(&out[stack.back()].op);
        if (prev && prev->kind == g->kind) {
          alive[stack.back()] = false;
          stack.pop_back();
          changed = true;
          continue;
        }
      }
      if (is_physical(*g)) only_virtual_since_block = false;
      out.push_back(i);
      alive.push_back(true);
      stack.push_back(out.size() - 1);
    } else if (const auto* z = std::get_if<ZZGate>(&i.op)) {
      only_virtual_since_block = false;
      out.push_back(i);
      alive.push_back(true);
      last[z->q0].push_back(out.size() - 1);
      last[z->q1].push_back(out.size() - 1);
    } else {
      const auto& a = std::get<AnalogBlock>(i.op);
      if (a.duration == 0.0) {
        changed = true;
        continue;
      }
      if (last_block >= 0 && only_virtual_since_block) {
        auto& prev = std::get<AnalogBlock>(out[last_block].op);
        if (same_scale(prev, a)) {
          prev.duration += a.duration;
          changed = true;
          continue;
        }
      }
      out.push_back(i);
      alive.push_back(true);
      last_block = static_cast<std::ptrdiff_t>(out.size() - 1);
      only_virtual_since_block = true;
      for (auto& s : last) s.push_back(out.size() - 1);
    }
  }
  // Cancellations after the last block may have exposed only virtual gates
  // between blocks that were not merged in this sweep; the next sweep sees them.
  ins.clear();
  for (std::size_t k = 0; k < out.size(); ++k)
    if (alive[k]) ins.push_back(std::move(out[k]));
  return changed;
}

}  // namespace

Circuit peephole(const Circuit& circuit) {
  std::vector<Instruction> ins = circuit.instructions();
  for (auto& i : ins) i.start = -1.0;
  for (int iter = 0; iter < 64 && peephole_pass(circuit.num_qubits(), ins); ++iter) {
  }
  return circuit.with_instructions(std::move(ins));
}

FusedRotation fuse_single_qubit(const Eigen::Matrix2cd& u) {
  const double c = std::abs(u(0, 0));
  const double s = std::abs(u(1, 0));
  const double tiny = 1e-12;
  FusedRotation r{2 * std::atan2(s, c), 0.0, 0.0};
  if (s <= tiny) {
    r.theta = 0.0;
    r.alpha = std::arg(u(1, 1)) - std::arg(u(0, 0));
  } else if (c <= tiny) {
    r.theta = pi;
    r.axis = (std::arg(u(1, 0)) - std::arg(u(0, 1))) / 2;
  } else {
    r.alpha = std::arg(u(1, 1)) - std::arg(u(0, 0));
    r.axis = std::arg(u(1, 0)) - std::arg(u(0, 0)) - r.alpha + pi / 2;
  }
  r.alpha = std::remainder(r.alpha, 2 * pi);
  r.axis = std::remainder(r.axis, 2 * pi);
  return r;
}

Circuit bang_transform(const Circuit& circuit, double sqg_time, ShortBlockPolicy policy) {
  if (circuit.paradigm() != Paradigm::sDAQC) throw CompileError("bang_transform expects an sDAQC circuit");
  if (!(sqg_time > 0)) throw std::invalid_argument("sqg_time must be positive");
  const int n = circuit.num_qubits();
  const std::size_t l = circuit.count_analog_blocks();
  if (l < 2)
    throw CompileError("bDAQC needs at least two analog blocks (got " + std::to_string(l) +
                       "); single-block banging corrections are undefined");

  Circuit out(n, Paradigm::bDAQC, circuit.resource());
  out.metadata() = circuit.metadata();
  out.metadata()["sqg_time"] = sqg_time;

  std::vector<Eigen::Matrix2cd> gap(n);
  std::vector<bool> touched(n, false);
  auto flush = [&]() {
    for (int q = 0; q < n; ++q) {
      if (!touched[q]) continue;
      const FusedRotation r = fuse_single_qubit(gap[q]);
      if (r.theta > 1e-12) out.rxy(q, r.theta, r.axis);
      if (std::abs(r.alpha) > 1e-12) out.rz(q, r.alpha);
      touched[q] = false;
    }
  };
  std::size_t block = 0;
  std::size_t short_blocks = 0;
  for (const auto& ins : circuit.instructions()) {
    if (const auto* g = std::get_if<SingleQubitGate>(&ins.op)) {
      if (!touched[g->qubit]) gap[g->qubit] = Eigen::Matrix2cd::Identity();
      gap[g->qubit] = gate_matrix(*g) * gap[g->qubit];
      touched[g->qubit] = true;
    } else if (std::holds_alternative<ZZGate>(ins.op)) {
      throw CompileError("bang_transform cannot handle ZZ gates");
    } else {
      flush();
      const auto& a = std::get<AnalogBlock>(ins.op);
      const bool boundary = block == 0 || block + 1 == l;
      const double corrected = a.duration - (boundary ? 1.5 : 1.0) * sqg_time;
      if (a.duration < 0 || (corrected < 0 && policy == ShortBlockPolicy::Reject)) {
        std::ostringstream os;
        os << "bDAQC infeasible: analog block " << block + 1 << " of " << l << " has t = " << a.duration * 1e9
           << " ns, corrected time " << corrected * 1e9 << " ns is negative";
        throw CompileError(os.str());
      }
      if (corrected < 0) ++short_blocks;
      out.append(AnalogBlock{corrected, a.coupling_scale});
      ++block;
    }
  }
  flush();
  out.metadata()["short_blocks"] = short_blocks;
  return out;
}

Circuit cancel_odd_body(const AnalogBlock& block, const IsingHamiltonian& resource) {
  const int n = resource.num_qubits();
  Circuit c(n, Paradigm::sDAQC, resource);
  c.append(AnalogBlock{block.duration / 2, block.coupling_scale});
  for (int q = 0; q < n; ++q) c.x(q);
  c.append(AnalogBlock{block.duration / 2, block.coupling_scale});
  for (int q = 0; q < n; ++q) c.x(q);
  return c;
}

}  // namespace daqc
