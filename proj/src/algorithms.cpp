#include "daqc/algorithms.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "daqc/error.hpp"

namespace daqc {

using std::numbers::pi;

std::size_t TargetSequence::count_targets() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += std::holds_alternative<TargetStep>(s);
  return n;
}

void TargetSequence::append(const TargetSequence& other) {
  if (other.num_qubits != num_qubits) throw std::invalid_argument("sequence qubit counts differ");
  steps.insert(steps.end(), other.steps.begin(), other.steps.end());
  num_swaps += other.num_swaps;
}

namespace {

SingleQubitGate gate(GateKind k, int q, double theta = 0.0, double axis = 0.0) { return {k, q, theta, axis}; }

TargetStep make_target(const Connectivity& conn, const std::vector<std::pair<std::pair<int, int>, double>>& phases,
                       std::string label) {
  std::vector<double> g(conn.size(), 0.0);
  const TupleIndexMap map(conn);
  for (const auto& [pair, phase] : phases) g[map.index({pair.first, pair.second})] += phase / kTargetTime;
  return TargetStep{IsingHamiltonian(conn, std::move(g), HamiltonianRole::Target), kTargetTime, std::move(label)};
}

// Controlled-phase CP(theta) = e^{i theta/4} Rz(theta/2) x Rz(theta/2) ZZ(-theta/4).
double cp_zz_phase(double theta) { return -theta / 4; }

void append_layer(TargetSequence& seq, std::vector<SingleQubitGate> gates) {
  if (gates.empty()) return;
  if (!seq.steps.empty())
    if (auto* last = std::get_if<GateLayer>(&seq.steps.back())) {
      last->gates.insert(last->gates.end(), gates.begin(), gates.end());
      return;
    }
  seq.steps.emplace_back(GateLayer{std::move(gates)});
}

std::vector<SingleQubitGate> rz_layer(const std::vector<double>& angles) {
  std::vector<SingleQubitGate> out;
  for (std::size_t q = 0; q < angles.size(); ++q)
    if (angles[q] != 0.0) out.push_back(gate(GateKind::Rz, static_cast<int>(q), angles[q]));
  return out;
}

TargetSequence qft_ata(int n) {
  const Connectivity conn = Connectivity::all_to_all(std::max(n, 2));
  TargetSequence seq{n, "ata-qft", conn, {}, 0, {}};
  seq.logical_at.resize(n);
  std::iota(seq.logical_at.begin(), seq.logical_at.end(), 0);
  for (int j = 0; j < n; ++j) {
    append_layer(seq, {gate(GateKind::H, j)});
    if (j == n - 1) break;
    std::vector<std::pair<std::pair<int, int>, double>> phases;
    std::vector<double> rz(n, 0.0);
    for (int k = j + 1; k < n; ++k) {
      const double theta = pi / std::pow(2.0, k - j);
      phases.push_back({{j, k}, cp_zz_phase(theta)});
      rz[j] += theta / 2;
      rz[k] += theta / 2;
    }
    seq.steps.emplace_back(make_target(conn, phases, "qft-" + std::to_string(j)));
    append_layer(seq, rz_layer(rz));
  }
  return seq;
}

TargetSequence qft_star(int n) {
  const Connectivity conn = Connectivity::star(n);
  TargetSequence seq{n, "star-qft", conn, {}, 0, {}};
  std::vector<int> pos(n);  // physical position of each logical qubit
  std::iota(pos.begin(), pos.end(), 0);
  append_layer(seq, {gate(GateKind::H, 0)});
  for (int j = 0; j + 1 < n; ++j) {
    std::vector<std::pair<std::pair<int, int>, double>> phases;
    std::vector<double> rz(n, 0.0);
    for (int k = j + 1; k < n; ++k) {
      const double theta = pi / std::pow(2.0, k - j);
      phases.push_back({{0, pos[k]}, cp_zz_phase(theta)});
      rz[0] += theta / 2;
      rz[pos[k]] += theta / 2;
    }
    seq.steps.emplace_back(make_target(conn, phases, "qft-" + std::to_string(j)));
    append_layer(seq, rz_layer(rz));
    if (j + 2 < n) {
      const int ext = pos[j + 1];
      seq.append(gen_swap_daqc(n, ext));
      std::swap(pos[j], pos[j + 1]);
      append_layer(seq, {gate(GateKind::H, 0)});
    } else {
      append_layer(seq, {gate(GateKind::H, pos[n - 1])});
    }
  }
  seq.logical_at.assign(n, -1);
  for (int l = 0; l < n; ++l) seq.logical_at[pos[l]] = l;
  return seq;
}

}  // namespace

TargetSequence gen_qft_targets(int num_qubits, const std::string& connectivity) {
  if (num_qubits < 1) throw std::invalid_argument("QFT needs N >= 1");
  if (connectivity == "ata") return qft_ata(num_qubits);
  if (connectivity == "star") {
    if (num_qubits < 2) throw std::invalid_argument("star QFT needs N >= 2");
    return qft_star(num_qubits);
  }
  throw ConfigError("QFT connectivity must be ata or star");
}

Circuit gen_qft_dqc(int num_qubits, const std::string& connectivity) {
  Circuit c = to_dqc(gen_qft_targets(num_qubits, connectivity));
  c.metadata()["algorithm"] = connectivity + "-qft";
  return c;
}

// SWAP = exp(-i pi/4 XX) exp(-i pi/4 YY) exp(-i pi/4 ZZ) up to a global phase,
// with XX = (H H) ZZ (H H) and YY = (S S) XX (S† S†).
TargetSequence gen_swap_daqc(int num_qubits, int k) {
  if (k <= 0 || k >= num_qubits) throw std::invalid_argument("SWAP partner must be an external qubit");
  const Connectivity conn = Connectivity::star(num_qubits);
  TargetSequence seq{num_qubits, "swap", conn, {}, 1, {}};
  auto zz = [&](const std::string& label) { seq.steps.emplace_back(make_target(conn, {{{0, k}, pi / 4}}, label)); };
  auto both = [&](GateKind g) { return std::vector<SingleQubitGate>{gate(g, 0), gate(g, k)}; };
  zz("swap-zz");
  auto l1 = both(GateKind::Sdg);
  for (auto& g : both(GateKind::H)) l1.push_back(g);
  append_layer(seq, l1);
  zz("swap-yy");
  auto l2 = both(GateKind::H);
  for (auto& g : both(GateKind::S)) l2.push_back(g);
  for (auto& g : both(GateKind::H)) l2.push_back(g);
  append_layer(seq, l2);
  zz("swap-xx");
  append_layer(seq, both(GateKind::H));
  seq.logical_at.resize(num_qubits);
  std::iota(seq.logical_at.begin(), seq.logical_at.end(), 0);
  std::swap(seq.logical_at[0], seq.logical_at[k]);
  return seq;
}

Circuit to_dqc(const TargetSequence& seq) {
  Circuit c(seq.num_qubits, Paradigm::DQC);
  for (const auto& step : seq.steps) {
    if (const auto* layer = std::get_if<GateLayer>(&step)) {
      for (const auto& g : layer->gates) c.append(g);
      continue;
    }
    const auto& t = std::get<TargetStep>(step);
    const auto& tuples = t.target.connectivity().tuples();
    for (std::size_t b = 0; b < tuples.size(); ++b) {
      const double phase = t.t_f * t.target.coefficient(b);
      if (phase == 0.0) continue;
      if (tuples[b].size() != 2) throw CompileError("DQC expansion supports pair couplings only");
      c.zz(tuples[b][0], tuples[b][1], phase);
    }
  }
  c.metadata()["algorithm"] = seq.algorithm;
  c.metadata()["num_swaps"] = seq.num_swaps;
  if (!seq.logical_at.empty()) c.metadata()["logical_at"] = seq.logical_at;
  return c;
}

Circuit gen_ghz(int num_qubits, Paradigm paradigm, double gbar) {
  if (num_qubits < 2) throw std::invalid_argument("GHZ needs N >= 2");
  const int n = num_qubits;
  const Connectivity conn = Connectivity::star(n);
  Circuit c(n, paradigm == Paradigm::DQC ? Paradigm::DQC : Paradigm::sDAQC);
  for (int q = 0; q < n; ++q) c.h(q);
  double centre_phase = 0.0;
  if (paradigm == Paradigm::DQC) {
    // ZZ(-pi/4) = e^{i pi/4} S†_0 S†_k CZ
    for (int k = 1; k < n; ++k) c.zz(0, k, -pi / 4);
    for (int k = 1; k < n; ++k) c.s(k);
    centre_phase = (n - 1) * pi / 2;
  } else if (paradigm == Paradigm::sDAQC) {
    const auto resource = IsingHamiltonian::homogeneous(conn, gbar, HamiltonianRole::Resource);
    const auto target = IsingHamiltonian::homogeneous(conn, gbar, HamiltonianRole::Target);
    const double t_f = pi / (4 * gbar);
    CompileResult r = compile_target(target, resource, t_f, Protocol::Star, Paradigm::sDAQC);
    Circuit body = std::move(r.circuit);
    Circuit full(n, Paradigm::sDAQC, resource);
    full.append(c);
    full.append(body);
    c = std::move(full);
    // ZZ(pi/4) = e^{-i pi/4} S_0 S_k CZ
    for (int k = 1; k < n; ++k) c.sdg(k);
    centre_phase = -(n - 1) * pi / 2;
  } else {
    throw CompileError("GHZ uses a single analog block; bDAQC banging corrections are undefined for it");
  }
  c.rz(0, std::remainder(centre_phase, 4 * pi));
  for (int k = 1; k < n; ++k) c.h(k);
  c.metadata()["algorithm"] = "star-ghz";
  return c;
}

SequenceCompileResult compile_sequence(const TargetSequence& seq, const IsingHamiltonian& resource,
                                       Protocol protocol, Paradigm paradigm, const CompileOptions& options) {
  if (paradigm == Paradigm::DQC) throw CompileError("compile_sequence produces sDAQC or bDAQC circuits");
  if (resource.num_qubits() != seq.num_qubits) throw CompileError("device and algorithm qubit counts differ");
  SequenceCompileResult out{Circuit(seq.num_qubits, Paradigm::sDAQC, resource), {}, false, 0};
  CompileOptions per_target = options;
  per_target.peephole = false;
  std::optional<TimeSolver> solver;
  if (protocol == Protocol::General) solver.emplace(sign_matrix_for(resource.connectivity()));
  for (const auto& step : seq.steps) {
    if (const auto* layer = std::get_if<GateLayer>(&step)) {
      for (const auto& g : layer->gates) out.circuit.append(g);
      continue;
    }
    const auto& t = std::get<TargetStep>(step);
    CompileResult r = compile_target(t.target, resource, t.t_f, protocol, Paradigm::sDAQC, per_target,
                                     solver ? &*solver : nullptr);
    out.x_gates_before_peephole += r.x_gates_before_peephole;
    out.negative_times = out.negative_times || r.solve.diagnostics.negative_times;
    for (auto& w : r.warnings) out.warnings.push_back(t.label + ": " + w);
    out.circuit.append(r.circuit);
  }
  if (options.peephole) out.circuit = peephole(out.circuit);
  out.circuit.metadata()["algorithm"] = seq.algorithm;
  out.circuit.metadata()["protocol"] = to_string(protocol);
  out.circuit.metadata()["num_swaps"] = seq.num_swaps;
  if (!seq.logical_at.empty()) out.circuit.metadata()["logical_at"] = seq.logical_at;
  if (paradigm == Paradigm::bDAQC) out.circuit = bang_transform(out.circuit, options.sqg_time, options.short_blocks);
  return out;
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "ata-qft") return Algorithm::AtaQft;
  if (s == "star-qft") return Algorithm::StarQft;
  if (s == "star-ghz") return Algorithm::StarGhz;
  throw ConfigError("unknown algorithm '" + s + "' (expected ata-qft, star-qft or star-ghz)");
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::AtaQft: return "ata-qft";
    case Algorithm::StarQft: return "star-qft";
    case Algorithm::StarGhz: return "star-ghz";
  }
  return "?";
}

IsingHamiltonian default_resource(Algorithm a, int num_qubits, double gbar) {
  const Connectivity conn =
      a == Algorithm::AtaQft ? Connectivity::all_to_all(num_qubits) : Connectivity::star(num_qubits);
  return IsingHamiltonian::homogeneous(conn, gbar, HamiltonianRole::Resource);
}

Protocol default_protocol(Algorithm a) { return a == Algorithm::AtaQft ? Protocol::General : Protocol::Star; }

Circuit build_algorithm_circuit(Algorithm a, Paradigm p, int num_qubits, double gbar, const CompileOptions& options) {
  if (a == Algorithm::StarGhz) return gen_ghz(num_qubits, p, gbar);
  const std::string conn = a == Algorithm::AtaQft ? "ata" : "star";
  if (p == Paradigm::DQC) return gen_qft_dqc(num_qubits, conn);
  const TargetSequence seq = gen_qft_targets(num_qubits, conn);
  return compile_sequence(seq, default_resource(a, num_qubits, gbar), default_protocol(a), p, options).circuit;
}

}  // namespace daqc
