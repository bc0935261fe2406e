#include "daqc/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "daqc/error.hpp"

namespace daqc {

using std::numbers::pi;
using cd = std::complex<double>;

std::string to_string(Paradigm p) {
  switch (p) {
    case Paradigm::DQC: return "dqc";
    case Paradigm::sDAQC: return "sdaqc";
    case Paradigm::bDAQC: return "bdaqc";
  }
  return "?";
}

Paradigm paradigm_from_string(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "dqc") return Paradigm::DQC;
  if (l == "sdaqc") return Paradigm::sDAQC;
  if (l == "bdaqc") return Paradigm::bDAQC;
  throw ConfigError("unknown paradigm '" + s + "' (expected dqc, sdaqc or bdaqc)");
}

std::string to_string(GateKind g) {
  switch (g) {
    case GateKind::Rxy: return "Rxy";
    case GateKind::Rz: return "Rz";
    case GateKind::X: return "X";
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::Sdg: return "Sdg";
  }
  return "?";
}

namespace {

GateKind gate_kind_from_string(const std::string& s) {
  for (GateKind g : {GateKind::Rxy, GateKind::Rz, GateKind::X, GateKind::H, GateKind::S, GateKind::Sdg})
    if (to_string(g) == s) return g;
  throw ConfigError("unknown gate '" + s + "'");
}

}  // namespace

double normalize_zz_phase(double phase) {
  if (!std::isfinite(phase)) throw std::invalid_argument("non-finite ZZ phase");
  double p = std::fmod(phase, 4 * pi);
  if (p <= -2 * pi) p += 4 * pi;
  if (p > 2 * pi) p -= 4 * pi;
  return p;
}

Circuit::Circuit(int num_qubits, Paradigm paradigm, std::optional<IsingHamiltonian> resource)
    : num_qubits_(num_qubits), paradigm_(paradigm), resource_(std::move(resource)) {
  if (num_qubits_ < 1) throw std::invalid_argument("circuit needs at least one qubit");
  if (resource_ && resource_->num_qubits() != num_qubits_)
    throw std::invalid_argument("resource Hamiltonian has a different qubit count");
}

void Circuit::validate(const Operation& op) const {
  auto check_q = [&](int q) {
    if (q < 0 || q >= num_qubits_)
      throw std::invalid_argument("qubit " + std::to_string(q) + " out of range");
  };
  if (const auto* g = std::get_if<SingleQubitGate>(&op)) {
    check_q(g->qubit);
    if (!std::isfinite(g->theta) || !std::isfinite(g->axis))
      throw std::invalid_argument("non-finite gate parameter");
  } else if (const auto* z = std::get_if<ZZGate>(&op)) {
    check_q(z->q0);
    check_q(z->q1);
    if (z->q0 == z->q1) throw std::invalid_argument("ZZ gate needs two distinct qubits");
    if (paradigm_ == Paradigm::bDAQC) throw std::invalid_argument("bDAQC circuits cannot hold ZZ gates");
  } else {
    const auto& a = std::get<AnalogBlock>(op);
    if (!std::isfinite(a.duration)) throw std::invalid_argument("non-finite analog duration");
    if (!resource_) throw std::invalid_argument("analog block in a circuit without resource Hamiltonian");
    if (!a.coupling_scale.empty() && a.coupling_scale.size() != resource_->connectivity().size())
      throw std::invalid_argument("coupling scale has wrong length");
    if (paradigm_ == Paradigm::DQC) throw std::invalid_argument("DQC circuits cannot hold analog blocks");
  }
}

Circuit& Circuit::append(Operation op, double start) {
  validate(op);
  if (auto* z = std::get_if<ZZGate>(&op)) {
    if (z->q0 > z->q1) std::swap(z->q0, z->q1);
    z->phase = normalize_zz_phase(z->phase);
  }
  instructions_.push_back(Instruction{std::move(op), start});
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.num_qubits_ != num_qubits_) throw std::invalid_argument("qubit count mismatch in append");
  if (other.count_analog_blocks() > 0) {
    if (!resource_) resource_ = other.resource_;
    else if (other.resource_ && !(*other.resource_ == *resource_))
      throw std::invalid_argument("cannot append circuits with different resources");
  }
  for (const auto& ins : other.instructions_) append(ins.op);
  return *this;
}

Circuit Circuit::with_instructions(std::vector<Instruction> instructions) const {
  Circuit c(num_qubits_, paradigm_, resource_);
  c.metadata_ = metadata_;
  for (auto& ins : instructions) c.append(std::move(ins.op), ins.start);
  return c;
}

Circuit Circuit::with_paradigm(Paradigm p) const {
  Circuit c(num_qubits_, p, resource_);
  c.metadata_ = metadata_;
  for (const auto& ins : instructions_) c.append(ins.op, ins.start);
  return c;
}

std::size_t Circuit::count_analog_blocks() const {
  return std::count_if(instructions_.begin(), instructions_.end(),
                       [](const Instruction& i) { return std::holds_alternative<AnalogBlock>(i.op); });
}

std::size_t Circuit::count_tqg() const {
  return std::count_if(instructions_.begin(), instructions_.end(),
                       [](const Instruction& i) { return std::holds_alternative<ZZGate>(i.op); });
}

std::size_t Circuit::count_sqg(bool include_virtual) const {
  return std::count_if(instructions_.begin(), instructions_.end(), [&](const Instruction& i) {
    const auto* g = std::get_if<SingleQubitGate>(&i.op);
    return g && (include_virtual || is_physical(*g));
  });
}

double Circuit::total_analog_time() const {
  double t = 0.0;
  for (const auto& i : instructions_)
    if (const auto* a = std::get_if<AnalogBlock>(&i.op)) t += std::abs(a->duration);
  return t;
}

bool Circuit::has_negative_durations() const {
  return std::any_of(instructions_.begin(), instructions_.end(), [](const Instruction& i) {
    const auto* a = std::get_if<AnalogBlock>(&i.op);
    return a && a->duration < 0;
  });
}

std::vector<SingleQubitGate> lower(const SingleQubitGate& g) {
  const int q = g.qubit;
  switch (g.kind) {
    case GateKind::Rxy:
    case GateKind::Rz: return {g};
    case GateKind::X: return {{GateKind::Rxy, q, pi, 0.0}};
    case GateKind::H: return {{GateKind::Rz, q, pi, 0.0}, {GateKind::Rxy, q, pi / 2, pi / 2}};
    case GateKind::S: return {{GateKind::Rz, q, pi / 2, 0.0}};
    case GateKind::Sdg: return {{GateKind::Rz, q, -pi / 2, 0.0}};
  }
  return {g};
}

bool is_physical(const SingleQubitGate& g) {
  return g.kind != GateKind::Rz && g.kind != GateKind::S && g.kind != GateKind::Sdg;
}

Eigen::Matrix2cd gate_matrix(const SingleQubitGate& g) {
  const cd i{0.0, 1.0};
  Eigen::Matrix2cd m;
  switch (g.kind) {
    case GateKind::Rxy: {
      const double c = std::cos(g.theta / 2), s = std::sin(g.theta / 2);
      m << c, -i * s * std::exp(-i * g.axis), -i * s * std::exp(i * g.axis), c;
      break;
    }
    case GateKind::Rz: m << std::exp(-i * (g.theta / 2)), 0, 0, std::exp(i * (g.theta / 2)); break;
    case GateKind::X: m << 0, 1, 1, 0; break;
    case GateKind::H: m << 1, 1, 1, -1; m /= std::sqrt(2.0); break;
    case GateKind::S: m << 1, 0, 0, i; break;
    case GateKind::Sdg: m << 1, 0, 0, -i; break;
  }
  return m;
}

namespace {

double sqg_duration(const SingleQubitGate& g, const DurationModel& d) {
  if (d.rz_virtual && !is_physical(g)) return 0.0;
  if (g.kind == GateKind::H && !d.rz_virtual) return 2 * d.sqg_time;
  return d.sqg_time;
}

ScheduledCircuit schedule_stepwise(const Circuit& circuit, const DurationModel& d) {
  const int n = circuit.num_qubits();
  std::vector<double> free_at(n, 0.0);
  std::vector<Instruction> out;
  out.reserve(circuit.size());
  for (const auto& ins : circuit.instructions()) {
    double start = 0.0;
    if (const auto* g = std::get_if<SingleQubitGate>(&ins.op)) {
      start = free_at[g->qubit];
      free_at[g->qubit] = start + sqg_duration(*g, d);
    } else if (const auto* z = std::get_if<ZZGate>(&ins.op)) {
      start = std::max(free_at[z->q0], free_at[z->q1]);
      free_at[z->q0] = free_at[z->q1] = start + d.tqg_time;
    } else {
      const auto& a = std::get<AnalogBlock>(ins.op);
      start = *std::max_element(free_at.begin(), free_at.end());
      std::fill(free_at.begin(), free_at.end(), start + std::abs(a.duration));
    }
    out.push_back({ins.op, start});
  }
  const double total = n ? *std::max_element(free_at.begin(), free_at.end()) : 0.0;
  return {circuit.with_instructions(std::move(out)), total};
}

ScheduledCircuit schedule_banged(const Circuit& circuit, const DurationModel& d) {
  const int n = circuit.num_qubits();
  std::vector<Instruction> out;
  out.reserve(circuit.size());
  double cursor = 0.0;
  // Per-qubit count of physical gates already placed in the current gap.
  std::vector<int> chain(n, 0);
  std::vector<std::size_t> pending;  // indices into `out` of gates in the current gap
  auto close_gap = [&]() {
    const int layers = std::max(1, *std::max_element(chain.begin(), chain.end()));
    cursor += layers * d.sqg_time;
    std::fill(chain.begin(), chain.end(), 0);
    pending.clear();
  };
  for (const auto& ins : circuit.instructions()) {
    if (const auto* g = std::get_if<SingleQubitGate>(&ins.op)) {
      const int k = chain[g->qubit];
      out.push_back({ins.op, cursor + k * d.sqg_time});
      if (is_physical(*g) || !d.rz_virtual) ++chain[g->qubit];
      pending.push_back(out.size() - 1);
    } else {
      // A short block kept with a negative corrected time takes no wall-clock time.
      const auto& a = std::get<AnalogBlock>(ins.op);
      close_gap();
      out.push_back({ins.op, cursor});
      cursor += std::max(0.0, a.duration);
    }
  }
  if (circuit.count_analog_blocks() > 0) close_gap();
  else if (!pending.empty()) close_gap();
  return {circuit.with_instructions(std::move(out)), cursor};
}

// Each qubit must see non-overlapping busy intervals.
void check_overlaps(const ScheduledCircuit& sc, const DurationModel& d) {
  if (sc.circuit.paradigm() == Paradigm::bDAQC) return;
  const int n = sc.circuit.num_qubits();
  std::vector<double> busy_until(n, 0.0);
  const double eps = 1e-15;
  for (const auto& ins : sc.circuit.instructions()) {
    std::vector<int> qs;
    double len = 0.0;
    if (const auto* g = std::get_if<SingleQubitGate>(&ins.op)) {
      qs = {g->qubit};
      len = sqg_duration(*g, d);
    } else if (const auto* z = std::get_if<ZZGate>(&ins.op)) {
      qs = {z->q0, z->q1};
      len = d.tqg_time;
    } else {
      for (int q = 0; q < n; ++q) qs.push_back(q);
      len = std::abs(std::get<AnalogBlock>(ins.op).duration);
    }
    for (int q : qs) {
      if (ins.start + eps < busy_until[q]) throw NumericalError("schedule overlap on qubit " + std::to_string(q));
      busy_until[q] = ins.start + len;
    }
  }
}

}  // namespace

ScheduledCircuit schedule(const Circuit& circuit, const DurationModel& durations) {
  if (durations.sqg_time < 0 || durations.tqg_time < 0)
    throw std::invalid_argument("durations must be nonnegative");
  ScheduledCircuit sc = circuit.paradigm() == Paradigm::bDAQC ? schedule_banged(circuit, durations)
                                                               : schedule_stepwise(circuit, durations);
  check_overlaps(sc, durations);
  sc.circuit.metadata()["total_duration"] = sc.total_duration;
  return sc;
}

nlohmann::json to_json(const Circuit& c) {
  nlohmann::json j;
  j["num_qubits"] = c.num_qubits();
  j["paradigm"] = to_string(c.paradigm());
  if (c.resource()) j["resource"] = to_json(*c.resource());
  j["metadata"] = c.metadata();
  auto& list = j["instructions"] = nlohmann::json::array();
  for (const auto& ins : c.instructions()) {
    nlohmann::json e;
    if (const auto* g = std::get_if<SingleQubitGate>(&ins.op)) {
      e["kind"] = "sqg";
      e["gate"] = to_string(g->kind);
      e["qubit"] = g->qubit;
      if (g->kind == GateKind::Rxy || g->kind == GateKind::Rz) e["theta"] = g->theta;
      if (g->kind == GateKind::Rxy) e["axis"] = g->axis;
    } else if (const auto* z = std::get_if<ZZGate>(&ins.op)) {
      e["kind"] = "zz";
      e["qubits"] = {z->q0, z->q1};
      e["phase"] = z->phase;
    } else {
      const auto& a = std::get<AnalogBlock>(ins.op);
      e["kind"] = "analog";
      e["duration"] = a.duration;
      if (!a.coupling_scale.empty()) e["coupling_scale"] = a.coupling_scale;
    }
    if (ins.start >= 0) e["start"] = ins.start;
    list.push_back(std::move(e));
  }
  return j;
}

Circuit circuit_from_json(const nlohmann::json& j) {
  try {
    std::optional<IsingHamiltonian> resource;
    if (j.contains("resource")) resource = hamiltonian_from_json(j.at("resource"), HamiltonianRole::Resource);
    Circuit c(j.at("num_qubits").get<int>(), paradigm_from_string(j.at("paradigm").get<std::string>()),
              std::move(resource));
    if (j.contains("metadata")) c.metadata() = j.at("metadata");
    for (const auto& e : j.at("instructions")) {
      const auto kind = e.at("kind").get<std::string>();
      const double start = e.value("start", -1.0);
      if (kind == "sqg") {
        c.append(SingleQubitGate{gate_kind_from_string(e.at("gate").get<std::string>()),
                                 e.at("qubit").get<int>(), e.value("theta", 0.0), e.value("axis", 0.0)},
                 start);
      } else if (kind == "zz") {
        const auto q = e.at("qubits").get<std::vector<int>>();
        if (q.size() != 2) throw ConfigError("zz instruction needs two qubits");
        c.append(ZZGate{q[0], q[1], e.at("phase").get<double>()}, start);
      } else if (kind == "analog") {
        c.append(AnalogBlock{e.at("duration").get<double>(),
                             e.value("coupling_scale", std::vector<double>{})},
                 start);
      } else {
        throw ConfigError("unknown instruction kind '" + kind + "'");
      }
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid circuit JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid circuit: ") + e.what());
  }
}

namespace {

std::string format_ns(double seconds) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << seconds * 1e9;
  return os.str();
}

std::string gate_label(const SingleQubitGate& g) {
  std::ostringstream os;
  os << std::setprecision(4);
  switch (g.kind) {
    case GateKind::Rxy: os << "Rxy(" << g.theta << "," << g.axis << ")"; break;
    case GateKind::Rz: os << "Rz(" << g.theta << ")"; break;
    default: os << to_string(g.kind);
  }
  return os.str();
}

}  // namespace

std::string to_text(const Circuit& c) {
  std::ostringstream os;
  os << "circuit N=" << c.num_qubits() << " paradigm=" << to_string(c.paradigm()) << "\n";
  for (const auto& ins : c.instructions()) {
    os << "  ";
    if (ins.start >= 0) os << "[" << std::setw(12) << format_ns(ins.start) << " ns] ";
    if (const auto* g = std::get_if<SingleQubitGate>(&ins.op)) {
      os << gate_label(*g) << " q" << g->qubit;
    } else if (const auto* z = std::get_if<ZZGate>(&ins.op)) {
      os << "ZZ(" << std::setprecision(6) << z->phase << ") q" << z->q0 << ",q" << z->q1;
    } else {
      os << "ANALOG t=" << format_ns(std::get<AnalogBlock>(ins.op).duration) << " ns";
    }
    os << "\n";
  }
  return os.str();
}

std::string draw(const Circuit& c) {
  const int n = c.num_qubits();
  std::vector<std::string> rows(n);
  for (int q = 0; q < n; ++q) rows[q] = "q" + std::to_string(q) + ": -";
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.size());
  for (auto& r : rows) r.insert(2, width - r.size(), ' ');
  for (const auto& ins : c.instructions()) {
    std::vector<std::string> cell(n, "");
    if (const auto* g = std::get_if<SingleQubitGate>(&ins.op)) {
      cell[g->qubit] = g->kind == GateKind::Rxy || g->kind == GateKind::Rz ? gate_label(*g) : to_string(g->kind);
    } else if (const auto* z = std::get_if<ZZGate>(&ins.op)) {
      cell[z->q0] = "ZZ";
      cell[z->q1] = "ZZ";
      for (int q = z->q0 + 1; q < z->q1; ++q) cell[q] = "|";
    } else {
      for (int q = 0; q < n; ++q) cell[q] = "A";
    }
    std::size_t w = 1;
    for (const auto& s : cell) w = std::max(w, s.size());
    for (int q = 0; q < n; ++q) {
      std::string s = cell[q].empty() ? std::string(w, '-') : cell[q] + std::string(w - cell[q].size(), '-');
      rows[q] += s + "-";
    }
  }
  std::string out;
  for (const auto& r : rows) out += r + "\n";
  return out;
}

}  // namespace daqc
