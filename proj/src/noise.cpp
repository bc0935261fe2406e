#include "daqc/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "daqc/error.hpp"
#include "daqc/simulator.hpp"

namespace daqc {

using std::numbers::pi;

NoiseTargets noise_targets_from_json(const nlohmann::json& j) {
  NoiseTargets t;
  try {
    t.sqg_fid = j.value("sqg_fid", t.sqg_fid);
    t.tqg_fid = j.value("tqg_fid", t.tqg_fid);
    t.analog_term_fid = j.value("analog_term_fid", t.analog_term_fid);
    t.coherent_fraction = j.value("coherent_fraction", t.coherent_fraction);
    t.t1_us = j.value("t1_us", t.t1_us);
    t.seed = j.value("seed", t.seed);
    t.calibration_trials = j.value("calibration_trials", t.calibration_trials);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid noise configuration: ") + e.what());
  }
  for (double f : {t.sqg_fid, t.tqg_fid, t.analog_term_fid})
    if (!(f > 0 && f <= 1)) throw ConfigError("noise fidelities must lie in (0, 1]");
  if (!(t.coherent_fraction >= 0 && t.coherent_fraction <= 1))
    throw ConfigError("coherent_fraction must lie in [0, 1]");
  if (!(t.t1_us > 0)) throw ConfigError("t1_us must be positive");
  if (t.calibration_trials < 1) throw ConfigError("calibration_trials must be positive");
  return t;
}

nlohmann::json to_json(const NoiseTargets& t) {
  return {{"sqg_fid", t.sqg_fid},     {"tqg_fid", t.tqg_fid}, {"analog_term_fid", t.analog_term_fid},
          {"coherent_fraction", t.coherent_fraction}, {"t1_us", t.t1_us}, {"seed", t.seed},
          {"calibration_trials", t.calibration_trials}};
}

namespace {

nlohmann::json widths_json(const ErrorWidths& w) {
  return {{"sigma_sys", w.systematic}, {"sigma_stoch", w.stochastic}};
}

}  // namespace

nlohmann::json to_json(const NoiseModel& m) {
  return {{"sqg", widths_json(m.sqg)},
          {"tqg", widths_json(m.tqg)},
          {"analog_time", widths_json(m.analog_time)},
          {"analog_coupling", widths_json(m.analog_coupling)},
          {"t1_s", std::isinf(m.t1) ? nlohmann::json(nullptr) : nlohmann::json(m.t1)},
          {"seed", m.seed}};
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5eedu};
  return std::mt19937_64(seq);
}

RealizedDraw::RealizedDraw(const NoiseModel& model, std::uint64_t iteration)
    : model_(model), rng_(make_rng(model.seed, iteration)) {
  time_sys_ = gaussian(model_.analog_time.systematic);
}

// A standard normal is consumed on every call, whatever sigma is, so draws
// with different widths but the same seed stay paired.
double RealizedDraw::gaussian(double sigma) {
  std::normal_distribution<double> nd(0.0, 1.0);
  return sigma * nd(rng_);
}

double RealizedDraw::systematic(std::map<std::vector<int>, double>& table, const std::vector<int>& key,
                                double sigma) {
  auto it = table.find(key);
  if (it != table.end()) return it->second;
  const double v = gaussian(sigma);
  table.emplace(key, v);
  return v;
}

double RealizedDraw::sqg_factor(int qubit) {
  const double sys = systematic(sqg_sys_, {qubit}, model_.sqg.systematic);
  return 1.0 + sys + gaussian(model_.sqg.stochastic);
}

double RealizedDraw::tqg_factor(int q0, int q1) {
  const double sys = systematic(tqg_sys_, {std::min(q0, q1), std::max(q0, q1)}, model_.tqg.systematic);
  return 1.0 + sys + gaussian(model_.tqg.stochastic);
}

double RealizedDraw::time_factor() { return 1.0 + time_sys_ + gaussian(model_.analog_time.stochastic); }

double RealizedDraw::coupling_factor(std::size_t coupling) {
  const double sys =
      systematic(coupling_sys_, {static_cast<int>(coupling)}, model_.analog_coupling.systematic);
  return 1.0 + sys + gaussian(model_.analog_coupling.stochastic);
}

Circuit perturb(const Circuit& circuit, RealizedDraw& draw) {
  std::vector<Instruction> out;
  out.reserve(circuit.size());
  const std::size_t l = circuit.count_analog_blocks();
  const bool banged = circuit.paradigm() == Paradigm::bDAQC;
  const std::size_t c = circuit.resource() ? circuit.resource()->connectivity().size() : 0;
  std::size_t block = 0;
  for (const auto& ins : circuit.instructions()) {
    if (const auto* g = std::get_if<SingleQubitGate>(&ins.op)) {
      for (auto lg : lower(*g)) {
        if (lg.kind == GateKind::Rxy) lg.theta *= draw.sqg_factor(lg.qubit);
        out.push_back({lg, ins.start});
      }
    } else if (const auto* z = std::get_if<ZZGate>(&ins.op)) {
      ZZGate p = *z;
      p.phase *= draw.tqg_factor(z->q0, z->q1);
      out.push_back({p, ins.start});
    } else {
      AnalogBlock a = std::get<AnalogBlock>(ins.op);
      if (!banged || block == 0 || block + 1 == l) a.duration *= draw.time_factor();
      if (a.coupling_scale.empty()) a.coupling_scale.assign(c, 1.0);
      for (std::size_t b = 0; b < c; ++b) a.coupling_scale[b] *= draw.coupling_factor(b);
      out.push_back({std::move(a), ins.start});
      ++block;
    }
  }
  return circuit.with_instructions(std::move(out));
}

Circuit perturb(const Circuit& circuit, const NoiseModel& model, std::uint64_t iteration) {
  RealizedDraw draw(model, iteration);
  return perturb(circuit, draw);
}

namespace {

constexpr double kReferenceCoupling = 1e7;

struct Reference {
  Circuit circuit;
  Matrix ideal;
};

Reference reference_operation(OperationClass op) {
  switch (op) {
    case OperationClass::SQG: {
      Circuit c(1, Paradigm::DQC);
      c.x(0);
      return {c, unitary_of_ideal(c)};
    }
    case OperationClass::TQG: {
      Circuit c(2, Paradigm::DQC);
      c.zz(0, 1, pi / 4);
      return {c, unitary_of_ideal(c)};
    }
    case OperationClass::AnalogTerm: {
      auto res = IsingHamiltonian::homogeneous(Connectivity::chain(2), kReferenceCoupling, HamiltonianRole::Resource);
      Circuit c(2, Paradigm::sDAQC, res);
      c.analog(pi / (4 * kReferenceCoupling));
      return {c, unitary_of_ideal(c)};
    }
  }
  throw std::logic_error("unknown operation class");
}

NoiseModel model_for(OperationClass op, const ErrorWidths& w, std::uint64_t seed) {
  NoiseModel m;
  m.seed = seed;
  switch (op) {
    case OperationClass::SQG: m.sqg = w; break;
    case OperationClass::TQG: m.tqg = w; break;
    case OperationClass::AnalogTerm: m.analog_time = w; m.analog_coupling = w; break;
  }
  return m;
}

ErrorWidths split(double sigma, double coherent_fraction) {
  return {sigma * std::sqrt(coherent_fraction), sigma * std::sqrt(1.0 - coherent_fraction)};
}

}  // namespace

double reference_fidelity(OperationClass op, const ErrorWidths& widths, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  const Reference ref = reference_operation(op);
  const NoiseModel model = model_for(op, widths, seed);
  double sum = 0.0, comp = 0.0;
  for (int k = 0; k < trials; ++k) {
    const Circuit noisy = perturb(ref.circuit, model, static_cast<std::uint64_t>(k));
    const double f = average_unitary_fidelity(simulate_unitary(noisy).matrix, ref.ideal);
    const double y = f - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / trials;
}

CalibrationResult calibrate_sigma(OperationClass op, double target_fidelity, double coherent_fraction, int trials,
                                  std::uint64_t seed) {
  if (!(target_fidelity > 0 && target_fidelity < 1)) throw std::invalid_argument("target fidelity must be in (0,1)");
  if (!(coherent_fraction >= 0 && coherent_fraction <= 1))
    throw std::invalid_argument("coherent fraction must be in [0,1]");
  CalibrationResult r;
  auto fid = [&](double sigma) { return reference_fidelity(op, split(sigma, coherent_fraction), trials, seed); };
  double lo = 1e-8, hi = 1e-3;
  while (fid(hi) > target_fidelity) {
    lo = hi;
    hi *= 4;
    if (hi > 10) throw NumericalError("sigma calibration: target fidelity not reachable");
  }
  double f_mid = 1.0;
  double mid = hi;
  for (r.iterations = 0; r.iterations < 80; ++r.iterations) {
    mid = std::sqrt(lo * hi);
    f_mid = fid(mid);
    if (std::abs((1 - f_mid) - (1 - target_fidelity)) < 1e-4 * (1 - target_fidelity)) break;
    if (f_mid > target_fidelity) lo = mid;
    else hi = mid;
    if (hi / lo < 1 + 1e-9) break;
  }
  if (std::abs((1 - f_mid) / (1 - target_fidelity) - 1) > 0.01)
    throw NumericalError("sigma calibration did not converge");
  r.widths = split(mid, coherent_fraction);
  r.measured_fidelity = f_mid;
  const double f_sys = reference_fidelity(op, {r.widths.systematic, 0.0}, trials, seed);
  r.coherent_share = (1 - f_sys) / (1 - f_mid);
  return r;
}

NoiseModel calibrate(const NoiseTargets& targets) {
  NoiseModel m;
  const auto cal = [&](OperationClass op, double f) -> ErrorWidths {
    if (f >= 1.0) return {};
    return calibrate_sigma(op, f, targets.coherent_fraction, targets.calibration_trials, targets.seed).widths;
  };
  m.sqg = cal(OperationClass::SQG, targets.sqg_fid);
  m.tqg = cal(OperationClass::TQG, targets.tqg_fid);
  m.analog_time = m.analog_coupling = cal(OperationClass::AnalogTerm, targets.analog_term_fid);
  m.t1 = targets.t1_us * 1e-6;
  m.seed = targets.seed;
  return m;
}

}  // namespace daqc
