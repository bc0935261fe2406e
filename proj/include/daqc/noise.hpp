#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include <json.hpp>

#include "daqc/circuit.hpp"

namespace daqc {

/// Widths of the multiplicative Gaussian errors x' = x (1 + Delta + delta):
/// Delta ~ N(0, systematic) drawn once per circuit execution, delta ~
/// N(0, stochastic) drawn every time the operation is applied.
struct ErrorWidths {
  double systematic = 0.0;
  double stochastic = 0.0;

  bool zero() const { return systematic == 0.0 && stochastic == 0.0; }
};

struct NoiseModel {
  ErrorWidths sqg;             // Rxy angles (Rz is virtual and exempt)
  ErrorWidths tqg;             // ZZ phases
  ErrorWidths analog_time;     // analog block durations
  ErrorWidths analog_coupling; // resource coefficients, per coupling
  double t1 = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;

  bool noiseless() const {
    return sqg.zero() && tqg.zero() && analog_time.zero() && analog_coupling.zero();
  }
};

/// Target fidelities and split, as read from a noise configuration document.
struct NoiseTargets {
  double sqg_fid = 0.9999;
  double tqg_fid = 0.999;
  double analog_term_fid = 0.9995;
  double coherent_fraction = 0.25;
  double t1_us = 500.0;
  std::uint64_t seed = 2024;
  int calibration_trials = 10000;
};

NoiseTargets noise_targets_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NoiseTargets& t);
nlohmann::json to_json(const NoiseModel& m);

/// Counter-based stream: one independent engine per (seed, stream index).
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

/// One realization of the systematic offsets plus the stochastic stream.
class RealizedDraw {
 public:
  RealizedDraw(const NoiseModel& model, std::uint64_t iteration);

  double sqg_factor(int qubit);
  double tqg_factor(int q0, int q1);
  double time_factor();
  double coupling_factor(std::size_t coupling);

 private:
  double gaussian(double sigma);
  double systematic(std::map<std::vector<int>, double>& table, const std::vector<int>& key, double sigma);

  NoiseModel model_;
  std::mt19937_64 rng_;
  std::map<std::vector<int>, double> sqg_sys_, tqg_sys_, coupling_sys_;
  double time_sys_;
};

/// Applies one realized draw.  Named gates are lowered to Rxy/Rz first.  In
/// bDAQC circuits the duration error is applied to the first and last analog
/// blocks only; coupling errors apply to every block.
Circuit perturb(const Circuit& circuit, RealizedDraw& draw);
Circuit perturb(const Circuit& circuit, const NoiseModel& model, std::uint64_t iteration);

enum class OperationClass { SQG, TQG, AnalogTerm };

struct CalibrationResult {
  ErrorWidths widths;
  double measured_fidelity = 1.0;
  /// Infidelity with only the systematic part switched on, over the total.
  double coherent_share = 0.0;
  int iterations = 0;
};

/// Bisection on sigma until the Monte-Carlo mean of the average gate
/// fidelity over `trials` draws (fixed seed, common random numbers) hits
/// the target.  sigma_sys = sqrt(f) sigma, sigma_stoch = sqrt(1-f) sigma.
/// Reference operations: X gate, ZZ(pi/4), single-pair analog block of phase
/// pi/4 (time and coupling errors share the budget equally).
CalibrationResult calibrate_sigma(OperationClass op, double target_fidelity, double coherent_fraction = 0.25,
                                  int trials = 10000, std::uint64_t seed = 2024);

/// Mean fidelity of the reference operation for given widths.
double reference_fidelity(OperationClass op, const ErrorWidths& widths, int trials, std::uint64_t seed);

NoiseModel calibrate(const NoiseTargets& targets);

}  // namespace daqc
