#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "daqc/algorithms.hpp"
#include "daqc/circuit.hpp"
#include "daqc/noise.hpp"
#include "daqc/simulator.hpp"

namespace daqc {

// -- Analytic error model ------------------------------------------------------

struct CompoundFidelityInputs {
  double f_tqg = 1.0;
  double f_sqg = 1.0;
  double f_ramp = 1.0;
  double f_coupling = 1.0;
  double n_tqt = 0.0;
  double n_sqg = 0.0;
  double n_ab = 0.0;
  double c = 0.0;
  int num_qubits = 1;
  double t_tot = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  double eps_central = 0.0;
};

/// DQC:   f_tqg^n_tqt e^{-N t/T1}
/// sDAQC: (f_ramp f_coupling)^n_tqt f_sqg^n_sqg e^{-N t/T1}
/// bDAQC: f_ramp^c f_coupling^n_tqt f_sqg^n_sqg (1 - eps)^n_ab e^{-N t/T1}
double compound_fidelity(Paradigm paradigm, const CompoundFidelityInputs& in);

/// Closed-form infidelity of one banged X gate on a qubit of degree d:
/// (dt^3/4) sqrt((d g)^4 (2 pi/dt)^2 + (2 d g)^2 (pi/dt)^4).
double bdaqc_central_error(int degree, double gbar, double dt);

/// || 1 - e^{-i H dt/2} e^{-i H_s dt} e^{-i H dt/2} e^{i (H + H_s) dt} ||_2 for
/// H = gbar sum_k Z_a Z_k over d neighbours and H_s = angle/(2 dt) X_a.
double measure_central_error(int degree, double gbar, double dt, double angle = 3.14159265358979323846);

// -- Fits -----------------------------------------------------------------------

/// <F_U> ~ f^{a N^b} + c.
struct FitResult {
  double f = 1.0;
  double a = 1.0;
  double b = 2.0;
  double c = 0.0;
  double residual = 0.0;
  bool converged = true;

  double operator()(double n) const;
};

/// Published star-QFT fit parameters under the default noise targets.
FitResult table2_fit(Paradigm p);

/// Least squares for f^{a N^b} + c.  Only the product a ln f is identifiable,
/// so f is held at `initial.f` and (a, b, c) are fitted with b in (0, 6].
FitResult fit_signomial(const std::vector<double>& n, const std::vector<double>& fidelity,
                        const FitResult& initial = {0.999, 1.0, 2.0, 0.0, 0.0, true});

struct PowerLawFit {
  double prefactor = 0.0;
  double exponent = 0.0;
  double residual = 0.0;

  double operator()(double n) const;
};

/// y = A N^b by linear least squares in log-log space.
PowerLawFit fit_power_law(const std::vector<double>& n, const std::vector<double>& y);

// -- Monte Carlo -------------------------------------------------------------

struct Experiment {
  enum class Kind { Unitary, State };
  Circuit circuit;
  Kind kind = Kind::Unitary;
  Matrix ideal_unitary;  // Kind::Unitary
  Vector initial;        // Kind::State
  Vector ideal_state;    // Kind::State
};

struct MonteCarloResult {
  double mean = 0.0;
  double std_dev = 0.0;
  double std_error = 0.0;
  int iterations = 0;
};

/// Mean fidelity over `iterations` realized draws.  Iteration k always uses
/// the RNG stream (model.seed, k), and the sum is taken in iteration order,
/// so the result does not depend on `threads` (0 = hardware concurrency).
MonteCarloResult run_monte_carlo(const Experiment& experiment, const NoiseModel& model, int iterations = 1000,
                                 int threads = 0);

/// Experiments keep bDAQC blocks shorter than their banging correction (see
/// ShortBlockPolicy); negative solve times still make a point infeasible.
struct ExperimentSettings {
  double gbar = 1e7;
  DurationModel durations{};
  CompileOptions compile{5e-9, true, true, PhaseConvention::Canonical, ShortBlockPolicy::Allow};
};

/// Compiled circuit plus ideal reference (DQC unitary for QFT, GHZ state for
/// star-GHZ).
Experiment make_experiment(Algorithm a, Paradigm p, int num_qubits, const ExperimentSettings& settings);

struct RunRow {
  std::string algorithm;
  std::string paradigm;
  int num_qubits = 0;
  bool skipped = false;
  std::string note;
  double mean_fidelity = 0.0;
  double std_error = 0.0;
  double duration = 0.0;
  std::size_t n_ab = 0;
  std::size_t n_tqt = 0;
  std::size_t n_sqg = 0;
};

struct CircuitStats {
  double duration = 0.0;
  std::size_t n_ab = 0;
  std::size_t n_tqt = 0;
  std::size_t n_sqg = 0;
};

CircuitStats circuit_stats(const Circuit& c, const DurationModel& d);

/// Duration/count row without simulation; infeasible points come back skipped.
RunRow duration_row(Algorithm a, Paradigm p, int num_qubits, const ExperimentSettings& settings);
/// Monte-Carlo row; infeasible points come back skipped.
RunRow sweep_row(Algorithm a, Paradigm p, int num_qubits, const ExperimentSettings& settings,
                 const NoiseModel& model, int iterations, int threads = 0);

std::string csv_header();
std::string to_csv(const RunRow& row);

// -- Control vs decoherence trade-off --------------------------------------------

struct TradeoffPoint {
  int num_qubits;
  std::map<Paradigm, double> total_fidelity;
};

struct TradeoffResult {
  std::vector<TradeoffPoint> series;
  /// Interpolated N where the best DAQC variant first exceeds DQC.
  std::optional<double> crossover;
};

using DurationFn = std::function<double(Paradigm, int)>;

/// F_total(N) = fit(N) e^{-N t(N)/T1} for every paradigm with a fit.
TradeoffResult total_fidelity_tradeoff(const std::map<Paradigm, FitResult>& fits, const DurationFn& duration,
                                       double t1, int n_min, int n_max);

/// Scheduled star-QFT duration for the trade-off study.
DurationFn star_qft_durations(const ExperimentSettings& settings);

}  // namespace daqc
