#include "daqc/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "daqc/error.hpp"

namespace daqc {

using std::numbers::pi;

double compound_fidelity(Paradigm paradigm, const CompoundFidelityInputs& in) {
  const double decay = std::isinf(in.t1) ? 1.0 : std::exp(-in.num_qubits * in.t_tot / in.t1);
  switch (paradigm) {
    case Paradigm::DQC: return std::pow(in.f_tqg, in.n_tqt) * decay;
    case Paradigm::sDAQC:
      return std::pow(in.f_ramp * in.f_coupling, in.n_tqt) * std::pow(in.f_sqg, in.n_sqg) * decay;
    case Paradigm::bDAQC:
      return std::pow(in.f_ramp, in.c) * std::pow(in.f_coupling, in.n_tqt) * std::pow(in.f_sqg, in.n_sqg) *
             std::pow(1.0 - in.eps_central, in.n_ab) * decay;
  }
  return 0.0;
}

double bdaqc_central_error(int degree, double gbar, double dt) {
  if (degree < 1 || !(gbar > 0) || !(dt > 0)) throw std::invalid_argument("central error needs d >= 1, g > 0, dt > 0");
  const double dg = degree * gbar;
  const double a = std::pow(dg, 4) * std::pow(2 * pi / dt, 2);
  const double b = std::pow(2 * dg, 2) * std::pow(pi / dt, 4);
  return std::pow(dt, 3) / 4 * std::sqrt(a + b);
}

double measure_central_error(int degree, double gbar, double dt, double angle) {
  if (degree < 1 || degree > 10) throw std::invalid_argument("degree must be in 1..10");
  const int n = degree + 1;
  const Eigen::Index dim = Eigen::Index{1} << n;
  const auto res = IsingHamiltonian::homogeneous(Connectivity::star(n), gbar, HamiltonianRole::Resource);
  const std::vector<double> diag = res.diagonal();

  Matrix h = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) h(i, i) = diag[i];
  // H_s = angle/(2 dt) X on qubit 0 (MSB)
  Matrix hs = Matrix::Zero(dim, dim);
  const Eigen::Index flip = dim / 2;
  for (Eigen::Index i = 0; i < dim; ++i) hs(i ^ flip, i) = angle / (2 * dt);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(h + hs);
  Vector ph(dim);
  for (Eigen::Index i = 0; i < dim; ++i) ph(i) = std::polar(1.0, dt * eig.eigenvalues()(i));
  const Matrix exact_inv = eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();

  Matrix half = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) half(i, i) = std::polar(1.0, -diag[i] * dt / 2);
  Matrix gate = Matrix::Identity(dim, dim);
  apply_single_qubit(gate, n, 0, gate_matrix({GateKind::Rxy, 0, angle, 0.0}));
  const Matrix err = Matrix::Identity(dim, dim) - half * gate * half * exact_inv;
  return Eigen::JacobiSVD<Matrix>(err).singularValues()(0);
}

double FitResult::operator()(double n) const { return std::pow(f, a * std::pow(n, b)) + c; }

FitResult table2_fit(Paradigm p) {
  switch (p) {
    case Paradigm::DQC: return {0.99986, 0.92985, 2.3882, -1.58e-4, 0.0, true};
    case Paradigm::sDAQC: return {0.99831, 0.06445, 3.8571, -2.94e-4, 0.0, true};
    case Paradigm::bDAQC: return {0.99858, 0.42443, 2.8559, -0.02373, 0.0, true};
  }
  return {};
}

namespace {

constexpr double kMaxExponent = 6.0;

double bounded_b(double p) { return kMaxExponent / (1.0 + std::exp(-p)); }
double unbounded_b(double b) {
  b = std::clamp(b, 1e-6, kMaxExponent - 1e-6);
  return -std::log(kMaxExponent / b - 1.0);
}

struct SignomialResidual {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const std::vector<double>* n;
  const std::vector<double>* y;
  double log_f;

  int inputs() const { return 3; }
  int values() const { return static_cast<int>(n->size()); }

  // p = (log a, b (bounded), c)
  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    const double a = std::exp(p(0)), b = bounded_b(p(1)), c = p(2);
    for (std::size_t i = 0; i < n->size(); ++i)
      r(static_cast<Eigen::Index>(i)) = std::exp(a * std::pow((*n)[i], b) * log_f) + c - (*y)[i];
    return 0;
  }
};

}  // namespace

FitResult fit_signomial(const std::vector<double>& n, const std::vector<double>& fidelity, const FitResult& initial) {
  if (n.size() != fidelity.size()) throw std::invalid_argument("fit: size mismatch");
  if (n.size() < 4) throw std::invalid_argument("fit needs at least four points");
  if (!(initial.f > 0 && initial.f < 1)) throw std::invalid_argument("fit: initial f must be in (0,1)");
  SignomialResidual fun{&n, &fidelity, std::log(initial.f)};
  Eigen::NumericalDiff<SignomialResidual> num(fun);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<SignomialResidual>> lm(num);
  lm.parameters.maxfev = 4000;
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  Eigen::VectorXd p(3);
  p << std::log(std::max(initial.a, 1e-12)), unbounded_b(initial.b), initial.c;
  const auto status = lm.minimize(p);
  FitResult r;
  r.f = initial.f;
  r.a = std::exp(p(0));
  r.b = bounded_b(p(1));
  r.c = p(2);
  Eigen::VectorXd res(static_cast<Eigen::Index>(n.size()));
  fun(p, res);
  r.residual = res.norm();
  r.converged = status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
                status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation;
  if (!r.converged) throw NumericalError("signomial fit did not converge");
  return r;
}

double PowerLawFit::operator()(double n) const { return prefactor * std::pow(n, exponent); }

PowerLawFit fit_power_law(const std::vector<double>& n, const std::vector<double>& y) {
  if (n.size() != y.size()) throw std::invalid_argument("fit: size mismatch");
  if (n.size() < 2) throw std::invalid_argument("power-law fit needs at least two points");
  const auto m = static_cast<Eigen::Index>(n.size());
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(n[i] > 0 && y[i] > 0)) throw std::invalid_argument("power-law fit needs positive data");
    a(i, 0) = 1.0;
    a(i, 1) = std::log(n[i]);
    b(i) = std::log(y[i]);
  }
  const Eigen::Vector2d x = a.colPivHouseholderQr().solve(b);
  return {std::exp(x(0)), x(1), (a * x - b).norm()};
}

MonteCarloResult run_monte_carlo(const Experiment& experiment, const NoiseModel& model, int iterations, int threads) {
  if (iterations < 1) throw std::invalid_argument("iterations must be positive");
  std::vector<double> values(static_cast<std::size_t>(iterations));
  auto one = [&](int k) {
    const Circuit noisy = model.noiseless() ? experiment.circuit : perturb(experiment.circuit, model, k);
    if (experiment.kind == Experiment::Kind::Unitary)
      return average_unitary_fidelity(simulate_unitary(noisy).matrix, experiment.ideal_unitary);
    return state_fidelity(simulate_state(noisy, experiment.initial).amplitudes, experiment.ideal_state);
  };
  if (model.noiseless()) {
    std::fill(values.begin(), values.end(), one(0));
  } else {
    int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, iterations);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&]() {
      for (int k = next++; k < iterations; k = next++) {
        try {
          values[static_cast<std::size_t>(k)] = one(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
  }
  // Kahan summation in iteration order.
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  MonteCarloResult r;
  r.iterations = iterations;
  r.mean = sum / iterations;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.std_dev = iterations > 1 ? std::sqrt(ss / (iterations - 1)) : 0.0;
  r.std_error = r.std_dev / std::sqrt(static_cast<double>(iterations));
  return r;
}

Experiment make_experiment(Algorithm a, Paradigm p, int num_qubits, const ExperimentSettings& settings) {
  Experiment e{build_algorithm_circuit(a, p, num_qubits, settings.gbar, settings.compile), Experiment::Kind::Unitary, {}, {}, {}};
  if (a == Algorithm::StarGhz) {
    e.kind = Experiment::Kind::State;
    e.initial = basis_state(num_qubits, 0);
    e.ideal_state = ghz_state(num_qubits);
  } else {
    e.kind = Experiment::Kind::Unitary;
    e.ideal_unitary = unitary_of_ideal(gen_qft_dqc(num_qubits, a == Algorithm::AtaQft ? "ata" : "star"));
  }
  return e;
}

CircuitStats circuit_stats(const Circuit& c, const DurationModel& d) {
  CircuitStats s;
  s.duration = schedule(c, d).total_duration;
  s.n_ab = c.count_analog_blocks();
  s.n_sqg = c.count_sqg(false);
  if (c.paradigm() == Paradigm::DQC) s.n_tqt = c.count_tqg();
  else if (c.resource()) s.n_tqt = s.n_ab * c.resource()->connectivity().size();
  return s;
}

namespace {

RunRow base_row(Algorithm a, Paradigm p, int n) {
  RunRow r;
  r.algorithm = to_string(a);
  r.paradigm = to_string(p);
  r.num_qubits = n;
  return r;
}

std::string compact(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

RunRow duration_row(Algorithm a, Paradigm p, int num_qubits, const ExperimentSettings& settings) {
  RunRow row = base_row(a, p, num_qubits);
  try {
    const Circuit c = build_algorithm_circuit(a, p, num_qubits, settings.gbar, settings.compile);
    const CircuitStats s = circuit_stats(c, settings.durations);
    row.duration = s.duration;
    row.n_ab = s.n_ab;
    row.n_tqt = s.n_tqt;
    row.n_sqg = s.n_sqg;
    if (c.has_negative_durations()) row.note = "negative_times";
  } catch (const CompileError& e) {
    row.skipped = true;
    row.note = "skipped(" + compact(e.what()) + ")";
  }
  return row;
}

RunRow sweep_row(Algorithm a, Paradigm p, int num_qubits, const ExperimentSettings& settings,
                 const NoiseModel& model, int iterations, int threads) {
  RunRow row = base_row(a, p, num_qubits);
  try {
    const Experiment e = make_experiment(a, p, num_qubits, settings);
    const CircuitStats s = circuit_stats(e.circuit, settings.durations);
    row.duration = s.duration;
    row.n_ab = s.n_ab;
    row.n_tqt = s.n_tqt;
    row.n_sqg = s.n_sqg;
    if (e.circuit.has_negative_durations()) row.note = "negative_times";
    const MonteCarloResult mc = run_monte_carlo(e, model, iterations, threads);
    row.mean_fidelity = mc.mean;
    row.std_error = mc.std_error;
  } catch (const CompileError& e) {
    row.skipped = true;
    row.note = "skipped(" + compact(e.what()) + ")";
  }
  return row;
}

std::string csv_header() {
  return "algorithm,paradigm,N,mean_fidelity,stderr,duration_s,n_ab,n_tqt,n_sqg,note";
}

std::string to_csv(const RunRow& r) {
  std::ostringstream os;
  os << r.algorithm << "," << r.paradigm << "," << r.num_qubits << ",";
  if (r.skipped) {
    os << ",,,,,," << r.note;
    return os.str();
  }
  os << std::setprecision(10) << r.mean_fidelity << "," << r.std_error << "," << r.duration << "," << r.n_ab << ","
     << r.n_tqt << "," << r.n_sqg << "," << r.note;
  return os.str();
}

TradeoffResult total_fidelity_tradeoff(const std::map<Paradigm, FitResult>& fits, const DurationFn& duration,
                                       double t1, int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("invalid N range");
  if (!(t1 > 0)) throw std::invalid_argument("T1 must be positive");
  TradeoffResult out;
  std::vector<double> gap;  // best DAQC minus DQC per N
  for (int n = n_min; n <= n_max; ++n) {
    TradeoffPoint pt{n, {}};
    for (const auto& [p, fit] : fits) {
      const double decay = std::isinf(t1) ? 1.0 : std::exp(-n * duration(p, n) / t1);
      pt.total_fidelity[p] = fit(n) * decay;
    }
    out.series.push_back(pt);
    if (fits.count(Paradigm::DQC)) {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& [p, f] : pt.total_fidelity)
        if (p != Paradigm::DQC) best = std::max(best, f);
      gap.push_back(best - pt.total_fidelity[Paradigm::DQC]);
    }
  }
  for (std::size_t i = 0; i < gap.size(); ++i) {
    if (gap[i] <= 0) continue;
    if (i == 0) {
      out.crossover = static_cast<double>(n_min);
    } else {
      const double n0 = n_min + static_cast<double>(i) - 1;
      out.crossover = n0 - gap[i - 1] / (gap[i] - gap[i - 1]);
    }
    break;
  }
  return out;
}

DurationFn star_qft_durations(const ExperimentSettings& settings) {
  auto cache = std::make_shared<std::map<std::pair<int, int>, double>>();
  return [settings, cache](Paradigm p, int n) {
    const auto key = std::make_pair(static_cast<int>(p), n);
    auto it = cache->find(key);
    if (it != cache->end()) return it->second;
    const Circuit c = build_algorithm_circuit(Algorithm::StarQft, p, n, settings.gbar, settings.compile);
    const double d = schedule(c, settings.durations).total_duration;
    cache->emplace(key, d);
    return d;
  };
}

}  // namespace daqc
