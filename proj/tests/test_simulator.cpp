#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "daqc/error.hpp"
#include "daqc/simulator.hpp"
#include "oracle.hpp"

using namespace daqc;
using std::numbers::pi;

namespace {

Circuit random_circuit(int n, Paradigm p, std::mt19937_64& rng, int length) {
  std::optional<IsingHamiltonian> res;
  if (p != Paradigm::DQC) {
    std::uniform_real_distribution<double> g(0.5e7, 1.5e7);
    std::vector<double> c(n * (n - 1) / 2);
    for (double& v : c) v = g(rng);
    res = IsingHamiltonian(Connectivity::all_to_all(n), c, HamiltonianRole::Resource);
  }
  Circuit c(n, p, res);
  std::uniform_int_distribution<int> kind(0, 6), qubit(0, n - 1);
  std::uniform_real_distribution<double> ang(-pi, pi), t(-1e-7, 1e-7);
  for (int i = 0; i < length; ++i) {
    const int q = qubit(rng);
    switch (kind(rng)) {
      case 0: c.rxy(q, ang(rng), ang(rng)); break;
      case 1: c.rz(q, ang(rng)); break;
      case 2: c.h(q); break;
      case 3: c.s(q); break;
      case 4: c.x(q); break;
      default: {
        if (p == Paradigm::DQC) {
          const int r = (q + 1 + qubit(rng) % (n - 1)) % n;
          c.zz(q, r, ang(rng));
        } else {
          c.analog(t(rng));
        }
      }
    }
  }
  return c;
}

}  // namespace

TEST(Simulator, RandomCircuitsMatchDenseOracle) {
  std::mt19937_64 rng(5);
  for (int n = 2; n <= 5; ++n)
    for (Paradigm p : {Paradigm::DQC, Paradigm::sDAQC})
      for (int trial = 0; trial < 4; ++trial) {
        const auto c = random_circuit(n, p, rng, 30);
        const auto u = simulate_unitary(c).matrix;
        const auto ref = oracle::circuit_unitary(c);
        EXPECT_LT((u - ref).cwiseAbs().maxCoeff(), 1e-10) << "n=" << n;
        EXPECT_LT(unitarity_error(u), 1e-12);
      }
}

TEST(Simulator, StateMatchesUnitaryColumn) {
  std::mt19937_64 rng(6);
  const auto c = random_circuit(4, Paradigm::sDAQC, rng, 25);
  const auto u = simulate_unitary(c).matrix;
  Vector psi = Vector::Random(16);
  psi.normalize();
  const auto out = simulate_state(c, psi).amplitudes;
  EXPECT_LT((out - u * psi).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Simulator, StarAnalogBlockN3) {
  const auto res = IsingHamiltonian::homogeneous(Connectivity::star(3), 1e7, HamiltonianRole::Resource);
  Circuit c(3, Paradigm::sDAQC, res);
  c.analog(37e-9);
  const auto u = simulate_unitary(c).matrix;
  // exp(-i t g (Z0 Z1 + Z0 Z2)) is diagonal with phases -t g (s0 s1 + s0 s2)
  for (int i = 0; i < 8; ++i) {
    const int s0 = (i & 4) ? -1 : 1, s1 = (i & 2) ? -1 : 1, s2 = (i & 1) ? -1 : 1;
    const double phase = -37e-9 * 1e7 * (s0 * s1 + s0 * s2);
    EXPECT_NEAR(std::abs(u(i, i) - std::polar(1.0, phase)), 0.0, 1e-12);
  }
}

TEST(Simulator, OverlapLayerMatchesDenseExponential) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(-pi, pi);
  const double dt = 5e-9;
  for (const auto& conn : {Connectivity::star(4), Connectivity::all_to_all(4), Connectivity::chain(5)}) {
    const auto res = oracle::random_target(conn, rng, 3e7);
    const int n = conn.num_qubits();
    std::vector<Eigen::Matrix2cd> gens(n, Eigen::Matrix2cd::Zero());
    oracle::Mat hsum = oracle::hamiltonian(res);
    for (int q = 0; q < n; q += 2) {
      gens[q] = rxy_generator(ang(rng), ang(rng), dt);
      hsum += oracle::embed(gens[q], q, n);
    }
    std::vector<double> scale(conn.size(), 1.0);
    Matrix m = Matrix::Identity(1 << n, 1 << n);
    apply_overlap_layer(m, res, &scale, gens, dt);
    EXPECT_LT((m - oracle::evolve(hsum, dt)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Simulator, RxyGeneratorExponentiates) {
  const double dt = 5e-9;
  const auto h = rxy_generator(1.1, 0.4, dt);
  EXPECT_LT((oracle::evolve(h, dt) - oracle::rxy(1.1, 0.4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Simulator, BangedCircuitMatchesLayeredOracle) {
  const auto res = IsingHamiltonian::homogeneous(Connectivity::star(3), 1e7, HamiltonianRole::Resource);
  const double dt = 5e-9;
  Circuit c(3, Paradigm::bDAQC, res);
  c.rxy(0, pi, 0).rz(1, 0.3).analog(40e-9).rxy(1, 0.7, 0.2).rxy(2, pi, 0.0).analog(-10e-9);
  const auto u = simulate_unitary(c, SimulationOptions{12, dt}).matrix;

  const oracle::Mat h = oracle::hamiltonian(res);
  const auto gen = [&](double th, double ax, int q) {
    return oracle::embed(oracle::Mat(rxy_generator(th, ax, dt)), q, 3);
  };
  oracle::Mat ref = oracle::evolve(h + gen(pi, 0, 0), dt);
  ref = oracle::embed(oracle::rz(0.3), 1, 3) * ref;
  ref = oracle::evolve(h, 40e-9) * ref;
  ref = oracle::evolve(h + gen(0.7, 0.2, 1) + gen(pi, 0.0, 2), dt) * ref;
  ref = oracle::evolve(h, -10e-9) * ref;
  ref = oracle::evolve(h, dt) * ref;  // empty trailing gap still lasts one layer
  EXPECT_LT((u - ref).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Simulator, ZeroResourceBangedXIsExact) {
  const IsingHamiltonian zero(Connectivity::star(2), {0.0}, HamiltonianRole::Resource);
  Circuit c(2, Paradigm::bDAQC, zero);
  c.x(0).analog(1e-8).x(0);
  const auto u = simulate_unitary(c).matrix;
  EXPECT_LT(oracle::phase_distance(u, oracle::Mat::Identity(4, 4)), 1e-12);

  Circuit one(2, Paradigm::bDAQC, zero);
  one.x(1).analog(1e-8);
  EXPECT_LT(oracle::phase_distance(simulate_unitary(one).matrix, oracle::embed(oracle::pauli_x(), 1, 2)), 1e-12);
}

TEST(Simulator, PlusStateAgainstGhz) {
  for (int n = 2; n <= 8; ++n) {
    Circuit c(n, Paradigm::DQC);
    for (int q = 0; q < n; ++q) c.h(q);
    const auto plus = simulate_state(c, basis_state(n, 0)).amplitudes;
    EXPECT_NEAR(state_fidelity(plus, ghz_state(n)), 1.0 / std::pow(2.0, n - 1), 1e-12);
  }
}

TEST(Simulator, FidelityMatchesOracle) {
  std::mt19937_64 rng(8);
  const auto a = simulate_unitary(random_circuit(3, Paradigm::DQC, rng, 20)).matrix;
  const auto b = simulate_unitary(random_circuit(3, Paradigm::DQC, rng, 20)).matrix;
  EXPECT_NEAR(average_unitary_fidelity(a, b), oracle::fidelity(a, b), 1e-12);
  EXPECT_NEAR(average_unitary_fidelity(a, a), 1.0, 1e-12);
  EXPECT_NEAR(average_unitary_fidelity(a * std::complex<double>(0, 1), a), 1.0, 1e-12);
}

TEST(Simulator, DimensionCap) {
  Circuit c(13, Paradigm::DQC);
  EXPECT_THROW(simulate_unitary(c), NumericalError);
  EXPECT_THROW(simulate_state(Circuit(3, Paradigm::DQC), basis_state(2, 0)), std::invalid_argument);
  EXPECT_THROW(average_unitary_fidelity(Matrix::Identity(2, 2), Matrix::Identity(4, 4)), std::invalid_argument);
}
