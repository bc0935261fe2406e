#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "daqc/compiler.hpp"
#include "daqc/error.hpp"
#include "daqc/simulator.hpp"
#include "oracle.hpp"

using namespace daqc;
using std::numbers::pi;

namespace {

IsingHamiltonian uniform_resource(const Connectivity& c, double g = 1e7) {
  return IsingHamiltonian::homogeneous(c, g, HamiltonianRole::Resource);
}

double target_fidelity(const CompileResult& r, const IsingHamiltonian& target, double t_f) {
  const auto u = simulate_unitary(r.circuit).matrix;
  return oracle::fidelity(u, oracle::evolve(oracle::hamiltonian(target), t_f));
}

}  // namespace

TEST(SignMatrix, GeneralMatchesFlipRule) {
  const auto m = build_sign_matrix_general(Connectivity::all_to_all(3));
  Eigen::MatrixXd expect(3, 3);
  expect << 1, -1, -1, -1, 1, -1, -1, -1, 1;
  EXPECT_EQ(m.entries, expect);
  EXPECT_EQ(m.kind, SignMatrixKind::GeneralXX);
  EXPECT_THROW(build_sign_matrix_general(Connectivity(3, {{0, 1}}, {{0, 1, 2}})), std::invalid_argument);
}

TEST(SignMatrix, StarHasPlusOneOnAndAboveDiagonal) {
  for (int n = 2; n <= 9; ++n) {
    const auto m = build_sign_matrix_star(n);
    const int c = n - 1;
    for (int r = 0; r < c; ++r)
      for (int a = 0; a < c; ++a) EXPECT_EQ(m.entries(r, a), (r <= a ? 1.0 : -1.0)) << "n=" << n;
  }
}

TEST(SignMatrix, FlipSign) {
  EXPECT_EQ(flip_sign({0, 1}, {}), 1);
  EXPECT_EQ(flip_sign({0, 1}, {1}), -1);
  EXPECT_EQ(flip_sign({0, 1}, {0, 1}), 1);
  EXPECT_EQ(flip_sign({0, 1, 2}, {0, 1, 2}), -1);
}

TEST(SignMatrix, SingularConnectivities) {
  const TimeSolver s(build_sign_matrix_general(Connectivity::all_to_all(4)));
  EXPECT_TRUE(s.singular());
  const auto target = IsingHamiltonian::homogeneous(Connectivity::all_to_all(4), 1e6, HamiltonianRole::Target);
  EXPECT_THROW(compile_target(target, uniform_resource(Connectivity::all_to_all(4)), 1e-6, Protocol::General,
                              Paradigm::sDAQC),
               CompileError);
  for (int n = 3; n <= 5; ++n) EXPECT_TRUE(TimeSolver(build_sign_matrix_general(Connectivity::chain(n))).singular());
  for (int n : {3, 5, 6, 7}) EXPECT_FALSE(TimeSolver(build_sign_matrix_general(Connectivity::all_to_all(n))).singular());
}

TEST(SignMatrix, JointMatrixForHigherOrder) {
  const Connectivity c(3, {{0, 1}, {0, 2}, {1, 2}}, {{0, 1, 2}});
  const auto m = sign_matrix_for(c);
  EXPECT_EQ(m.kind, SignMatrixKind::JointMBody);
  EXPECT_EQ(m.entries(3, 3), -1.0);
  EXPECT_EQ(m.entries(0, 3), 1.0);
  EXPECT_FALSE(TimeSolver(m).singular());
}

TEST(Solve, ResidualVanishes) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int n : {3, 5, 6}) {
    const auto m = build_sign_matrix_general(Connectivity::all_to_all(n));
    Eigen::VectorXd G(m.size());
    for (auto& v : G) v = u(rng);
    const auto s = solve_times(m, G, 1e-6);
    EXPECT_LT((m.entries * s.t - G * 1e-6).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Solve, StarClosedFormEqualsGeneralSolve) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 3);
  for (int n = 2; n <= 10; ++n) {
    Eigen::VectorXd G(n - 1);
    for (auto& v : G) v = u(rng);
    std::sort(G.begin(), G.end(), std::greater<>());
    const auto closed = solve_times_star(G, 2e-7);
    const auto general = solve_times(build_sign_matrix_star(n), G, 2e-7);
    EXPECT_LT((closed.t - general.t).cwiseAbs().maxCoeff(), 1e-20) << "n=" << n;
    EXPECT_FALSE(closed.diagnostics.negative_times);
  }
  EXPECT_THROW(solve_times_star(Eigen::Vector2d(1, 2), 1.0), std::invalid_argument);
  EXPECT_THROW(solve_times_star(Eigen::Vector2d(1, -2), 1.0), std::invalid_argument);
}

TEST(Solve, FlagsZeroAndNegativeTimes) {
  const auto m = build_sign_matrix_general(Connectivity::all_to_all(3));
  // t = (0, 1, -1) up to scale: G = M t
  const Eigen::Vector3d t(0, 1, -1);
  const auto s = solve_times(m, m.entries * t, 1.0);
  EXPECT_TRUE(s.diagnostics.negative_times);
  ASSERT_EQ(s.diagnostics.dropped.size(), 1u);
  EXPECT_EQ(s.diagnostics.dropped[0], 0u);
}

TEST(NormalizeG, ShiftsNegativesAndSorts) {
  const double gbar = 1e7, t_f = 2 * pi / gbar;
  const IsingHamiltonian target(Connectivity::star(3), {-0.5 * gbar, 1.0 * gbar}, HamiltonianRole::Target);
  const auto n = normalize_G(target, uniform_resource(Connectivity::star(3), gbar), t_f);
  EXPECT_NEAR(n.G(0), 1.0, 1e-12);
  EXPECT_NEAR(n.G(1), 0.5, 1e-12);
  EXPECT_EQ(n.permutation, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(n.shifted, (std::vector<std::size_t>{0}));
}

TEST(CompileTarget, RandomTargetsAreReproducedExactly) {
  std::mt19937_64 rng(9);
  const std::vector<Connectivity> conns{Connectivity::all_to_all(3), Connectivity::all_to_all(5),
                                        Connectivity::star(4), Connectivity::star(5)};
  for (const auto& conn : conns) {
    const auto res = uniform_resource(conn);
    for (int trial = 0; trial < 3; ++trial) {
      const auto target = oracle::random_target(conn, rng, 2e7);
      for (auto conv : {PhaseConvention::AsGiven, PhaseConvention::Canonical}) {
        CompileOptions o;
        o.phase_convention = conv;
        const auto r = compile_target(target, res, 1e-7, Protocol::General, Paradigm::sDAQC, o);
        EXPECT_NEAR(target_fidelity(r, target, 1e-7), 1.0, 1e-10);
        EXPECT_LE(r.x_gates_before_peephole, 4 * conn.size());
        EXPECT_LE(r.circuit.count_analog_blocks(), conn.size());
      }
    }
  }
}

TEST(CompileTarget, StarProtocolIsExact) {
  std::mt19937_64 rng(10);
  for (int n = 2; n <= 7; ++n) {
    const auto conn = Connectivity::star(n);
    const auto res = uniform_resource(conn);
    const auto target = oracle::random_target(conn, rng, 2e7);
    const auto r = compile_target(target, res, 1e-7, Protocol::Star, Paradigm::sDAQC);
    EXPECT_NEAR(target_fidelity(r, target, 1e-7), 1.0, 1e-10) << "n=" << n;
    EXPECT_FALSE(r.circuit.has_negative_durations());
    // consecutive sandwiches share their flips, so peephole leaves about one X pair per block
    EXPECT_LE(r.circuit.count_sqg(), 2 * conn.size());
  }
  const Connectivity ring(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  EXPECT_THROW(compile_target(IsingHamiltonian::homogeneous(ring, 1e6, HamiltonianRole::Target), uniform_resource(ring),
                              1e-7, Protocol::Star, Paradigm::sDAQC),
               CompileError);
}

TEST(CompileTarget, StarProtocolCoversTrees) {
  std::mt19937_64 rng(13);
  std::vector<Connectivity> trees;
  for (int n = 2; n <= 7; ++n) trees.push_back(Connectivity::chain(n));
  trees.emplace_back(6, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {1, 3}, {3, 4}, {3, 5}});
  for (const auto& conn : trees) {
    ASSERT_TRUE(conn.is_tree());
    const auto res = uniform_resource(conn);
    for (int trial = 0; trial < 3; ++trial) {
      const auto target = oracle::random_target(conn, rng, 2e7);
      const auto r = compile_target(target, res, 1e-7, Protocol::Star, Paradigm::sDAQC);
      EXPECT_NEAR(target_fidelity(r, target, 1e-7), 1.0, 1e-10) << "n=" << conn.num_qubits();
      EXPECT_FALSE(r.circuit.has_negative_durations());
      EXPECT_LE(r.circuit.count_analog_blocks(), conn.size());
    }
  }
  EXPECT_FALSE(Connectivity::all_to_all(3).is_tree());
  EXPECT_TRUE(Connectivity::star(5).is_tree());
}

TEST(CompileTarget, HigherOrderTargetThroughJointMatrix) {
  std::mt19937_64 rng(12);
  const Connectivity c(3, {{0, 1}, {0, 2}, {1, 2}}, {{0, 1, 2}});
  const auto target = oracle::random_target(c, rng, 2e7);
  const auto r = compile_target(target, uniform_resource(c), 1e-7, Protocol::General, Paradigm::sDAQC);
  EXPECT_NEAR(target_fidelity(r, target, 1e-7), 1.0, 1e-10);
}

TEST(CompileTarget, ZeroBlocksDoNotChangeTheUnitary) {
  const auto conn = Connectivity::all_to_all(3);
  const auto m = build_sign_matrix_general(conn);
  const Eigen::Vector3d t(0, 2e-8, 3e-8);
  const Eigen::VectorXd G = m.entries * t / 1e-7;
  const IsingHamiltonian target(conn, {G(0) * 1e7, G(1) * 1e7, G(2) * 1e7}, HamiltonianRole::Target);
  CompileOptions keep, drop;
  keep.drop_zero_blocks = false;
  keep.peephole = false;
  keep.phase_convention = drop.phase_convention = PhaseConvention::AsGiven;
  const auto a = compile_target(target, uniform_resource(conn), 1e-7, Protocol::General, Paradigm::sDAQC, keep);
  const auto b = compile_target(target, uniform_resource(conn), 1e-7, Protocol::General, Paradigm::sDAQC, drop);
  EXPECT_LT(b.circuit.count_analog_blocks(), a.circuit.count_analog_blocks() + 0u);
  EXPECT_LT(oracle::phase_distance(simulate_unitary(a.circuit).matrix, simulate_unitary(b.circuit).matrix), 1e-12);
}

TEST(CompileTarget, IdentityTargetGivesEmptyCircuit) {
  const auto conn = Connectivity::all_to_all(3);
  const IsingHamiltonian zero(conn, {0, 0, 0}, HamiltonianRole::Target);
  CompileOptions o;
  o.phase_convention = PhaseConvention::AsGiven;
  const auto r = compile_target(zero, uniform_resource(conn), 1e-7, Protocol::General, Paradigm::sDAQC, o);
  EXPECT_TRUE(r.circuit.empty());
}

TEST(CompileTarget, BdaqcApproachesSdaqcForTinyBangs) {
  std::mt19937_64 rng(13);
  const auto conn = Connectivity::all_to_all(3);
  const auto target = oracle::random_target(conn, rng, 1e7);
  CompileOptions o;
  o.sqg_time = 1e-14;
  const auto b = compile_target(target, uniform_resource(conn), 2e-7, Protocol::General, Paradigm::bDAQC, o);
  EXPECT_EQ(b.circuit.paradigm(), Paradigm::bDAQC);
  EXPECT_GT(target_fidelity(b, target, 2e-7), 1.0 - 1e-8);
}

TEST(CompileTarget, RejectsDqcAndMismatchedConnectivity) {
  const auto t = IsingHamiltonian::homogeneous(Connectivity::star(3), 1e6, HamiltonianRole::Target);
  EXPECT_THROW(compile_target(t, uniform_resource(Connectivity::star(3)), 1e-7, Protocol::General, Paradigm::DQC),
               CompileError);
  EXPECT_THROW(compile_target(t, uniform_resource(Connectivity::chain(3)), 1e-7, Protocol::General, Paradigm::sDAQC),
               CompileError);
}

TEST(BangTransform, CorrectionsMatchWorkedExample) {
  const auto res = uniform_resource(Connectivity::star(2));
  Circuit s(2, Paradigm::sDAQC, res);
  s.x(1).analog(100e-9).x(1).analog(80e-9).x(0).analog(100e-9).x(0);
  const auto b = bang_transform(s, 5e-9);
  std::vector<double> d;
  for (const auto& i : b.instructions())
    if (const auto* a = std::get_if<AnalogBlock>(&i.op)) d.push_back(a->duration);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_NEAR(d[0], 92.5e-9, 1e-18);
  EXPECT_NEAR(d[1], 75e-9, 1e-18);
  EXPECT_NEAR(d[2], 92.5e-9, 1e-18);
  // total analog time drops by (l + 1) dt
  EXPECT_NEAR(s.total_analog_time() - b.total_analog_time(), 4 * 5e-9, 1e-18);
  EXPECT_EQ(b.metadata()["short_blocks"].get<int>(), 0);
  EXPECT_DOUBLE_EQ(b.metadata()["sqg_time"].get<double>(), 5e-9);
}

TEST(BangTransform, FusesGapGates) {
  const auto res = uniform_resource(Connectivity::star(2));
  Circuit s(2, Paradigm::sDAQC, res);
  s.x(0).h(0).s(0).analog(50e-9).x(1).x(1).analog(50e-9);
  const auto b = bang_transform(s, 5e-9);
  std::size_t physical_before_first_block = 0;
  for (const auto& i : b.instructions()) {
    if (std::holds_alternative<AnalogBlock>(i.op)) break;
    if (is_physical(std::get<SingleQubitGate>(i.op))) ++physical_before_first_block;
  }
  EXPECT_EQ(physical_before_first_block, 1u);
  // X X on qubit 1 fuses to the identity and vanishes
  EXPECT_EQ(b.count_sqg(true), 2u);
}

TEST(BangTransform, ShortBlockPolicy) {
  const auto res = uniform_resource(Connectivity::star(2));
  Circuit s(2, Paradigm::sDAQC, res);
  s.analog(2.5e-9).x(1).analog(100e-9);
  EXPECT_THROW(bang_transform(s, 5e-9), CompileError);
  const auto b = bang_transform(s, 5e-9, ShortBlockPolicy::Allow);
  EXPECT_EQ(b.metadata()["short_blocks"].get<int>(), 1);
  EXPECT_NEAR(std::get<AnalogBlock>(b.instructions()[0].op).duration, -5e-9, 1e-18);

  Circuit neg(2, Paradigm::sDAQC, res);
  neg.analog(-20e-9).analog(100e-9);
  EXPECT_THROW(bang_transform(neg, 5e-9, ShortBlockPolicy::Allow), CompileError);
}

TEST(BangTransform, NeedsTwoBlocks) {
  const auto res = uniform_resource(Connectivity::star(2));
  Circuit s(2, Paradigm::sDAQC, res);
  s.x(0).analog(100e-9).x(0);
  EXPECT_THROW(bang_transform(s, 5e-9), CompileError);
  Circuit z(2, Paradigm::sDAQC, res);
  z.zz(0, 1, 0.2).analog(1e-7).analog(1e-7);
  EXPECT_THROW(bang_transform(z, 5e-9), CompileError);
}

TEST(FuseSingleQubit, ReconstructsRandomUnitaries) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> ang(-pi, pi);
  std::vector<Eigen::Matrix2cd> cases{oracle::pauli_x(), oracle::hadamard(), oracle::s_gate(),
                                      Eigen::Matrix2cd::Identity(), oracle::pauli_y()};
  for (int i = 0; i < 50; ++i)
    cases.push_back(oracle::rz(ang(rng)) * oracle::rxy(ang(rng), ang(rng)) * oracle::rz(ang(rng)));
  for (const auto& u : cases) {
    const auto r = fuse_single_qubit(u);
    const oracle::Mat v = oracle::rz(r.alpha) * oracle::rxy(r.theta, r.axis);
    EXPECT_LT(oracle::phase_distance(v, u), 1e-10);
    EXPECT_GE(r.theta, 0.0);
    EXPECT_LE(r.theta, pi + 1e-12);
  }
}

TEST(CancelOddBody, KeepsEvenTermsOnly) {
  const Connectivity c(3, {{0, 1}, {1, 2}}, {{0, 1, 2}});
  const IsingHamiltonian res(c, {1e7, 2e7, 3e7}, HamiltonianRole::Resource);
  const auto frag = cancel_odd_body(AnalogBlock{7e-8, {}}, res);
  const auto u = simulate_unitary(frag).matrix;
  EXPECT_LT(oracle::phase_distance(u, oracle::evolve(oracle::hamiltonian(res.even_part()), 7e-8)), 1e-10);
}

TEST(Peephole, CancelsAndMergesWithoutChangingTheUnitary) {
  const auto res = uniform_resource(Connectivity::all_to_all(3));
  Circuit c(3, Paradigm::sDAQC, res);
  c.x(0).x(0).h(1).h(1).analog(1e-8).rz(2, 0.4).analog(2e-8).x(1).analog(0.0).x(1);
  const auto p = peephole(c);
  EXPECT_EQ(p.count_sqg(), 0u);
  EXPECT_EQ(p.count_analog_blocks(), 1u);
  EXPECT_LT(oracle::phase_distance(simulate_unitary(p).matrix, simulate_unitary(c).matrix), 1e-12);
}
