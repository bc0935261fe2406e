#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "daqc/circuit.hpp"
#include "daqc/hamiltonian.hpp"

namespace daqc {

enum class SignMatrixKind { GeneralXX, StarOptimized, JointMBody };

/// Sign matrix M with M t = G t_f.  Rows are couplings (flat index order of
/// the connectivity), columns are analog blocks; column a is realized by
/// sandwiching block a between X gates on `flips[a]`.
struct SignMatrix {
  Eigen::MatrixXd entries;
  std::vector<Tuple> couplings;
  std::vector<std::vector<int>> flips;
  SignMatrixKind kind;

  std::size_t size() const { return couplings.size(); }
};

/// (-1)^{|coupling ∩ flipped|}: sign picked up by Z-string `coupling` when
/// the qubits in `flipped` are conjugated by X.
int flip_sign(const Tuple& coupling, const std::vector<int>& flipped);

/// Pair connectivity; block a flips the two qubits of pair a.
SignMatrix build_sign_matrix_general(const Connectivity& connectivity);
/// Star on N >= 2 qubits (centre 0).  Block a flips the external qubits of
/// connections a+1..N-2 (0-based), i.e. +1 on and above the diagonal.
SignMatrix build_sign_matrix_star(int num_qubits);
/// Pairs and higher tuples; block a flips every qubit of tuple a.
SignMatrix build_joint_matrix_mbody(const Connectivity& connectivity);
/// General matrix for pair connectivities, joint matrix otherwise.
SignMatrix sign_matrix_for(const Connectivity& connectivity);

struct SolveDiagnostics {
  bool singular_M = false;
  bool negative_times = false;
  bool dropped_zero_blocks = false;
  std::vector<std::size_t> dropped;
  double min_singular_value = 0.0;
};

struct ScheduleSolve {
  Eigen::VectorXd G;
  /// Empty when singular_M is set.
  Eigen::VectorXd t;
  double t_f = 0.0;
  SolveDiagnostics diagnostics;
};

/// Relative tolerance below which a block time counts as zero.
inline constexpr double kZeroBlockTolerance = 1e-12;

/// Factorizes M once for repeated solves.
class TimeSolver {
 public:
  explicit TimeSolver(SignMatrix m);

  const SignMatrix& matrix() const { return m_; }
  bool singular() const { return singular_; }
  double min_singular_value() const { return min_sv_; }
  ScheduleSolve solve(const Eigen::VectorXd& G, double t_f) const;

 private:
  SignMatrix m_;
  double min_sv_ = 0.0;
  bool singular_ = false;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// t = M^{-1} G t_f with G_b = g_b / gbar_b.  M is declared singular when its
/// smallest singular value is below 1e-9 * c.
ScheduleSolve solve_times(const SignMatrix& m, const IsingHamiltonian& target,
                          const IsingHamiltonian& resource, double t_f);
ScheduleSolve solve_times(const SignMatrix& m, const Eigen::VectorXd& G, double t_f);

/// Closed form for the star matrix: t_a = (G_a - G_{a+1}) t_f / 2,
/// t_last = (G_0 + G_last) t_f / 2.  G must be sorted descending and >= 0.
ScheduleSolve solve_times_star(const Eigen::VectorXd& G, double t_f);

struct NormalizedG {
  /// Sorted descending, all >= 0.
  Eigen::VectorXd G;
  /// permutation[i] = coupling index (in connectivity order) of G[i].
  std::vector<std::size_t> permutation;
  /// Couplings whose phase was moved up by 2pi.
  std::vector<std::size_t> shifted;
};

/// Makes every G_b nonnegative by replacing the phase t_f g_b by t_f g_b + 2pi
/// when negative (same unitary), then sorts descending.
NormalizedG normalize_G(const IsingHamiltonian& target, const IsingHamiltonian& resource, double t_f);

enum class Protocol { General, Star };

std::string to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

/// How target phases are represented before the general solve.
enum class PhaseConvention {
  /// Use t_f g exactly as given.
  AsGiven,
  /// Map every phase (zeros included) to its representative in [-2pi, 0).
  Canonical,
};

/// What bang_transform does with a block shorter than its banging correction.
enum class ShortBlockPolicy {
  Reject,
  /// Keep it with a negative corrected duration (a backward evolution), like
  /// negative sDAQC times.  Negative solve times are rejected either way.
  Allow,
};

struct CompileOptions {
  double sqg_time = 5e-9;
  bool peephole = true;
  bool drop_zero_blocks = true;
  PhaseConvention phase_convention = PhaseConvention::Canonical;
  ShortBlockPolicy short_blocks = ShortBlockPolicy::Reject;
};

struct CompileResult {
  Circuit circuit;
  ScheduleSolve solve;
  /// X gates emitted before peephole cancellation.
  std::size_t x_gates_before_peephole = 0;
  std::vector<std::string> warnings;
};

/// Emits the X-sandwiched analog blocks realizing exp(-i t_f H_target) on the
/// device.  sDAQC circuits are returned as is (negative times flagged);
/// bDAQC runs bang_transform afterwards.  Throws CompileError on a singular
/// sign matrix, an incompatible protocol, or an infeasible bDAQC schedule.
/// `solver` may carry a factorized sign matrix reused across targets on the
/// same connectivity (general protocol only).
CompileResult compile_target(const IsingHamiltonian& target, const IsingHamiltonian& resource, double t_f,
                             Protocol protocol, Paradigm paradigm, const CompileOptions& options = {},
                             const TimeSolver* solver = nullptr);

/// Cancels back-to-back identical self-inverse gates (X, H) on a qubit, drops
/// zero-duration analog blocks and merges analog blocks separated only by
/// virtual Rz gates.
Circuit peephole(const Circuit& circuit);

/// Converts an sDAQC circuit into its bDAQC counterpart: all SQGs of a gap are
/// fused per qubit into one Rxy (plus virtual Rz), blocks get the banging
/// corrections t - 3/2 dt (first, last) and t - dt (central).  Throws
/// CompileError for fewer than two blocks, a negative block time, or (under
/// Reject) a negative corrected time.  metadata["short_blocks"] counts the
/// blocks kept under Allow.
Circuit bang_transform(const Circuit& circuit, double sqg_time,
                       ShortBlockPolicy policy = ShortBlockPolicy::Reject);

/// Fragment exp(-i t/2 H) X^N exp(-i t/2 H) X^N = exp(-i t H_even).
Circuit cancel_odd_body(const AnalogBlock& block, const IsingHamiltonian& resource);

/// U = e^{i gamma} Rz(alpha) Rxy(theta, axis) for any 2x2 unitary.
struct FusedRotation {
  double theta;
  double axis;
  double alpha;
};
FusedRotation fuse_single_qubit(const Eigen::Matrix2cd& u);

}  // namespace daqc
