#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "daqc/circuit.hpp"

namespace daqc {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct SimulationOptions {
  int max_qubits = 12;
  /// Overlap-layer length for bDAQC circuits.  A circuit produced by
  /// bang_transform carries its own value in metadata["sqg_time"], which wins.
  double sqg_time = 5e-9;
};

struct UnitaryResult {
  Matrix matrix;
  std::size_t dimension = 0;
};

struct StateResult {
  Vector amplitudes;
};

/// Time-ordered product of the circuit's instruction unitaries.  Perturbed
/// circuits (see noise.hpp) are simulated the same way: the realized draw is
/// already baked into gate angles, durations and coupling scales.
UnitaryResult simulate_unitary(const Circuit& circuit, const SimulationOptions& options = {});
StateResult simulate_state(const Circuit& circuit, const Vector& initial,
                           const SimulationOptions& options = {});

/// Ideal unitary of a circuit (same as simulate_unitary with default options).
Matrix unitary_of_ideal(const Circuit& circuit);

/// (n + |Tr(U_ref^dagger U)|^2) / (n (n + 1)).
double average_unitary_fidelity(const Matrix& u, const Matrix& u_ref);
/// |<psi|phi>|^2.
double state_fidelity(const Vector& psi, const Vector& phi);

/// max |U^dagger U - I|.
double unitarity_error(const Matrix& u);

Vector basis_state(int num_qubits, std::size_t index);
/// (|0...0> + |1...1>) / sqrt(2).
Vector ghz_state(int num_qubits);

// -- Building blocks, also used by analysis ------------------------------------

/// Applies a 2x2 unitary on qubit q to every column of `m` (qubit 0 = MSB).
void apply_single_qubit(Matrix& m, int num_qubits, int q, const Eigen::Matrix2cd& u);

/// Multiplies row i of `m` by exp(-i t diag[i]).
void apply_diagonal_evolution(Matrix& m, const std::vector<double>& diag, double t);

/// One bDAQC overlap layer: exp(-i dt (H_res + sum_a h_a)) applied to `m`,
/// where h_a is the single-qubit generator on qubit a (zero matrices are
/// skipped).  Exact: qubits carrying a generator are grouped into coupled
/// components and exponentiated per classical configuration of their
/// neighbours.
void apply_overlap_layer(Matrix& m, const IsingHamiltonian& resource,
                         const std::vector<double>* coupling_scale,
                         const std::vector<Eigen::Matrix2cd>& generators, double dt);

/// Generator h with exp(-i dt h) = Rxy(theta, axis): h = theta/(2 dt) (cos X + sin Y).
Eigen::Matrix2cd rxy_generator(double theta, double axis, double dt);

}  // namespace daqc
