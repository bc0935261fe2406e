#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "daqc/circuit.hpp"
#include "daqc/compiler.hpp"
#include "daqc/hamiltonian.hpp"

namespace daqc {

/// Single-qubit gates applied between target evolutions.
struct GateLayer {
  std::vector<SingleQubitGate> gates;
};

/// Evolution exp(-i t_f H) under one target Hamiltonian.
struct TargetStep {
  IsingHamiltonian target;
  double t_f;
  std::string label;
};

using SequenceStep = std::variant<GateLayer, TargetStep>;

struct TargetSequence {
  int num_qubits;
  std::string algorithm;
  Connectivity connectivity;
  std::vector<SequenceStep> steps;
  std::size_t num_swaps = 0;
  /// logical_at[p] = logical qubit held by physical qubit p at the end.
  std::vector<int> logical_at;

  std::size_t count_targets() const;
  void append(const TargetSequence& other);
};

/// Evolution time attached to every generated target.  Block durations only
/// depend on the phases t_f g, so the value itself is arbitrary.
inline constexpr double kTargetTime = 1e-6;

/// QFT as N-1 targets (one per controlled-phase fan-out of qubit j) separated
/// by H and Rz layers.  Output is bit-reversed (no terminal swaps).
/// `connectivity` is "ata" or "star"; star routing keeps the active qubit on
/// the centre and swaps it with the next external after each target.
TargetSequence gen_qft_targets(int num_qubits, const std::string& connectivity);

/// The same QFT with every target expanded into ZZ gates.
Circuit gen_qft_dqc(int num_qubits, const std::string& connectivity);

/// SWAP(0, k) on a star device as three pi/4 ZZ targets dressed with H/S.
TargetSequence gen_swap_daqc(int num_qubits, int k);

/// GHZ preparation on a star device.  DQC: N-1 ZZ(-pi/4) gates.  sDAQC: one
/// analog block of duration pi/(4 gbar) obtained from the star protocol.
Circuit gen_ghz(int num_qubits, Paradigm paradigm, double gbar = 1e7);

/// Expands targets into ZZ gates (phase t_f g per nonzero pair coupling).
Circuit to_dqc(const TargetSequence& seq);

struct SequenceCompileResult {
  Circuit circuit;
  std::vector<std::string> warnings;
  bool negative_times = false;
  std::size_t x_gates_before_peephole = 0;
};

/// Compiles every target with the chosen protocol, concatenates with the SQG
/// layers, runs the peephole pass over the whole circuit and, for bDAQC,
/// bang_transform at the end.
SequenceCompileResult compile_sequence(const TargetSequence& seq, const IsingHamiltonian& resource,
                                       Protocol protocol, Paradigm paradigm, const CompileOptions& options = {});

/// Algorithm names accepted by generators and the CLI.
enum class Algorithm { AtaQft, StarQft, StarGhz };
Algorithm algorithm_from_string(const std::string& s);
std::string to_string(Algorithm a);

/// Default device for an algorithm: homogeneous resource on the algorithm's
/// connectivity.
IsingHamiltonian default_resource(Algorithm a, int num_qubits, double gbar);

/// Protocol used to compile an algorithm (star protocol on star devices).
Protocol default_protocol(Algorithm a);

/// Circuit for (algorithm, paradigm, N) on the default device.
Circuit build_algorithm_circuit(Algorithm a, Paradigm p, int num_qubits, double gbar,
                                const CompileOptions& options = {});

}  // namespace daqc
