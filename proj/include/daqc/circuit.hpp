#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "daqc/hamiltonian.hpp"

namespace daqc {

enum class Paradigm { DQC, sDAQC, bDAQC };

std::string to_string(Paradigm p);
Paradigm paradigm_from_string(const std::string& s);

enum class GateKind { Rxy, Rz, X, H, S, Sdg };

std::string to_string(GateKind g);

/// Single-qubit gate.  Rxy(theta, axis) = exp(-i theta/2 (cos(axis) X + sin(axis) Y)),
/// Rz(theta) = exp(-i theta/2 Z).  theta/axis are ignored for the named gates.
struct SingleQubitGate {
  GateKind kind;
  int qubit;
  double theta = 0.0;
  double axis = 0.0;
};

/// ZZ(phase) = exp(-i phase Z_a Z_b).  The phase is stored in (-2pi, 2pi].
struct ZZGate {
  int q0;
  int q1;
  double phase;
};

/// Evolution exp(-i duration * H_res) under the circuit's resource Hamiltonian.
/// coupling_scale (empty = nominal) multiplies each resource coefficient; it is
/// only filled in by noise perturbation.
struct AnalogBlock {
  double duration;
  std::vector<double> coupling_scale;
};

using Operation = std::variant<SingleQubitGate, ZZGate, AnalogBlock>;

struct Instruction {
  Operation op;
  /// Seconds from circuit start; negative until scheduled.
  double start = -1.0;
};

class Circuit {
 public:
  Circuit(int num_qubits, Paradigm paradigm,
          std::optional<IsingHamiltonian> resource = std::nullopt);

  int num_qubits() const { return num_qubits_; }
  Paradigm paradigm() const { return paradigm_; }
  const std::vector<Instruction>& instructions() const { return instructions_; }
  std::size_t size() const { return instructions_.size(); }
  bool empty() const { return instructions_.empty(); }
  const std::optional<IsingHamiltonian>& resource() const { return resource_; }
  const nlohmann::json& metadata() const { return metadata_; }
  nlohmann::json& metadata() { return metadata_; }

  Circuit& append(Operation op, double start = -1.0);
  /// Appends all instructions of `other` (same N; resources must agree).
  Circuit& append(const Circuit& other);

  Circuit& rxy(int q, double theta, double axis) { return append(SingleQubitGate{GateKind::Rxy, q, theta, axis}); }
  Circuit& rz(int q, double theta) { return append(SingleQubitGate{GateKind::Rz, q, theta, 0.0}); }
  Circuit& x(int q) { return append(SingleQubitGate{GateKind::X, q}); }
  Circuit& h(int q) { return append(SingleQubitGate{GateKind::H, q}); }
  Circuit& s(int q) { return append(SingleQubitGate{GateKind::S, q}); }
  Circuit& sdg(int q) { return append(SingleQubitGate{GateKind::Sdg, q}); }
  Circuit& zz(int a, int b, double phase) { return append(ZZGate{a, b, phase}); }
  Circuit& analog(double duration) { return append(AnalogBlock{duration, {}}); }

  /// Copy with a different instruction list (same N, paradigm, resource, metadata).
  Circuit with_instructions(std::vector<Instruction> instructions) const;
  Circuit with_paradigm(Paradigm p) const;

  std::size_t count_analog_blocks() const;
  std::size_t count_tqg() const;
  /// Physical single-qubit gates (Rz and the Rz-only gates S/S† excluded when
  /// `include_virtual` is false).
  std::size_t count_sqg(bool include_virtual = false) const;
  /// Sum of |t| over analog blocks.
  double total_analog_time() const;
  bool has_negative_durations() const;

 private:
  void validate(const Operation& op) const;

  int num_qubits_;
  Paradigm paradigm_;
  std::optional<IsingHamiltonian> resource_;
  std::vector<Instruction> instructions_;
  nlohmann::json metadata_ = nlohmann::json::object();
};

/// Normalizes a ZZ phase into (-2pi, 2pi].
double normalize_zz_phase(double phase);

// -- Lowering -------------------------------------------------------------
//
// Named gates are lowered to the native set {Rxy, Rz} (equalities hold up to
// a global phase), listed in time order:
//   X   -> Rxy(pi, 0)
//   H   -> Rz(pi), Rxy(pi/2, pi/2)       (H = Ry(pi/2) Z)
//   S   -> Rz(pi/2)
//   S†  -> Rz(-pi/2)
std::vector<SingleQubitGate> lower(const SingleQubitGate& g);

/// True for gates that take physical time (everything but Rz, S, S†).
bool is_physical(const SingleQubitGate& g);

/// Exact 2x2 matrix of the gate (named gates use their textbook matrices).
Eigen::Matrix2cd gate_matrix(const SingleQubitGate& g);

// -- Scheduling -----------------------------------------------------------

struct DurationModel {
  double sqg_time = 5e-9;
  double tqg_time = 50e-9;
  bool rz_virtual = true;
};

struct ScheduledCircuit {
  Circuit circuit;
  double total_duration = 0.0;
};

/// ASAP scheduling.  DQC/sDAQC: gates on disjoint qubits run concurrently and
/// analog blocks occupy every qubit for |t|.  bDAQC: every gap between blocks
/// (including the leading and trailing one) lasts max(1, longest per-qubit
/// chain of physical SQGs) * sqg_time and runs on top of the always-on
/// evolution; a block with a negative corrected time adds no wall-clock time.
ScheduledCircuit schedule(const Circuit& circuit, const DurationModel& durations = {});

// -- Serialization / display ------------------------------------------------

nlohmann::json to_json(const Circuit& c);
Circuit circuit_from_json(const nlohmann::json& j);

/// One line per instruction, with start times when scheduled.
std::string to_text(const Circuit& c);
/// ASCII wire diagram, one column per instruction.
std::string draw(const Circuit& c);

}  // namespace daqc
