#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace daqc {

/// A coupled set of qubits, strictly increasing (size 2 for pair couplings,
/// size b >= 3 for b-body terms).
using Tuple = std::vector<int>;

/// Device connectivity: the set of coupled pairs plus optional higher-order
/// tuples.  Tuples are kept sorted by (size, lexicographic), which is also the
/// flat index order used everywhere else.
class Connectivity {
 public:
  Connectivity(int num_qubits, std::vector<std::pair<int, int>> pairs,
               std::vector<Tuple> higher_tuples = {});

  static Connectivity all_to_all(int num_qubits);
  /// Qubit 0 is the centre.
  static Connectivity star(int num_qubits);
  static Connectivity chain(int num_qubits);
  /// "ata", "star" or "chain".
  static Connectivity from_name(const std::string& name, int num_qubits);

  int num_qubits() const { return num_qubits_; }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  const std::vector<Tuple>& higher_tuples() const { return higher_; }
  /// All tuples in flat index order: pairs first, then higher tuples.
  const std::vector<Tuple>& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }
  bool has_higher_order() const { return !higher_.empty(); }

  bool contains(const Tuple& t) const;
  /// Number of pair couplings touching qubit q.
  int degree(int q) const;
  bool is_star() const;
  /// Pair-only, connected and acyclic (stars and chains included).
  bool is_tree() const;
  bool is_all_to_all() const;

  bool operator==(const Connectivity& other) const {
    return num_qubits_ == other.num_qubits_ && tuples_ == other.tuples_;
  }

 private:
  int num_qubits_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<Tuple> higher_;
  std::vector<Tuple> tuples_;
};

/// Bijection between connectivity tuples and flat 0-based indices.
class TupleIndexMap {
 public:
  explicit TupleIndexMap(const Connectivity& connectivity);

  std::size_t index(const Tuple& t) const;
  const Tuple& tuple(std::size_t index) const;
  std::size_t size() const { return backward_.size(); }
  bool contains(const Tuple& t) const { return forward_.count(t) != 0; }

 private:
  std::map<Tuple, std::size_t> forward_;
  std::vector<Tuple> backward_;
};

TupleIndexMap build_index_map(const Connectivity& connectivity);

/// Flat index of pair (m, n), m < n, in an all-to-all device of N qubits.
/// 0-based on both sides: (0,1) -> 0, (0,2) -> 1, ..., (N-2,N-1) -> N(N-1)/2-1.
std::size_t vectorize_ata(int m, int n, int num_qubits);

/// Inverse of vectorize_ata via the Heaviside sum over row boundaries.
std::pair<int, int> devectorize_ata(std::size_t alpha, int num_qubits);

enum class HamiltonianRole { Resource, Target };

/// ZZ-Ising Hamiltonian  H = sum_T c_T prod_{q in T} Z_q  with one coefficient
/// (rad/s) per connectivity tuple.
class IsingHamiltonian {
 public:
  IsingHamiltonian(Connectivity connectivity, std::vector<double> coefficients,
                   HamiltonianRole role);

  static IsingHamiltonian homogeneous(Connectivity connectivity, double value,
                                      HamiltonianRole role);

  const Connectivity& connectivity() const { return connectivity_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double coefficient(const Tuple& t) const;
  double coefficient(std::size_t index) const { return coefficients_.at(index); }
  HamiltonianRole role() const { return role_; }
  int num_qubits() const { return connectivity_.num_qubits(); }

  /// Diagonal of H in the computational basis (length 2^N, qubit 0 = MSB).
  /// Optional per-tuple multiplicative scales (used for perturbed couplings).
  std::vector<double> diagonal(const std::vector<double>* scales = nullptr) const;

  /// Same Hamiltonian keeping only even-body terms.
  IsingHamiltonian even_part() const;

  bool operator==(const IsingHamiltonian& other) const {
    return role_ == other.role_ && connectivity_ == other.connectivity_ &&
           coefficients_ == other.coefficients_;
  }

 private:
  Connectivity connectivity_;
  std::vector<double> coefficients_;
  HamiltonianRole role_;
};

/// Bit mask of a tuple in the big-endian basis convention (qubit q <-> bit N-1-q).
std::uint64_t tuple_mask(const Tuple& t, int num_qubits);

// JSON: {"num_qubits": N, "pairs": [[j,k],...], "higher_tuples": [[a,b,c],...],
//        "coefficients": [...], "role": "resource"|"target"}
// A "generator" key ("ata"/"star"/"chain") may replace "pairs"; a scalar
// "coefficient" may replace the list.  "coefficients_mhz"/"coefficient_mhz"
// are accepted and converted to rad/s by 1 MHz = 1e6 rad/s.
Connectivity connectivity_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Connectivity& c);
IsingHamiltonian hamiltonian_from_json(const nlohmann::json& j, HamiltonianRole default_role);
nlohmann::json to_json(const IsingHamiltonian& h);

}  // namespace daqc
