#include "daqc/hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "daqc/error.hpp"

namespace daqc {

namespace {

bool tuple_less(const Tuple& a, const Tuple& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

void check_tuple(const Tuple& t, int num_qubits) {
  if (t.size() < 2) throw std::invalid_argument("coupling tuple needs at least two qubits");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 0 || t[i] >= num_qubits)
      throw std::invalid_argument("qubit index " + std::to_string(t[i]) + " out of range");
    if (i > 0 && t[i] <= t[i - 1])
      throw std::invalid_argument("coupling tuple must be strictly increasing");
  }
}

}  // namespace

Connectivity::Connectivity(int num_qubits, std::vector<std::pair<int, int>> pairs,
                           std::vector<Tuple> higher_tuples)
    : num_qubits_(num_qubits), pairs_(std::move(pairs)), higher_(std::move(higher_tuples)) {
  if (num_qubits_ < 2) throw std::invalid_argument("connectivity needs N >= 2");
  if (num_qubits_ > 62) throw std::invalid_argument("connectivity limited to 62 qubits");
  if (pairs_.empty()) throw std::invalid_argument("connectivity needs at least one pair");
  std::sort(pairs_.begin(), pairs_.end());
  for (const auto& [j, k] : pairs_) check_tuple({j, k}, num_qubits_);
  if (std::adjacent_find(pairs_.begin(), pairs_.end()) != pairs_.end())
    throw std::invalid_argument("duplicate pair in connectivity");
  for (const auto& t : higher_) {
    if (t.size() < 3) throw std::invalid_argument("higher-order tuple needs at least three qubits");
    check_tuple(t, num_qubits_);
  }
  std::sort(higher_.begin(), higher_.end(), tuple_less);
  if (std::adjacent_find(higher_.begin(), higher_.end()) != higher_.end())
    throw std::invalid_argument("duplicate tuple in connectivity");
  tuples_.reserve(pairs_.size() + higher_.size());
  for (const auto& [j, k] : pairs_) tuples_.push_back({j, k});
  tuples_.insert(tuples_.end(), higher_.begin(), higher_.end());
}

Connectivity Connectivity::all_to_all(int num_qubits) {
  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < num_qubits; ++j)
    for (int k = j + 1; k < num_qubits; ++k) pairs.emplace_back(j, k);
  return Connectivity(num_qubits, std::move(pairs));
}

Connectivity Connectivity::star(int num_qubits) {
  std::vector<std::pair<int, int>> pairs;
  for (int k = 1; k < num_qubits; ++k) pairs.emplace_back(0, k);
  return Connectivity(num_qubits, std::move(pairs));
}

Connectivity Connectivity::chain(int num_qubits) {
  std::vector<std::pair<int, int>> pairs;
  for (int k = 1; k < num_qubits; ++k) pairs.emplace_back(k - 1, k);
  return Connectivity(num_qubits, std::move(pairs));
}

Connectivity Connectivity::from_name(const std::string& name, int num_qubits) {
  if (name == "ata" || name == "all-to-all") return all_to_all(num_qubits);
  if (name == "star") return star(num_qubits);
  if (name == "chain") return chain(num_qubits);
  throw ConfigError("unknown connectivity '" + name + "' (expected ata, star or chain)");
}

bool Connectivity::contains(const Tuple& t) const {
  return std::binary_search(tuples_.begin(), tuples_.end(), t, tuple_less);
}

int Connectivity::degree(int q) const {
  return static_cast<int>(std::count_if(pairs_.begin(), pairs_.end(), [q](const auto& p) {
    return p.first == q || p.second == q;
  }));
}

bool Connectivity::is_star() const {
  if (has_higher_order() || static_cast<int>(pairs_.size()) != num_qubits_ - 1) return false;
  for (std::size_t i = 0; i < pairs_.size(); ++i)
    if (pairs_[i].first != 0 || pairs_[i].second != static_cast<int>(i) + 1) return false;
  return true;
}

bool Connectivity::is_tree() const {
  if (has_higher_order() || static_cast<int>(pairs_.size()) != num_qubits_ - 1) return false;
  std::vector<int> root(num_qubits_);
  std::iota(root.begin(), root.end(), 0);
  const auto find = [&](int q) {
    while (root[q] != q) q = root[q] = root[root[q]];
    return q;
  };
  for (const auto& [a, b] : pairs_) {
    const int ra = find(a), rb = find(b);
    if (ra == rb) return false;
    root[ra] = rb;
  }
  return true;
}

bool Connectivity::is_all_to_all() const {
  return !has_higher_order() &&
         pairs_.size() == static_cast<std::size_t>(num_qubits_ * (num_qubits_ - 1) / 2);
}

TupleIndexMap::TupleIndexMap(const Connectivity& connectivity)
    : backward_(connectivity.tuples()) {
  for (std::size_t i = 0; i < backward_.size(); ++i) forward_.emplace(backward_[i], i);
}

std::size_t TupleIndexMap::index(const Tuple& t) const {
  auto it = forward_.find(t);
  if (it == forward_.end()) throw std::out_of_range("tuple not in connectivity");
  return it->second;
}

const Tuple& TupleIndexMap::tuple(std::size_t index) const {
  if (index >= backward_.size()) throw std::out_of_range("flat index out of range");
  return backward_[index];
}

TupleIndexMap build_index_map(const Connectivity& connectivity) {
  return TupleIndexMap(connectivity);
}

// The closed form is written for 1-based qubits and indices,
//   alpha = N(m-1) - m(m+1)/2 + n,
// and converted here: m1 = m+1, n1 = n+1, alpha0 = alpha1 - 1.
std::size_t vectorize_ata(int m, int n, int num_qubits) {
  if (num_qubits < 2) throw std::invalid_argument("N must be >= 2");
  if (m < 0 || n >= num_qubits) throw std::out_of_range("pair index out of range");
  if (m >= n) throw std::invalid_argument("pair must satisfy m < n");
  const long long N = num_qubits, m1 = m + 1, n1 = n + 1;
  return static_cast<std::size_t>(N * (m1 - 1) - m1 * (m1 + 1) / 2 + n1 - 1);
}

// 1-based: the first index is 1 + sum_{k=1}^{N-2} H[alpha - d_k] where
// d_k = kN - k(k+1)/2 + 1 is the first flat index past row k (H(0) = 1).
// The second index follows by inverting the forward formula.
std::pair<int, int> devectorize_ata(std::size_t alpha, int num_qubits) {
  if (num_qubits < 2) throw std::invalid_argument("N must be >= 2");
  const long long N = num_qubits;
  const long long total = N * (N - 1) / 2;
  if (alpha >= static_cast<std::size_t>(total)) throw std::out_of_range("flat index out of range");
  const long long a1 = static_cast<long long>(alpha) + 1;
  long long first = 1;
  for (long long k = 1; k <= N - 2; ++k) {
    const long long d = k * N - k * (k + 1) / 2 + 1;
    if (a1 >= d) ++first;
  }
  const long long second = a1 - N * (first - 1) + first * (first + 1) / 2;
  return {static_cast<int>(first - 1), static_cast<int>(second - 1)};
}

IsingHamiltonian::IsingHamiltonian(Connectivity connectivity, std::vector<double> coefficients,
                                   HamiltonianRole role)
    : connectivity_(std::move(connectivity)), coefficients_(std::move(coefficients)), role_(role) {
  if (coefficients_.size() != connectivity_.size())
    throw std::invalid_argument("expected " + std::to_string(connectivity_.size()) +
                                " coefficients, got " + std::to_string(coefficients_.size()));
  for (double c : coefficients_)
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite Hamiltonian coefficient");
}

IsingHamiltonian IsingHamiltonian::homogeneous(Connectivity connectivity, double value,
                                               HamiltonianRole role) {
  std::vector<double> coeffs(connectivity.size(), value);
  return IsingHamiltonian(std::move(connectivity), std::move(coeffs), role);
}

double IsingHamiltonian::coefficient(const Tuple& t) const {
  return coefficients_[TupleIndexMap(connectivity_).index(t)];
}

std::uint64_t tuple_mask(const Tuple& t, int num_qubits) {
  std::uint64_t mask = 0;
  for (int q : t) mask |= std::uint64_t{1} << (num_qubits - 1 - q);
  return mask;
}

std::vector<double> IsingHamiltonian::diagonal(const std::vector<double>* scales) const {
  const int n = num_qubits();
  if (n > 30) throw NumericalError("diagonal requested for too many qubits");
  if (scales && scales->size() != coefficients_.size())
    throw std::invalid_argument("coupling scale vector has wrong length");
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> diag(dim, 0.0);
  const auto& tuples = connectivity_.tuples();
  for (std::size_t b = 0; b < tuples.size(); ++b) {
    const double c = coefficients_[b] * (scales ? (*scales)[b] : 1.0);
    if (c == 0.0) continue;
    const std::uint64_t mask = tuple_mask(tuples[b], n);
    for (std::size_t i = 0; i < dim; ++i)
      diag[i] += (std::popcount(i & mask) & 1) ? -c : c;
  }
  return diag;
}

IsingHamiltonian IsingHamiltonian::even_part() const {
  std::vector<double> coeffs = coefficients_;
  const auto& tuples = connectivity_.tuples();
  for (std::size_t b = 0; b < tuples.size(); ++b)
    if (tuples[b].size() % 2 == 1) coeffs[b] = 0.0;
  return IsingHamiltonian(connectivity_, std::move(coeffs), role_);
}

namespace {

constexpr double kRadPerMHz = 1e6;

Tuple tuple_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("coupling tuple must be a JSON array");
  Tuple t;
  for (const auto& v : j) t.push_back(v.get<int>());
  return t;
}

}  // namespace

Connectivity connectivity_from_json(const nlohmann::json& j) {
  try {
    if (!j.contains("num_qubits")) throw ConfigError("connectivity JSON needs \"num_qubits\"");
    const int n = j.at("num_qubits").get<int>();
    if (j.contains("generator") && !j.contains("pairs"))
      return Connectivity::from_name(j.at("generator").get<std::string>(), n);
    if (!j.contains("pairs")) throw ConfigError("connectivity JSON needs \"pairs\" or \"generator\"");
    std::vector<std::pair<int, int>> pairs;
    for (const auto& p : j.at("pairs")) {
      Tuple t = tuple_from_json(p);
      if (t.size() != 2) throw ConfigError("each entry of \"pairs\" must have two qubits");
      pairs.emplace_back(t[0], t[1]);
    }
    std::vector<Tuple> higher;
    if (j.contains("higher_tuples"))
      for (const auto& t : j.at("higher_tuples")) higher.push_back(tuple_from_json(t));
    return Connectivity(n, std::move(pairs), std::move(higher));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid connectivity: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid connectivity JSON: ") + e.what());
  }
}

nlohmann::json to_json(const Connectivity& c) {
  nlohmann::json j;
  j["num_qubits"] = c.num_qubits();
  j["pairs"] = nlohmann::json::array();
  for (const auto& [a, b] : c.pairs()) j["pairs"].push_back({a, b});
  if (c.has_higher_order()) j["higher_tuples"] = c.higher_tuples();
  return j;
}

IsingHamiltonian hamiltonian_from_json(const nlohmann::json& j, HamiltonianRole default_role) {
  Connectivity conn = connectivity_from_json(j);
  try {
    HamiltonianRole role = default_role;
    if (j.contains("role")) {
      const auto r = j.at("role").get<std::string>();
      if (r == "resource") role = HamiltonianRole::Resource;
      else if (r == "target") role = HamiltonianRole::Target;
      else throw ConfigError("role must be \"resource\" or \"target\"");
    }
    std::vector<double> coeffs;
    double scale = 1.0;
    if (j.contains("coefficients_mhz") || j.contains("coefficient_mhz")) scale = kRadPerMHz;
    if (j.contains("coefficients")) {
      coeffs = j.at("coefficients").get<std::vector<double>>();
    } else if (j.contains("coefficients_mhz")) {
      coeffs = j.at("coefficients_mhz").get<std::vector<double>>();
    } else if (j.contains("coefficient") || j.contains("coefficient_mhz")) {
      const double v = j.contains("coefficient") ? j.at("coefficient").get<double>()
                                                 : j.at("coefficient_mhz").get<double>();
      coeffs.assign(conn.size(), v);
    } else {
      throw ConfigError("Hamiltonian JSON needs \"coefficients\" or \"coefficient\"");
    }
    for (double& c : coeffs) c *= scale;
    return IsingHamiltonian(std::move(conn), std::move(coeffs), role);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid Hamiltonian: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid Hamiltonian JSON: ") + e.what());
  }
}

nlohmann::json to_json(const IsingHamiltonian& h) {
  nlohmann::json j = to_json(h.connectivity());
  j["coefficients"] = h.coefficients();
  j["role"] = h.role() == HamiltonianRole::Resource ? "resource" : "target";
  return j;
}

}  // namespace daqc
