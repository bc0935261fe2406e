#pragma once

// Independent dense references for the tests: everything here is built from
// Kronecker products and generic matrix exponentials, never from the
// simulator's in-place kernels.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "daqc/circuit.hpp"
#include "daqc/hamiltonian.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using cd = std::complex<double>;
using std::numbers::pi;

inline Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Mat pauli_y() {
  Mat m(2, 2);
  m << 0, cd(0, -1), cd(0, 1), 0;
  return m;
}
inline Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
inline Mat id2() { return Mat::Identity(2, 2); }

/// op on qubit q of n, qubit 0 leftmost (most significant).
inline Mat embed(const Mat& op, int q, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    Mat next = Eigen::kroneckerProduct(out, k == q ? op : id2()).eval();
    out = next;
  }
  return out;
}

inline Mat z_string(const std::vector<int>& qubits, int n) {
  Mat out = Mat::Identity(1 << n, 1 << n);
  for (int q : qubits) out = out * embed(pauli_z(), q, n);
  return out;
}

inline Mat hamiltonian(const daqc::IsingHamiltonian& h, const std::vector<double>* scale = nullptr) {
  const int n = h.num_qubits();
  Mat out = Mat::Zero(1 << n, 1 << n);
  const auto& tuples = h.connectivity().tuples();
  for (std::size_t b = 0; b < tuples.size(); ++b) {
    const double s = scale && !scale->empty() ? (*scale)[b] : 1.0;
    out += h.coefficients()[b] * s * z_string(tuples[b], n);
  }
  return out;
}

inline Mat evolve(const Mat& h, double t) { return (cd(0, -t) * h).exp(); }

inline Mat rz(double theta) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = std::exp(cd(0, -theta / 2));
  m(1, 1) = std::exp(cd(0, theta / 2));
  return m;
}
inline Mat rxy(double theta, double axis) {
  return (cd(0, -theta / 2) * (std::cos(axis) * pauli_x() + std::sin(axis) * pauli_y())).exp();
}
inline Mat hadamard() {
  Mat m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}
inline Mat s_gate() {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 1;
  m(1, 1) = cd(0, 1);
  return m;
}

inline Mat gate(const daqc::SingleQubitGate& g) {
  switch (g.kind) {
    case daqc::GateKind::Rxy: return rxy(g.theta, g.axis);
    case daqc::GateKind::Rz: return rz(g.theta);
    case daqc::GateKind::X: return pauli_x();
    case daqc::GateKind::H: return hadamard();
    case daqc::GateKind::S: return s_gate();
    case daqc::GateKind::Sdg: return s_gate().adjoint();
  }
  return id2();
}

/// Dense product of a DQC or sDAQC circuit.
inline Mat circuit_unitary(const daqc::Circuit& c) {
  const int n = c.num_qubits();
  Mat u = Mat::Identity(1 << n, 1 << n);
  for (const auto& ins : c.instructions()) {
    if (const auto* g = std::get_if<daqc::SingleQubitGate>(&ins.op)) {
      u = embed(gate(*g), g->qubit, n) * u;
    } else if (const auto* z = std::get_if<daqc::ZZGate>(&ins.op)) {
      u = evolve(z_string({z->q0, z->q1}, n), z->phase) * u;
    } else {
      const auto& a = std::get<daqc::AnalogBlock>(ins.op);
      u = evolve(hamiltonian(*c.resource(), &a.coupling_scale), a.duration) * u;
    }
  }
  return u;
}

/// (d + |Tr(V^dagger U)|^2) / (d (d + 1)).
inline double fidelity(const Mat& u, const Mat& v) {
  const double d = static_cast<double>(u.rows());
  return (d + std::norm((v.adjoint() * u).trace())) / (d * (d + 1));
}

/// Max-element distance after removing the relative global phase.
inline double phase_distance(const Mat& u, const Mat& v) {
  const cd tr = (v.adjoint() * u).trace();
  const cd ph = std::abs(tr) > 0 ? tr / std::abs(tr) : cd(1, 0);
  return (u - ph * v).cwiseAbs().maxCoeff();
}

/// QFT matrix with output bits reversed (no terminal swaps).
inline Mat qft_bit_reversed(int n) {
  const int d = 1 << n;
  Mat f(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) f(k, j) = std::exp(cd(0, 2 * pi * j * k / d)) / std::sqrt(double(d));
  Mat p = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    int r = 0;
    for (int b = 0; b < n; ++b)
      if (k & (1 << b)) r |= 1 << (n - 1 - b);
    p(r, k) = 1;
  }
  return p * f;
}

inline Mat swap_matrix(int q0, int q1, int n) {
  const int d = 1 << n;
  Mat p = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const int b0 = (k >> (n - 1 - q0)) & 1, b1 = (k >> (n - 1 - q1)) & 1;
    int r = k & ~(1 << (n - 1 - q0)) & ~(1 << (n - 1 - q1));
    r |= b1 << (n - 1 - q0);
    r |= b0 << (n - 1 - q1);
    p(r, k) = 1;
  }
  return p;
}

inline daqc::IsingHamiltonian random_target(const daqc::Connectivity& conn, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> g(conn.size());
  for (double& v : g) v = scale * u(rng);
  return daqc::IsingHamiltonian(conn, g, daqc::HamiltonianRole::Target);
}

}  // namespace oracle
