// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "tqec/core/types.hpp"

namespace tqec {

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

// Tensor product of per-subsystem factors; missing labels get identity.
inline Operator tensor(const HilbertSpace& space,
                       const std::map<std::string, CMatrix>& factors) {
  for (const auto& [label, m] : factors) {
    const int d = space.dims()[space.position(label)];
    if (m.rows() != d || m.cols() != d) {
      throw std::invalid_argument("tensor: factor '" + label +
                                  "' has wrong dimension");
    }
  }
  CMatrix out = CMatrix::Identity(1, 1);
  for (std::size_t i = 0; i < space.size(); ++i) {
    auto it = factors.find(space.labels()[i]);
    const int d = space.dims()[i];
    out = kron(out, it == factors.end() ? CMatrix::Identity(d, d) : it->second);
  }
  return Operator(space, out);
}

inline Operator embed(const HilbertSpace& space, const std::string& label,
                      const CMatrix& op) {
  return tensor(space, {{label, op}});
}

// Reduced state on `keep`, in the order those subsystems appear in the space.
inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   const std::vector<std::string>& keep) {
  const HilbertSpace& s = rho.space;
  std::vector<bool> kept(s.size(), false);
  for (const auto& l : keep) {
    auto p = s.position(l);
    if (kept[p]) throw std::invalid_argument("partial_trace: repeated label");
    kept[p] = true;
  }
  std::vector<std::string> kl;
  std::vector<int> kd;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (kept[i]) {
      kl.push_back(s.labels()[i]);
      kd.push_back(s.dims()[i]);
    }
  }
  if (kl.empty()) throw std::invalid_argument("partial_trace: nothing kept");
  HilbertSpace out_space(kl, kd);
  const Eigen::Index n = s.total_dim();
  std::vector<Eigen::Index> kidx(n), tidx(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto occ = s.occupation(i);
    Eigen::Index k = 0, t = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (kept[j]) k = k * s.dims()[j] + occ[j];
      else t = t * s.dims()[j] + occ[j];
    }
    kidx[i] = k;
    tidx[i] = t;
  }
  CMatrix r = CMatrix::Zero(out_space.total_dim(), out_space.total_dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (tidx[i] == tidx[j]) r(kidx[i], kidx[j]) += rho.matrix(i, j);
    }
  }
  return DensityMatrix(out_space, r);
}

// exp(-i 2 pi H t) for H in GHz and t in ns.
inline CMatrix propagator(const CMatrix& h, double t_ns) {
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + h.norm())) {
    throw std::invalid_argument("propagator: Hamiltonian is not hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CVector ph = (es.eigenvalues().cast<cplx>() * cplx(0.0, -kTwoPi * t_ns))
                   .array()
                   .exp()
                   .matrix();
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

inline Operator propagator(const Operator& h, double t_ns) {
  return Operator(h.space, propagator(h.matrix, t_ns));
}

inline cplx expectation(const DensityMatrix& rho, const Operator& op) {
  require_same_space(rho.space, op.space, "expectation");
  return (rho.matrix * op.matrix).trace();
}

inline cplx expectation(const Ket& psi, const Operator& op) {
  require_same_space(psi.space, op.space, "expectation");
  return psi.amplitudes.dot(op.matrix * psi.amplitudes);
}

// Principal square root of a positive semidefinite hermitian matrix.
inline CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  RVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() *
         es.eigenvectors().adjoint();
}

// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2.
inline double state_fidelity(const CMatrix& a, const CMatrix& b) {
  CMatrix sa = psd_sqrt(a);
  CMatrix inner = sa * b * sa;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (inner + inner.adjoint()),
                                            Eigen::EigenvaluesOnly);
  double s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return s * s;
}

inline double state_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_space(a.space, b.space, "state_fidelity");
  return state_fidelity(a.matrix, b.matrix);
}

inline double state_fidelity(const Ket& psi, const DensityMatrix& rho) {
  require_same_space(psi.space, rho.space, "state_fidelity");
  return std::real(psi.amplitudes.dot(rho.matrix * psi.amplitudes));
}

namespace pauli {
inline CMatrix I() { return CMatrix::Identity(2, 2); }
inline CMatrix X() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline CMatrix Y() {
  CMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
inline CMatrix Z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
inline CMatrix from_char(char c) {
  switch (c) {
    case 'I': return I();
    case 'X': return X();
    case 'Y': return Y();
    case 'Z': return Z();
    default: throw std::invalid_argument(std::string("unknown Pauli '") + c + "'");
  }
}
// "XIZ" -> X (x) I (x) Z, leftmost factor most significant.
inline CMatrix from_label(const std::string& label) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (char c : label) out = kron(out, from_char(c));
  return out;
}
}  // namespace pauli

enum class Axis { X, Y, Z };

inline char axis_char(Axis a) { return a == Axis::X ? 'x' : a == Axis::Y ? 'y' : 'z'; }

inline Axis parse_axis(const std::string& s) {
  if (s == "x" || s == "X") return Axis::X;
  if (s == "y" || s == "Y") return Axis::Y;
  if (s == "z" || s == "Z") return Axis::Z;
  throw std::invalid_argument("unknown rotation axis '" + s + "'");
}

// Single-qubit rotation about an equatorial or z axis:
// exp(-i angle/2 (cos(phi) X + sin(phi) Y)) or exp(-i angle/2 Z).
inline CMatrix rotation_xy(double phi, double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  CMatrix m(2, 2);
  m << c, cplx(0, -s) * std::exp(cplx(0, -phi)), cplx(0, -s) * std::exp(cplx(0, phi)), c;
  return m;
}
inline CMatrix rotation_z(double angle) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = std::exp(cplx(0, -angle / 2));
  m(1, 1) = std::exp(cplx(0, angle / 2));
  return m;
}

inline CMatrix rotation_2x2(Axis axis, double angle) {
  switch (axis) {
    case Axis::X: return rotation_xy(0.0, angle);
    case Axis::Y: return rotation_xy(kPi / 2, angle);
    case Axis::Z: return rotation_z(angle);
  }
  return CMatrix::Identity(2, 2);
}

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, kTwoPi);
  if (a <= 0) a += kTwoPi;
  return a - kPi;
}

}  // namespace tqec
