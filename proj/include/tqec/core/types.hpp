// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tqec {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Raised when a physical invariant (trace, hermiticity, positivity) breaks.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a calibration search fails to bracket or converge.
struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ordered tensor-product space. The first factor is the most significant
// digit of the flat index.
class HilbertSpace {
 public:
  HilbertSpace() = default;
  HilbertSpace(std::vector<std::string> labels, std::vector<int> dims)
      : labels_(std::move(labels)), dims_(std::move(dims)) {
    if (labels_.size() != dims_.size() || dims_.empty()) {
      throw std::invalid_argument("HilbertSpace: labels and dims mismatch");
    }
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (dims_[i] < 1) {
        throw std::invalid_argument("HilbertSpace: dimension of '" +
                                    labels_[i] + "' must be positive");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (labels_[i] == labels_[j]) {
          throw std::invalid_argument("HilbertSpace: duplicate label '" +
                                      labels_[i] + "'");
        }
      }
    }
  }

  // n qubits labelled Q1..Qn.
  static HilbertSpace qubits(int n) {
    std::vector<std::string> l;
    for (int i = 1; i <= n; ++i) l.push_back("Q" + std::to_string(i));
    return HilbertSpace(l, std::vector<int>(n, 2));
  }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t size() const { return dims_.size(); }

  Eigen::Index total_dim() const {
    Eigen::Index d = 1;
    for (int x : dims_) d *= x;
    return d;
  }

  std::size_t position(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == label) return i;
    }
    throw std::invalid_argument("HilbertSpace: unknown subsystem '" + label +
                                "'");
  }

  Eigen::Index index(const std::vector<int>& occ) const {
    if (occ.size() != dims_.size()) {
      throw std::invalid_argument("HilbertSpace: occupation length mismatch");
    }
    Eigen::Index idx = 0;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (occ[i] < 0 || occ[i] >= dims_[i]) {
        throw std::out_of_range("HilbertSpace: level out of range");
      }
      idx = idx * dims_[i] + occ[i];
    }
    return idx;
  }

  std::vector<int> occupation(Eigen::Index idx) const {
    std::vector<int> occ(dims_.size());
    for (std::size_t i = dims_.size(); i-- > 0;) {
      occ[i] = static_cast<int>(idx % dims_[i]);
      idx /= dims_[i];
    }
    return occ;
  }

  bool operator==(const HilbertSpace& o) const {
    return labels_ == o.labels_ && dims_ == o.dims_;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<int> dims_;
};

inline void require_same_space(const HilbertSpace& a, const HilbertSpace& b,
                               const char* where) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(where) + ": space mismatch");
  }
}

struct Ket {
  HilbertSpace space;
  CVector amplitudes;

  Ket() = default;
  Ket(HilbertSpace s, CVector a) : space(std::move(s)), amplitudes(std::move(a)) {
    if (amplitudes.size() != space.total_dim()) {
      throw std::invalid_argument("Ket: amplitude length mismatch");
    }
  }

  static Ket basis(const HilbertSpace& s, const std::vector<int>& occ) {
    CVector v = CVector::Zero(s.total_dim());
    v(s.index(occ)) = 1.0;
    return Ket(s, v);
  }

  double norm() const { return amplitudes.norm(); }

  Ket normalized() const {
    double n = norm();
    if (n == 0.0) throw std::domain_error("Ket: cannot normalize zero vector");
    return Ket(space, amplitudes / n);
  }
};

struct DensityMatrix {
  HilbertSpace space;
  CMatrix matrix;

  DensityMatrix() = default;
  DensityMatrix(HilbertSpace s, CMatrix m)
      : space(std::move(s)), matrix(std::move(m)) {
    const auto d = space.total_dim();
    if (matrix.rows() != d || matrix.cols() != d) {
      throw std::invalid_argument("DensityMatrix: shape mismatch");
    }
  }

  static DensityMatrix from_ket(const Ket& k) {
    return DensityMatrix(k.space, k.amplitudes * k.amplitudes.adjoint());
  }

  cplx trace() const { return matrix.trace(); }

  // Throws NumericalError when the matrix is not a state within tol.
  void validate(double tol = 1e-8) const {
    if (std::abs(matrix.trace() - 1.0) > tol) {
      throw NumericalError("DensityMatrix: trace deviates from 1");
    }
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tol) {
      throw NumericalError("DensityMatrix: not hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(
        0.5 * (matrix + matrix.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) {
      throw NumericalError("DensityMatrix: negative eigenvalue");
    }
  }
};

struct Operator {
  HilbertSpace space;
  CMatrix matrix;

  Operator() = default;
  Operator(HilbertSpace s, CMatrix m) : space(std::move(s)), matrix(std::move(m)) {
    const auto d = space.total_dim();
    if (matrix.rows() != d || matrix.cols() != d) {
      throw std::invalid_argument("Operator: shape mismatch");
    }
  }

  bool is_hermitian(double tol = 1e-12) const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol;
  }
};

}  // namespace tqec
