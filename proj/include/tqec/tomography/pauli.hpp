// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tqec/core/linalg.hpp"
#include "tqec/io/format.hpp"

namespace tqec::tomography {

// Three-qubit Pauli operators in the order used for Pauli sets and chi
// matrices: identity, single-qubit terms, then two- and three-qubit
// correlators with the leftmost non-identity factor cycling fastest.
inline const std::vector<std::string>& pauli_labels_3q() {
  static const std::vector<std::string> k{
      "III", "IIX", "IIY", "IIZ", "IXI", "IYI", "IZI", "XII", "YII", "ZII",
      "IXX", "IYX", "IZX", "IXY", "IYY", "IZY", "IXZ", "IYZ", "IZZ",
      "XIX", "YIX", "ZIX", "XIY", "YIY", "ZIY", "XIZ", "YIZ", "ZIZ",
      "XXI", "YXI", "ZXI", "XYI", "YYI", "ZYI", "XZI", "YZI", "ZZI",
      "XXX", "YXX", "ZXX", "XYX", "YYX", "ZYX", "XZX", "YZX", "ZZX",
      "XXY", "YXY", "ZXY", "XYY", "YYY", "ZYY", "XZY", "YZY", "ZZY",
      "XXZ", "YXZ", "ZXZ", "XYZ", "YYZ", "ZYZ", "XZZ", "YZZ", "ZZZ"};
  return k;
}

class PauliBasis {
 public:
  explicit PauliBasis(int n_qubits) : n_(n_qubits) {
    if (n_qubits == 1) labels_ = {"I", "X", "Y", "Z"};
    else if (n_qubits == 3) labels_ = pauli_labels_3q();
    else if (n_qubits == 2) {
      for (char a : std::string("IXYZ"))
        for (char b : std::string("IXYZ")) labels_.push_back(std::string{a, b});
    } else {
      throw std::invalid_argument("PauliBasis: 1, 2 or 3 qubits");
    }
    for (const auto& l : labels_) ops_.push_back(pauli::from_label(l));
  }

  int n_qubits() const { return n_; }
  int dim() const { return 1 << n_; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const CMatrix& op(std::size_t m) const { return ops_.at(m); }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return i;
    throw std::invalid_argument("PauliBasis: unknown label '" + label + "'");
  }

 private:
  int n_;
  std::vector<std::string> labels_;
  std::vector<CMatrix> ops_;
};

// Expectation values Tr(rho P_m) in basis order.
struct PauliSet {
  std::vector<std::string> labels;
  std::vector<double> values;

  void write_csv(std::ostream& os) const {
    io::csv_row(os, std::vector<std::string>{"operator", "value"});
    for (std::size_t i = 0; i < labels.size(); ++i) io::csv_row(os, {labels[i], io::num(values[i])});
  }
};

inline PauliSet pauli_set(const CMatrix& rho, const PauliBasis& b) {
  if (rho.rows() != b.dim() || rho.cols() != b.dim()) throw std::invalid_argument("pauli_set: dimension mismatch");
  if (std::abs(rho.trace() - 1.0) > 1e-6) throw std::invalid_argument("pauli_set: trace must be 1");
  PauliSet s{b.labels(), {}};
  for (std::size_t m = 0; m < b.size(); ++m) s.values.push_back(std::real((rho * b.op(m)).trace()));
  return s;
}

inline CMatrix density_from_pauli(const PauliSet& s, const PauliBasis& b) {
  if (s.values.size() != b.size()) throw std::invalid_argument("density_from_pauli: wrong length");
  CMatrix rho = CMatrix::Zero(b.dim(), b.dim());
  for (std::size_t m = 0; m < b.size(); ++m) rho += s.values[m] * b.op(m);
  return rho / static_cast<double>(b.dim());
}

// Finite-shot estimate of each Pauli expectation (outcomes +-1). Only for
// realism studies; exact paths never call this.
inline PauliSet sample_pauli_set(const CMatrix& rho, const PauliBasis& b, long shots, std::mt19937_64& rng) {
  if (shots <= 0) throw std::invalid_argument("sample_pauli_set: shots must be positive");
  PauliSet exact = pauli_set(rho, b);
  PauliSet out{exact.labels, {}};
  for (std::size_t m = 0; m < b.size(); ++m) {
    if (m == 0) {
      out.values.push_back(1.0);
      continue;
    }
    const double p = std::clamp(0.5 * (1 + exact.values[m]), 0.0, 1.0);
    std::binomial_distribution<long> dist(shots, p);
    out.values.push_back(2.0 * static_cast<double>(dist(rng)) / static_cast<double>(shots) - 1.0);
  }
  return out;
}

}  // namespace tqec::tomography
