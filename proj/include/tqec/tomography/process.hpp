// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include <functional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "tqec/tomography/pauli.hpp"

namespace tqec::tomography {

// A quantum channel on n-qubit density matrices.
using Channel = std::function<CMatrix(const CMatrix&)>;

// Single-qubit preparations |0>, |1>, |+x>, |+y>.
inline std::array<CMatrix, 4> single_qubit_inputs() {
  CMatrix z0 = CMatrix::Zero(2, 2), z1 = CMatrix::Zero(2, 2);
  z0(0, 0) = 1;
  z1(1, 1) = 1;
  CMatrix px = 0.5 * (pauli::I() + pauli::X());
  CMatrix py = 0.5 * (pauli::I() + pauli::Y());
  return {z0, z1, px, py};
}

// All 4^n product inputs, Q1 the most significant digit.
inline std::vector<CMatrix> tomography_inputs(int n) {
  auto s = single_qubit_inputs();
  std::vector<CMatrix> out{CMatrix::Identity(1, 1)};
  for (int q = 0; q < n; ++q) {
    std::vector<CMatrix> next;
    for (const auto& a : out)
      for (const auto& b : s) next.push_back(kron(a, b));
    out = std::move(next);
  }
  return out;
}

struct ChiMatrix {
  std::vector<std::string> labels;
  CMatrix chi;

  nlohmann::json to_json() const {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (Eigen::Index r = 0; r < chi.rows(); ++r) {
      std::vector<double> a, b;
      for (Eigen::Index c = 0; c < chi.cols(); ++c) {
        a.push_back(chi(r, c).real());
        b.push_back(chi(r, c).imag());
      }
      re.push_back(a);
      im.push_back(b);
    }
    return {{"labels", labels}, {"re", re}, {"im", im}};
  }

  void write_csv(std::ostream& os) const {
    io::csv_row(os, std::vector<std::string>{"row", "col", "re", "im", "abs"});
    for (Eigen::Index r = 0; r < chi.rows(); ++r)
      for (Eigen::Index c = 0; c < chi.cols(); ++c)
        io::csv_row(os, {labels[r], labels[c], io::num(chi(r, c).real()), io::num(chi(r, c).imag()),
                          io::num(std::abs(chi(r, c)))});
  }
};

namespace detail {

// Row u = 2i+j expresses |i><j| in terms of the four inputs.
inline CMatrix unit_coefficients() {
  const cplx I(0, 1);
  CMatrix c = CMatrix::Zero(4, 4);
  c(0, 0) = 1;
  c.row(1) << -(1.0 + I) / 2.0, -(1.0 + I) / 2.0, 1.0, I;
  c.row(2) << -(1.0 - I) / 2.0, -(1.0 - I) / 2.0, 1.0, -I;
  c(3, 1) = 1;
  return c;
}

}  // namespace detail

// Chi matrix from the outputs of the 4^n product inputs: outputs are first
// combined into the channel's action on matrix units (a fixed transfer
// tensor), forming the Choi matrix J; then chi = B^dag J B / d^2 with B the
// vectorised Pauli operators.
inline ChiMatrix chi_from_outputs(const std::vector<CMatrix>& outputs, int n) {
  const PauliBasis basis(n);
  const int d = basis.dim();
  const std::size_t nin = std::size_t{1} << (2 * n);
  if (outputs.size() != nin) throw std::invalid_argument("chi_from_outputs: need 4^n outputs");
  CMatrix cn = CMatrix::Identity(1, 1);
  for (int q = 0; q < n; ++q) cn = kron(cn, detail::unit_coefficients());
  // Choi matrix, index (out, in) row-major.
  CMatrix J = CMatrix::Zero(d * d, d * d);
  for (std::size_t u = 0; u < nin; ++u) {
    int i = 0, j = 0;
    for (int q = 0; q < n; ++q) {
      const int digit = static_cast<int>((u >> (2 * (n - 1 - q))) & 3);
      i = 2 * i + (digit >> 1);
      j = 2 * j + (digit & 1);
    }
    CMatrix e = CMatrix::Zero(d, d);
    for (std::size_t k = 0; k < nin; ++k) {
      const cplx w = cn(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(k));
      if (w != cplx(0, 0)) e += w * outputs[k];
    }
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) J(k * d + i, l * d + j) = e(k, l);
  }
  CMatrix B(d * d, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t m = 0; m < basis.size(); ++m)
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i) B(k * d + i, static_cast<Eigen::Index>(m)) = basis.op(m)(k, i);
  return {basis.labels(), B.adjoint() * J * B / static_cast<double>(d * d)};
}

inline ChiMatrix process_tomography(const Channel& channel, int n) {
  std::vector<CMatrix> outs;
  for (const auto& in : tomography_inputs(n)) outs.push_back(channel(in));
  return chi_from_outputs(outs, n);
}

// chi of a unitary: chi_mn = c_m conj(c_n), c_m = Tr(P_m U) / 2^n.
inline ChiMatrix ideal_chi(const CMatrix& u) {
  int n = 0;
  while ((1 << n) < u.rows()) ++n;
  const PauliBasis basis(n);
  CVector c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t m = 0; m < basis.size(); ++m)
    c(static_cast<Eigen::Index>(m)) = (basis.op(m) * u).trace() / static_cast<double>(basis.dim());
  return {basis.labels(), c * c.adjoint()};
}

inline double process_fidelity(const ChiMatrix& a, const ChiMatrix& b) {
  if (a.chi.rows() != b.chi.rows()) throw std::invalid_argument("process_fidelity: size mismatch");
  const cplx f = (a.chi * b.chi).trace();
  if (std::abs(f.imag()) > 1e-9) throw NumericalError("process_fidelity: trace not real");
  return f.real();
}

struct TruthTable {
  RMatrix table;  // table(i, j) = population of |j> after preparing |i>
  double classical_fidelity = 0;

  void write_csv(std::ostream& os) const {
    std::vector<std::string> head{"input"};
    for (int j = 0; j < table.cols(); ++j) head.push_back(label_of(j));
    io::csv_row(os, head);
    for (int i = 0; i < table.rows(); ++i) {
      std::vector<std::string> row{label_of(i)};
      for (int j = 0; j < table.cols(); ++j) row.push_back(io::num(table(i, j)));
      io::csv_row(os, row);
    }
  }
  static std::string label_of(int k) {
    std::string s = "000";
    for (int b = 0; b < 3; ++b) s[b] = ((k >> (2 - b)) & 1) ? '1' : '0';
    return s;
  }
};

// Classical action of a three-qubit channel; fidelity is the mean population
// of the intended output (identity map unless given).
inline TruthTable truth_table(const Channel& channel, std::vector<int> intended = {}) {
  if (intended.empty())
    for (int i = 0; i < 8; ++i) intended.push_back(i);
  if (intended.size() != 8) throw std::invalid_argument("truth_table: intended map needs 8 entries");
  TruthTable t;
  t.table = RMatrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i) {
    CMatrix in = CMatrix::Zero(8, 8);
    in(i, i) = 1;
    CMatrix out = channel(in);
    for (int j = 0; j < 8; ++j) t.table(i, j) = std::real(out(j, j));
    t.classical_fidelity += t.table(i, intended[i]) / 8.0;
  }
  return t;
}

}  // namespace tqec::tomography
