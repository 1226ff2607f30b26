// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tqec/core/linalg.hpp"

namespace tqec::gates {

// Conditional phases of a diagonal three-qubit gate. The phase picked up by
// |abc> is the sum of phi_S over all non-empty S contained in the set bits of
// abc. Entries are indexed by bit mask 4a+2b+c (Q1 most significant).
class PhaseVector {
 public:
  // Canonical reporting order: 001, 010, 100, 011, 101, 110, 111.
  static constexpr std::array<int, 7> kOrder{1, 2, 4, 3, 5, 6, 7};

  PhaseVector() { phi_.fill(0.0); }

  // Takes phases in canonical order.
  static PhaseVector from_ordered(const std::array<double, 7>& p) {
    PhaseVector v;
    for (int i = 0; i < 7; ++i) v.phi_[kOrder[i]] = p[i];
    return v;
  }

  static PhaseVector ccz() {
    PhaseVector v;
    v.phi_[7] = kPi;
    return v;
  }

  // Inclusion-exclusion over the eight diagonal phases.
  static PhaseVector from_diagonal(const std::array<double, 8>& total) {
    PhaseVector v;
    for (int s = 1; s < 8; ++s) {
      double acc = 0;
      for (int t = 0; t < 8; ++t) {
        if ((t & s) != t) continue;
        const int sign = ((__builtin_popcount(s) - __builtin_popcount(t)) % 2) ? -1 : 1;
        acc += sign * total[t];
      }
      v.phi_[s] = wrap_angle(acc);
    }
    return v;
  }

  static PhaseVector from_unitary(const CMatrix& u) {
    if (u.rows() != 8 || u.cols() != 8) throw std::invalid_argument("PhaseVector: need 8x8");
    std::array<double, 8> d{};
    for (int k = 0; k < 8; ++k) {
      if (std::abs(u(k, k)) < 1e-12) throw std::domain_error("PhaseVector: vanishing diagonal");
      d[k] = std::arg(u(k, k));
    }
    return from_diagonal(d);
  }

  // Strict form for gates that must be diagonal.
  static PhaseVector extract(const CMatrix& u, double tol = 1e-9) {
    if (u.rows() != 8 || u.cols() != 8) throw std::invalid_argument("PhaseVector: need 8x8");
    CMatrix off = u;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() > tol) throw std::domain_error("PhaseVector: gate is not diagonal");
    for (int k = 0; k < 8; ++k) {
      if (std::abs(std::abs(u(k, k)) - 1.0) > tol) throw std::domain_error("PhaseVector: gate is not unitary");
    }
    return from_unitary(u);
  }

  double operator[](int mask) const { return phi_.at(mask); }
  double& operator[](int mask) { return phi_.at(mask); }

  double at(const std::string& label) const { return phi_[mask_of(label)]; }
  double& at(const std::string& label) { return phi_[mask_of(label)]; }

  static int mask_of(const std::string& label) {
    if (label.size() != 3 || label == "000") throw std::invalid_argument("PhaseVector: bad label '" + label + "'");
    int m = 0;
    for (char c : label) {
      if (c != '0' && c != '1') throw std::invalid_argument("PhaseVector: bad label '" + label + "'");
      m = 2 * m + (c - '0');
    }
    return m;
  }
  static std::string label_of(int mask) {
    std::string s = "000";
    for (int b = 0; b < 3; ++b) s[b] = ((mask >> (2 - b)) & 1) ? '1' : '0';
    return s;
  }

  double total_phase(int state) const {
    double acc = 0;
    for (int s = 1; s < 8; ++s) {
      if ((s & state) == s) acc += phi_[s];
    }
    return acc;
  }

  CMatrix unitary() const {
    CMatrix u = CMatrix::Zero(8, 8);
    for (int k = 0; k < 8; ++k) u(k, k) = std::exp(cplx(0, total_phase(k)));
    return u;
  }

  std::array<double, 7> ordered() const {
    std::array<double, 7> o{};
    for (int i = 0; i < 7; ++i) o[i] = phi_[kOrder[i]];
    return o;
  }

  nlohmann::json to_json_deg() const {
    nlohmann::json j;
    for (int s = 1; s < 8; ++s) j[label_of(s)] = phi_[s] * 180.0 / kPi;
    return j;
  }

  static PhaseVector from_json_deg(const nlohmann::json& j) {
    PhaseVector v;
    for (auto it = j.begin(); it != j.end(); ++it) v.at(it.key()) = it.value().get<double>() * kPi / 180.0;
    return v;
  }

 private:
  std::array<double, 8> phi_{};  // phi_[0] unused
};

}  // namespace tqec::gates
