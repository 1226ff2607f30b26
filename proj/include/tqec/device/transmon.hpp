// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tqec/core/types.hpp"

namespace tqec::device {

struct TransmonParams {
  double ej_max_ghz = 30.0;
  double ec_ghz = 0.33;
  double g_ghz = 0.22;
  int levels = 4;
};

// Lowest levels of a charge-basis transmon: energies relative to the ground
// state and the charge matrix element normalised so that n(0,1) = 1.
struct TransmonSpectrum {
  RVector energies;   // energies(j) = omega_0j in GHz, energies(0) = 0
  RMatrix charge;     // normalised, n(j,j+1) > 0
  double n01_raw = 0; // |<0|n|1>| before normalisation
};

inline double ej_at_flux(double ej_max, double flux) {
  return ej_max * std::abs(std::cos(kPi * flux));
}

namespace detail {

inline Eigen::SelfAdjointEigenSolver<RMatrix> charge_basis_solve(
    double ec, double ej, int cutoff) {
  const int n = 2 * cutoff + 1;
  RMatrix h = RMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double q = i - cutoff;
    h(i, i) = 4.0 * ec * q * q;
    if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = -0.5 * ej;
  }
  return Eigen::SelfAdjointEigenSolver<RMatrix>(h);
}

}  // namespace detail

// Diagonalises 4 Ec n^2 - Ej cos(phi) in the charge basis |n| <= cutoff.
// Throws NumericalError if the requested levels move by more than 1 MHz when
// the cutoff grows by 5.
inline TransmonSpectrum transmon_spectrum(const TransmonParams& p, double flux,
                                          int charge_cutoff = 20) {
  if (p.levels < 2) throw std::invalid_argument("transmon: need >= 2 levels");
  if (p.ec_ghz <= 0 || p.ej_max_ghz <= 0) {
    throw std::invalid_argument("transmon: Ej and Ec must be positive");
  }
  if (2 * charge_cutoff + 1 < p.levels) {
    throw std::invalid_argument("transmon: charge cutoff too small");
  }
  const double ej = ej_at_flux(p.ej_max_ghz, flux);
  auto es = detail::charge_basis_solve(p.ec_ghz, ej, charge_cutoff);
  auto chk = detail::charge_basis_solve(p.ec_ghz, ej, charge_cutoff + 5);
  for (int j = 0; j < p.levels; ++j) {
    double a = es.eigenvalues()(j) - es.eigenvalues()(0);
    double b = chk.eigenvalues()(j) - chk.eigenvalues()(0);
    if (std::abs(a - b) > 1e-3) {
      throw NumericalError("transmon: charge cutoff " +
                           std::to_string(charge_cutoff) + " not converged");
    }
  }

  const int n = 2 * charge_cutoff + 1;
  RVector nop(n);
  for (int i = 0; i < n; ++i) nop(i) = i - charge_cutoff;
  RMatrix v = es.eigenvectors().leftCols(p.levels);
  // Fix signs so that consecutive charge elements are positive.
  for (int j = 1; j < p.levels; ++j) {
    double e = v.col(j - 1).dot(nop.cwiseProduct(v.col(j)));
    if (e < 0) v.col(j) = -v.col(j);
  }
  RMatrix nm = v.transpose() * nop.asDiagonal() * v;

  TransmonSpectrum out;
  out.energies = es.eigenvalues().head(p.levels).array() - es.eigenvalues()(0);
  out.n01_raw = nm(0, 1);
  out.charge = nm / out.n01_raw;
  // Parity selection rule: even level differences have no charge element.
  for (int i = 0; i < p.levels; ++i) {
    for (int j = 0; j < p.levels; ++j) {
      if ((i + j) % 2 == 0) out.charge(i, j) = 0.0;
    }
  }
  return out;
}

// Bare omega01 (eigenvalues only, no convergence check).
inline double omega01(const TransmonParams& p, double flux, int charge_cutoff = 20) {
  const int n = 2 * charge_cutoff + 1;
  RMatrix h = RMatrix::Zero(n, n);
  const double ej = ej_at_flux(p.ej_max_ghz, flux);
  for (int i = 0; i < n; ++i) {
    h(i, i) = 4.0 * p.ec_ghz * (i - charge_cutoff) * (i - charge_cutoff);
    if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = -0.5 * ej;
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1) - es.eigenvalues()(0);
}

// Flux in [0, 0.5) giving the requested bare omega01. Newton steps from the
// asymptotic guess sqrt(8 Ej Ec) - Ec, safeguarded by a bisection bracket.
inline double flux_for_omega01(const TransmonParams& p, double target_ghz) {
  const double hi_flux = 0.499;
  const double fmax = omega01(p, 0.0);
  const double fmin = omega01(p, hi_flux);
  if (target_ghz > fmax || target_ghz < fmin) {
    throw std::domain_error("flux_for_omega01: " + std::to_string(target_ghz) +
                            " GHz outside tunable range");
  }
  if (target_ghz == fmax) return 0.0;
  double lo = 0.0, hi = hi_flux;
  const double ej = (target_ghz + p.ec_ghz) * (target_ghz + p.ec_ghz) / (8.0 * p.ec_ghz);
  double x = std::acos(std::clamp(ej / p.ej_max_ghz, 0.0, 1.0)) / kPi;
  x = std::clamp(x, lo + 1e-9, hi - 1e-9);
  for (int i = 0; i < 100; ++i) {
    const double f = omega01(p, x) - target_ghz;
    if (std::abs(f) < 1e-13) return x;
    if (f > 0) lo = x;  // omega01 decreases with |flux| on [0, 0.5)
    else hi = x;
    const double h = 1e-7;
    const double df = (omega01(p, x + h) - omega01(p, x - h)) / (2 * h);
    double nx = df != 0 ? x - f / df : 0.5 * (lo + hi);
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (hi - lo < 1e-15) return nx;
    x = nx;
  }
  return x;
}

// Linear flux map Phi = M V + offset, M includes crosstalk.
struct FluxMap {
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Identity();
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();

  Eigen::Vector3d flux(const Eigen::Vector3d& volts) const {
    return matrix * volts + offset;
  }
  Eigen::Vector3d volts(const Eigen::Vector3d& flux) const {
    return matrix.fullPivLu().solve(flux - offset);
  }
};

}  // namespace tqec::device
