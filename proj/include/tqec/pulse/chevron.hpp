// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "tqec/device/hamiltonian.hpp"
#include "tqec/io/format.hpp"

namespace tqec::pulse {

using device::DeviceConfig;
using device::Flux;
using device::Occupation;

// Population of a bare target state after a square flux pulse, on an
// (amplitude, duration) grid. Amplitude is the flux of the pulsed qubit.
struct ChevronMap {
  int qubit = 2;
  std::vector<double> amplitude;  // flux
  std::vector<double> duration_ns;
  RMatrix population;             // [amplitude, duration]

  void write_csv(std::ostream& os) const {
    io::csv_row(os, std::vector<std::string>{"amplitude_flux", "duration_ns", "population"});
    for (std::size_t a = 0; a < amplitude.size(); ++a)
      for (std::size_t t = 0; t < duration_ns.size(); ++t)
        io::csv_row(os, std::vector<double>{amplitude[a], duration_ns[t],
                                            population(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t))});
  }
};

// Evenly spaced grid with n points, both ends included.
inline std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("linspace: need at least one point");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

// Starting from `prepare` (lab frame, full device space), the flux of `qubit`
// jumps to each amplitude for each duration. Each segment is propagated in
// closed form from one diagonalisation per amplitude.
inline ChevronMap chevron_scan(const DeviceConfig& cfg, const CVector& prepare, int qubit,
                               const std::vector<double>& amplitudes, const std::vector<double>& durations_ns,
                               const Occupation& target, Flux base = {}) {
  if (qubit < 1 || qubit > 3) throw std::invalid_argument("chevron: qubit must be 1..3");
  if (amplitudes.empty() || durations_ns.empty()) throw std::invalid_argument("chevron: empty range");
  for (double t : durations_ns)
    if (!(t >= 0)) throw std::invalid_argument("chevron: durations must be >= 0");
  const HilbertSpace sp = cfg.space();
  if (prepare.size() != sp.total_dim()) throw std::invalid_argument("chevron: state dimension mismatch");
  if (base == Flux{}) base = cfg.nominal_flux;
  const Eigen::Index tb = sp.index(target.vec());

  ChevronMap m;
  m.qubit = qubit;
  m.amplitude = amplitudes;
  m.duration_ns = durations_ns;
  m.population.resize(static_cast<Eigen::Index>(amplitudes.size()), static_cast<Eigen::Index>(durations_ns.size()));
  for (std::size_t a = 0; a < amplitudes.size(); ++a) {
    Flux f = base;
    f[qubit - 1] = amplitudes[a];
    const auto es = device::diagonalize(cfg, f);
    const CVector c = es.vectors.transpose().cast<cplx>() * prepare;
    const RVector w = es.vectors.row(tb).transpose();
    for (std::size_t t = 0; t < durations_ns.size(); ++t) {
      cplx amp = 0;
      for (Eigen::Index k = 0; k < c.size(); ++k)
        amp += w(k) * c(k) * std::exp(cplx(0, -kTwoPi * es.energies(k) * durations_ns[t]));
      m.population(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t)) = std::norm(amp);
    }
  }
  return m;
}

// Frequency (1/ns = GHz) of the strongest oscillation in a uniformly sampled
// trace: coarse periodogram over [fmin, fmax], then golden refinement.
inline double dominant_frequency(const std::vector<double>& t, const std::vector<double>& y, double fmin,
                                 double fmax) {
  if (t.size() != y.size() || t.size() < 4) throw std::invalid_argument("dominant_frequency: need >= 4 samples");
  if (!(fmax > fmin && fmin >= 0)) throw std::invalid_argument("dominant_frequency: bad band");
  double mean = 0;
  for (double v : y) mean += v / static_cast<double>(y.size());
  auto power = [&](double f) {
    cplx s = 0;
    for (std::size_t i = 0; i < t.size(); ++i) s += (y[i] - mean) * std::exp(cplx(0, -kTwoPi * f * t[i]));
    return std::norm(s);
  };
  const double span = t.back() - t.front();
  const int n = std::max(200, static_cast<int>(8 * (fmax - fmin) * span));
  int best = 0;
  double bp = -1;
  for (int i = 0; i <= n; ++i) {
    double p = power(fmin + (fmax - fmin) * i / n);
    if (p > bp) { bp = p; best = i; }
  }
  const double h = (fmax - fmin) / n;
  double lo = std::max(fmin, fmin + (best - 1) * h), hi = std::min(fmax, fmin + (best + 1) * h);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double p1 = power(x1), p2 = power(x2);
  while (hi - lo > 1e-9) {
    if (p1 > p2) { hi = x2; x2 = x1; p2 = p1; x1 = hi - r * (hi - lo); p1 = power(x1); }
    else { lo = x1; x1 = x2; p1 = p2; x2 = lo + r * (hi - lo); p2 = power(x2); }
  }
  return 0.5 * (lo + hi);
}

}  // namespace tqec::pulse
