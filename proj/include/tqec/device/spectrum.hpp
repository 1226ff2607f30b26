// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "tqec/device/hamiltonian.hpp"
#include "tqec/io/format.hpp"

namespace tqec::device {

// Energies of labelled (diabatically tracked) states along a one-qubit flux
// scan, relative to the dressed ground state at each point.
struct LabeledSpectrum {
  int qubit = 1;
  std::vector<double> flux;
  std::vector<double> frequency_ghz;   // bare omega01 of the scanned qubit
  std::vector<Occupation> labels;
  RMatrix energies;   // [point, label]
  RMatrix overlaps;   // squared overlap with the bare state

  void write_csv(std::ostream& os) const;
};

inline LabeledSpectrum labeled_spectrum_scan(const DeviceConfig& cfg, int qubit,
                                             const std::vector<double>& flux_grid,
                                             const std::vector<Occupation>& labels,
                                             Flux base = {}) {
  if (qubit < 1 || qubit > 3) throw std::invalid_argument("spectrum: qubit must be 1..3");
  if (flux_grid.empty() || labels.empty()) throw std::invalid_argument("spectrum: empty scan");
  if (base == Flux{}) base = cfg.nominal_flux;
  const HilbertSpace sp = cfg.space();
  LabeledSpectrum out;
  out.qubit = qubit;
  out.flux = flux_grid;
  out.labels = labels;
  const auto np = static_cast<Eigen::Index>(flux_grid.size());
  const auto nl = static_cast<Eigen::Index>(labels.size());
  out.energies.resize(np, nl);
  out.overlaps.resize(np, nl);
  RMatrix prev;  // eigenvectors selected at previous point
  for (Eigen::Index p = 0; p < np; ++p) {
    Flux f = base;
    f[qubit - 1] = flux_grid[p];
    out.frequency_ghz.push_back(frequency_at_flux(cfg, qubit, flux_grid[p]));
    Eigensystem es = diagonalize(cfg, f);
    auto idx = assign_labels(es, sp, labels);
    RMatrix cur(es.vectors.rows(), nl);
    for (Eigen::Index l = 0; l < nl; ++l) {
      const Eigen::Index b = sp.index(labels[l].vec());
      double w = es.vectors(b, idx[l]) * es.vectors(b, idx[l]);
      // Near an avoided crossing the bare character is split; fall back to the
      // branch most similar to the previous point when neither dominates.
      if (w < 0.5 && prev.size() > 0) {
        Eigen::Index best = idx[l];
        double bo = -1;
        for (Eigen::Index k = 0; k < es.vectors.cols(); ++k) {
          double o = std::abs(prev.col(l).dot(es.vectors.col(k)));
          if (o > bo) { bo = o; best = k; }
        }
        idx[l] = best;
        w = es.vectors(b, best) * es.vectors(b, best);
      }
      cur.col(l) = es.vectors.col(idx[l]);
      out.energies(p, l) = es.energies(idx[l]) - es.energies(0);
      out.overlaps(p, l) = w;
    }
    prev = cur;
  }
  return out;
}

inline void LabeledSpectrum::write_csv(std::ostream& os) const {
  std::vector<std::string> head{"flux", "omega01_ghz"};
  for (const auto& l : labels) head.push_back(to_string(l));
  io::csv_row(os, head);
  for (std::size_t p = 0; p < flux.size(); ++p) {
    std::vector<double> row{flux[p], frequency_ghz[p]};
    for (Eigen::Index l = 0; l < energies.cols(); ++l) row.push_back(energies(p, l));
    io::csv_row(os, row);
  }
}

struct AvoidedCrossing {
  int qubit = 1;
  double flux = 0;           // location along the scanned qubit
  double frequency_ghz = 0;  // bare omega01 of the scanned qubit there
  double gap_ghz = 0;        // minimum splitting of the two branches
};

// Splitting between the two eigenstates carrying most of the weight of the
// bare states a and b.
inline double pair_splitting(const DeviceConfig& cfg, const Flux& f, const Occupation& a,
                             const Occupation& b) {
  const HilbertSpace sp = cfg.space();
  Eigensystem es = diagonalize(cfg, f);
  const Eigen::Index ia = sp.index(a.vec()), ib = sp.index(b.vec());
  Eigen::Index k1 = -1, k2 = -1;
  double w1 = -1, w2 = -1;
  for (Eigen::Index k = 0; k < es.vectors.cols(); ++k) {
    double w = es.vectors(ia, k) * es.vectors(ia, k) + es.vectors(ib, k) * es.vectors(ib, k);
    if (w > w1) { w2 = w1; k2 = k1; w1 = w; k1 = k; }
    else if (w > w2) { w2 = w; k2 = k; }
  }
  return std::abs(es.energies(k1) - es.energies(k2));
}

// Locates the minimum splitting of a/b between flux_lo and flux_hi on the
// given qubit: coarse scan then golden-section refinement.
inline AvoidedCrossing find_avoided_crossing(const DeviceConfig& cfg, int qubit,
                                             const Occupation& a, const Occupation& b,
                                             double flux_lo, double flux_hi, Flux base = {},
                                             int coarse_points = 41) {
  if (qubit < 1 || qubit > 3) throw std::invalid_argument("crossing: qubit must be 1..3");
  if (!(flux_hi > flux_lo)) throw std::invalid_argument("crossing: empty flux range");
  if (base == Flux{}) base = cfg.nominal_flux;
  auto split = [&](double x) {
    Flux f = base;
    f[qubit - 1] = x;
    return pair_splitting(cfg, f, a, b);
  };
  int best = 0;
  double bv = std::numeric_limits<double>::infinity();
  const double step = (flux_hi - flux_lo) / (coarse_points - 1);
  for (int i = 0; i < coarse_points; ++i) {
    double v = split(flux_lo + i * step);
    if (v < bv) { bv = v; best = i; }
  }
  if (best == 0 || best == coarse_points - 1) {
    throw std::domain_error("find_avoided_crossing: no crossing of " + to_string(a) + " and " +
                            to_string(b) + " inside the flux range");
  }
  double lo = flux_lo + (best - 1) * step, hi = flux_lo + (best + 1) * step;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = split(x1), f2 = split(x2);
  while (hi - lo > 1e-9) {
    if (f1 < f2) { hi = x2; x2 = x1; f2 = f1; x1 = hi - r * (hi - lo); f1 = split(x1); }
    else { lo = x1; x1 = x2; f1 = f2; x2 = lo + r * (hi - lo); f2 = split(x2); }
  }
  AvoidedCrossing c;
  c.qubit = qubit;
  c.flux = 0.5 * (lo + hi);
  c.frequency_ghz = frequency_at_flux(cfg, qubit, c.flux);
  c.gap_ghz = split(c.flux);
  return c;
}

// Same, with the search window given as a bare-frequency range of the qubit.
inline AvoidedCrossing find_avoided_crossing_ghz(const DeviceConfig& cfg, int qubit,
                                                 const Occupation& a, const Occupation& b,
                                                 double f_lo, double f_hi, Flux base = {}) {
  double x1 = flux_for_frequency(cfg, qubit, f_lo), x2 = flux_for_frequency(cfg, qubit, f_hi);
  return find_avoided_crossing(cfg, qubit, a, b, std::min(x1, x2), std::max(x1, x2), base);
}

}  // namespace tqec::device
