// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "tqec/core/types.hpp"
#include "tqec/device/config.hpp"

namespace tqec::device {

using Flux = std::array<double, 3>;

// Basis label: transmon levels for Q1..Q3 and the cavity photon number.
struct Occupation {
  int q1 = 0, q2 = 0, q3 = 0, photons = 0;
  std::vector<int> vec() const { return {q1, q2, q3, photons}; }
  bool operator==(const Occupation&) const = default;
};

// Parses "102" or "|102>" (cavity empty) and "|102,1>" (one photon).
inline Occupation parse_occupation(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == '|' || c == '>' || c == ' '; }),
          s.end());
  Occupation o;
  auto comma = s.find(',');
  std::string t = s.substr(0, comma);
  if (t.size() != 3 || !std::all_of(t.begin(), t.end(), ::isdigit)) {
    throw std::invalid_argument("occupation: expected three digits, got '" + s + "'");
  }
  o.q1 = t[0] - '0';
  o.q2 = t[1] - '0';
  o.q3 = t[2] - '0';
  if (comma != std::string::npos) o.photons = std::stoi(s.substr(comma + 1));
  return o;
}

inline std::string to_string(const Occupation& o) {
  std::string s = "|" + std::to_string(o.q1) + std::to_string(o.q2) + std::to_string(o.q3);
  if (o.photons) s += "," + std::to_string(o.photons);
  return s + ">";
}

inline Flux operating_flux(const DeviceConfig& cfg) { return cfg.nominal_flux; }

// Flux on the operating branch giving the requested bare omega01.
inline double flux_for_frequency(const DeviceConfig& cfg, int qubit, double f_ghz) {
  double phi = flux_for_omega01(cfg.transmons[qubit - 1], f_ghz);
  return cfg.nominal_flux[qubit - 1] < 0 ? -phi : phi;
}

inline double frequency_at_flux(const DeviceConfig& cfg, int qubit, double flux) {
  return omega01(cfg.transmons[qubit - 1], flux);
}

inline Flux with_frequency(const DeviceConfig& cfg, Flux f, int qubit, double ghz) {
  f[qubit - 1] = flux_for_frequency(cfg, qubit, ghz);
  return f;
}

// Real symmetric Hamiltonian in GHz.
inline RMatrix hamiltonian_real(const DeviceConfig& cfg, const Flux& flux) {
  std::array<TransmonSpectrum, 3> tr;
  for (int q = 0; q < 3; ++q) tr[q] = transmon_spectrum(cfg.transmons[q], flux[q], cfg.charge_cutoff);
  const HilbertSpace sp = cfg.space();
  const Eigen::Index n = sp.total_dim();
  RMatrix h = RMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto occ = sp.occupation(i);
    const int m = occ[3];
    double diag = cfg.cavity_freq_ghz * m;
    for (int q = 0; q < 3; ++q) diag += tr[q].energies(occ[q]);
    h(i, i) = diag;
    for (int q = 0; q < 3; ++q) {
      const double g = cfg.transmons[q].g_ghz;
      if (g == 0.0 || m + 1 >= cfg.cavity_levels) continue;
      for (int l = 0; l < cfg.transmons[q].levels; ++l) {
        const double nel = tr[q].charge(occ[q], l);
        if (nel == 0.0) continue;
        auto o2 = occ;
        o2[q] = l;
        o2[3] = m + 1;
        const Eigen::Index j = sp.index(o2);
        const double v = g * nel * std::sqrt(static_cast<double>(m + 1));
        h(i, j) += v;
        h(j, i) += v;
      }
    }
  }
  return h;
}

inline Operator build_hamiltonian(const DeviceConfig& cfg, const Flux& flux) {
  return Operator(cfg.space(), hamiltonian_real(cfg, flux).cast<cplx>());
}

// Eigen-decomposition with ascending energies. Uses the conserved total
// excitation parity to split the problem into two blocks.
struct Eigensystem {
  RVector energies;
  RMatrix vectors;  // columns are eigenvectors in the bare basis
};

inline Eigensystem diagonalize(const DeviceConfig& cfg, const RMatrix& h) {
  const HilbertSpace sp = cfg.space();
  const Eigen::Index n = h.rows();
  std::array<std::vector<Eigen::Index>, 2> idx;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto o = sp.occupation(i);
    idx[(o[0] + o[1] + o[2] + o[3]) % 2].push_back(i);
  }
  RVector e(n);
  RMatrix v = RMatrix::Zero(n, n);
  Eigen::Index col = 0;
  for (const auto& block : idx) {
    const auto b = static_cast<Eigen::Index>(block.size());
    if (b == 0) continue;
    RMatrix hb(b, b);
    for (Eigen::Index r = 0; r < b; ++r)
      for (Eigen::Index c = 0; c < b; ++c) hb(r, c) = h(block[r], block[c]);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(hb);
    for (Eigen::Index k = 0; k < b; ++k, ++col) {
      e(col) = es.eigenvalues()(k);
      for (Eigen::Index r = 0; r < b; ++r) v(block[r], col) = es.eigenvectors()(r, k);
    }
  }
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return e(a) < e(b); });
  Eigensystem out{RVector(n), RMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.energies(k) = e(order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

inline Eigensystem diagonalize(const DeviceConfig& cfg, const Flux& flux) {
  return diagonalize(cfg, hamiltonian_real(cfg, flux));
}

// Assigns each bare state to the eigenvector of maximal overlap, resolving
// collisions greedily by overlap. Returns eigenvector indices.
inline std::vector<Eigen::Index> assign_labels(const Eigensystem& es, const HilbertSpace& sp,
                                               const std::vector<Occupation>& labels) {
  const auto nl = labels.size();
  std::vector<Eigen::Index> bare(nl);
  for (std::size_t i = 0; i < nl; ++i) bare[i] = sp.index(labels[i].vec());
  struct Cand { double w; std::size_t label; Eigen::Index vec; };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < nl; ++i) {
    for (Eigen::Index k = 0; k < es.vectors.cols(); ++k) {
      double w = es.vectors(bare[i], k) * es.vectors(bare[i], k);
      if (w > 1e-6) cands.push_back({w, i, k});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.w > b.w; });
  std::vector<Eigen::Index> out(nl, -1);
  std::vector<bool> used(es.vectors.cols(), false);
  std::size_t done = 0;
  for (const auto& c : cands) {
    if (out[c.label] >= 0 || used[c.vec]) continue;
    out[c.label] = c.vec;
    used[c.vec] = true;
    if (++done == nl) break;
  }
  for (std::size_t i = 0; i < nl; ++i) {
    if (out[i] < 0) throw NumericalError("assign_labels: could not label " + to_string(labels[i]));
  }
  return out;
}

inline std::vector<Occupation> computational_labels() {
  std::vector<Occupation> l;
  for (int i = 0; i < 8; ++i) l.push_back({(i >> 2) & 1, (i >> 1) & 1, i & 1, 0});
  return l;
}

}  // namespace tqec::device
