// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "tqec/core/linalg.hpp"
#include "tqec/device/hamiltonian.hpp"
#include "tqec/pulse/schedule.hpp"

namespace tqec::pulse {

using device::DeviceConfig;
using device::Eigensystem;

struct NoiseModel {
  bool enabled = true;
  std::array<double, 3> t1_us{};
  std::array<double, 3> t2_us{};
  double max_step_ns = 0.25;  // operator-splitting step

  static NoiseModel from_config(const DeviceConfig& cfg) {
    NoiseModel n;
    n.t1_us = cfg.t1_us;
    n.t2_us = cfg.t2_star_us;
    return n;
  }
  static NoiseModel none() {
    NoiseModel n;
    n.enabled = false;
    return n;
  }
  double gamma1(int q) const { return 1.0 / (t1_us[q] * 1e3); }
  double gamma_phi(int q) const { return 1.0 / (t2_us[q] * 1e3) - 0.5 * gamma1(q); }
};

// 2x2 single-qubit gate embedded on qubit q (1..3) of three qubits, Q1 most
// significant.
inline CMatrix embed_qubit_gate(int qubit, const CMatrix& u2) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int q = 1; q <= 3; ++q) out = kron(out, q == qubit ? u2 : CMatrix::Identity(2, 2));
  return out;
}

// Dressed computational states at the operating point. Their dynamical
// phases define the rotating frame in which gates are expressed.
struct DressedFrame {
  Eigensystem op;
  std::array<Eigen::Index, 8> index{};
  CMatrix basis;    // n x 8, column k = dressed |k>, bare component positive
  RVector energies; // absolute energies of the 8 states, GHz

  // Dressed basis carrying its dynamical phase at time t.
  CMatrix basis_at(double t_ns) const {
    CVector ph = (energies.cast<cplx>() * cplx(0, -kTwoPi * t_ns)).array().exp().matrix();
    return basis * ph.asDiagonal();
  }
};

inline DressedFrame make_frame(const DeviceConfig& cfg) {
  DressedFrame f;
  f.op = device::diagonalize(cfg, cfg.nominal_flux);
  const HilbertSpace sp = cfg.space();
  auto labels = device::computational_labels();
  auto idx = device::assign_labels(f.op, sp, labels);
  f.basis = CMatrix(sp.total_dim(), 8);
  f.energies = RVector(8);
  for (int k = 0; k < 8; ++k) {
    f.index[k] = idx[k];
    RVector v = f.op.vectors.col(idx[k]);
    if (v(sp.index(labels[k].vec())) < 0) v = -v;
    f.basis.col(k) = v.cast<cplx>();
    f.energies(k) = f.op.energies(idx[k]);
  }
  return f;
}

// Vectorisation of 8x8 operators: element (k,l) sits at k*8+l. A channel
// superoperator S maps vec(rho_in) to vec(rho_out).
inline CVector vec8(const CMatrix& m) {
  CVector v(64);
  for (int k = 0; k < 8; ++k)
    for (int l = 0; l < 8; ++l) v(k * 8 + l) = m(k, l);
  return v;
}
inline CMatrix unvec8(const CVector& v) {
  CMatrix m(8, 8);
  for (int k = 0; k < 8; ++k)
    for (int l = 0; l < 8; ++l) m(k, l) = v(k * 8 + l);
  return m;
}
inline CMatrix unitary_superop(const CMatrix& u) {
  return kron(u, u.conjugate());
}

// Time evolution of the device under a flux schedule. Caches eigensystems by
// flux value; not safe to share between threads.
class Dynamics {
 public:
  explicit Dynamics(DeviceConfig cfg) : cfg_(std::move(cfg)), frame_(make_frame(cfg_)) {
    space_ = cfg_.space();
    dim_ = space_.total_dim();
  }

  const DeviceConfig& config() const { return cfg_; }
  const DressedFrame& frame() const { return frame_; }
  const HilbertSpace& space() const { return space_; }

  const Eigensystem& eig(const Flux& f) {
    auto it = cache_.find(f);
    if (it != cache_.end()) return it->second;
    if (cache_.size() > 4000) cache_.clear();
    return cache_.emplace(f, device::diagonalize(cfg_, f)).first->second;
  }

  // Rotation event as a lab-frame operator applied to states: returns
  // I + D_t (R - I) D_t^dagger applied to the columns of psi.
  CMatrix apply_rotation(const RotationEvent& r, double t_ns, const CMatrix& psi) const {
    CMatrix d = frame_.basis_at(t_ns);
    CMatrix r8 = embed_qubit_gate(r.qubit, rotation_2x2(r.axis, r.angle)) - CMatrix::Identity(8, 8);
    return psi + d * (r8 * (d.adjoint() * psi));
  }

  // Unitary evolution of the columns of psi (lab frame).
  CMatrix evolve_states(const FluxSchedule& s, CMatrix psi) {
    s.validate();
    if (psi.rows() != dim_) throw std::invalid_argument("evolve: state dimension mismatch");
    double t = 0;
    std::size_t ri = 0;
    for (std::size_t k = 0; k <= s.segments.size(); ++k) {
      while (ri < s.rotations.size() && s.rotations[ri].after_segment == k) {
        psi = apply_rotation(s.rotations[ri++], t, psi);
      }
      if (k == s.segments.size()) break;
      const auto& seg = s.segments[k];
      const Eigensystem& es = eig(seg.flux);
      CVector ph = (es.energies.cast<cplx>() * cplx(0, -kTwoPi * seg.duration_ns)).array().exp().matrix();
      CMatrix c = es.vectors.transpose().cast<cplx>() * psi;
      psi = es.vectors.cast<cplx>() * (ph.asDiagonal() * c);
      t += seg.duration_ns;
    }
    return psi;
  }

  // 8x8 block <d_i| U0(T)^dagger U |d_j> between dressed computational states.
  CMatrix computational_block(const FluxSchedule& s) {
    CMatrix out = evolve_states(s, frame_.basis);
    return frame_.basis_at(s.duration_ns()).adjoint() * out;
  }

  // Lindblad evolution of rho (lab frame) by Strang splitting: half-step
  // dissipator, exact coherent step, half-step dissipator.
  CMatrix evolve_density(const FluxSchedule& s, CMatrix rho, const NoiseModel& noise) {
    s.validate();
    if (rho.rows() != dim_ || rho.cols() != dim_) throw std::invalid_argument("evolve: density dimension mismatch");
    if (noise.enabled) prepare_dissipator(noise);
    double t = 0;
    std::size_t ri = 0;
    for (std::size_t k = 0; k <= s.segments.size(); ++k) {
      while (ri < s.rotations.size() && s.rotations[ri].after_segment == k) {
        const auto& r = s.rotations[ri++];
        CMatrix tmp = apply_rotation(r, t, rho);
        rho = apply_rotation(r, t, tmp.adjoint()).adjoint();
      }
      if (k == s.segments.size()) break;
      const auto& seg = s.segments[k];
      if (seg.duration_ns == 0) continue;
      const Eigensystem& es = eig(seg.flux);
      const int n = noise.enabled ? std::max(1, static_cast<int>(std::ceil(seg.duration_ns / noise.max_step_ns - 1e-9))) : 1;
      const double dt = seg.duration_ns / n;
      CVector ph = (es.energies.cast<cplx>() * cplx(0, -kTwoPi * dt)).array().exp().matrix();
      CMatrix vc = es.vectors.cast<cplx>();
      CMatrix u = (vc * ph.asDiagonal()) * vc.transpose();
      for (int i = 0; i < n; ++i) {
        if (noise.enabled) dissipate(rho, 0.5 * dt);
        CMatrix a = u * rho;
        rho.noalias() = a * u.adjoint();
        if (noise.enabled) dissipate(rho, 0.5 * dt);
      }
      t += seg.duration_ns;
    }
    return rho;
  }

  // Channel on the dressed computational subspace in the operating frame, as
  // a 64x64 superoperator (see vec8). Population leaving the subspace is
  // not renormalised here.
  CMatrix computational_channel(const FluxSchedule& s, const NoiseModel& noise) {
    const double T = s.duration_ns();
    CMatrix dT = frame_.basis_at(T);
    CMatrix sup = CMatrix::Zero(64, 64);
    for (int i = 0; i < 8; ++i) {
      for (int j = i; j < 8; ++j) {
        CMatrix in = frame_.basis.col(i) * frame_.basis.col(j).adjoint();
        CMatrix out = evolve_density(s, in, noise);
        CMatrix o8 = dT.adjoint() * out * dT;
        sup.col(i * 8 + j) = vec8(o8);
        if (j != i) sup.col(j * 8 + i) = vec8(o8.adjoint());
      }
    }
    return sup;
  }

 private:
  void prepare_dissipator(const NoiseModel& noise) {
    if (diss_ready_ && noise.t1_us == diss_t1_ && noise.t2_us == diss_t2_) return;
    for (int q = 0; q < 3; ++q) {
      if (noise.gamma_phi(q) < -1e-15) throw std::invalid_argument("noise: T2 exceeds 2 T1");
    }
    level_.assign(3, std::vector<int>(dim_));
    for (Eigen::Index i = 0; i < dim_; ++i) {
      auto o = space_.occupation(i);
      for (int q = 0; q < 3; ++q) level_[q][i] = o[q];
    }
    decay_ = RMatrix::Zero(dim_, dim_);
    for (int q = 0; q < 3; ++q) {
      const double g1 = noise.gamma1(q), gp = noise.gamma_phi(q);
      for (Eigen::Index j = 0; j < dim_; ++j) {
        for (Eigen::Index i = 0; i < dim_; ++i) {
          const double ni = level_[q][i], nj = level_[q][j];
          decay_(i, j) += -0.5 * g1 * (ni + nj) - gp * (ni - nj) * (ni - nj);
        }
      }
    }
    gamma1_ = {noise.gamma1(0), noise.gamma1(1), noise.gamma1(2)};
    stride_.fill(0);
    Eigen::Index st = space_.dims()[3];
    for (int q = 2; q >= 0; --q) {
      stride_[q] = st;
      st *= space_.dims()[q];
    }
    diss_t1_ = noise.t1_us;
    diss_t2_ = noise.t2_us;
    diss_ready_ = true;
  }

  // Relaxation L = sqrt(g1) b with b = sum sqrt(j)|j-1><j|, and dephasing
  // sqrt(2 g_phi) n, which equals (g_phi/2) D[sigma_z] on the 0-1 subspace.
  CMatrix dissipator(const CMatrix& rho) const {
    CMatrix out = decay_.cast<cplx>().cwiseProduct(rho);
    for (int q = 0; q < 3; ++q) {
      const double g = gamma1_[q];
      const Eigen::Index st = stride_[q];
      for (Eigen::Index l = 0; l < dim_; ++l) {
        const int nl = level_[q][l];
        if (nl == 0) continue;
        for (Eigen::Index k = 0; k < dim_; ++k) {
          const int nk = level_[q][k];
          if (nk == 0) continue;
          out(k - st, l - st) += g * std::sqrt(static_cast<double>(nk * nl)) * rho(k, l);
        }
      }
    }
    return out;
  }

  void dissipate(CMatrix& rho, double h) const {
    CMatrix k1 = dissipator(rho);
    CMatrix k2 = dissipator(rho + 0.5 * h * k1);
    CMatrix k3 = dissipator(rho + 0.5 * h * k2);
    CMatrix k4 = dissipator(rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  DeviceConfig cfg_;
  DressedFrame frame_;
  HilbertSpace space_;
  Eigen::Index dim_ = 0;
  std::map<Flux, Eigensystem> cache_;

  bool diss_ready_ = false;
  std::array<double, 3> diss_t1_{}, diss_t2_{};
  std::vector<std::vector<int>> level_;
  RMatrix decay_;
  std::array<double, 3> gamma1_{};
  std::array<Eigen::Index, 3> stride_{};
};

// Free-function forms working on typed states.
inline Ket evolve_unitary(const DeviceConfig& cfg, const FluxSchedule& s, const Ket& psi0) {
  Dynamics d(cfg);
  require_same_space(psi0.space, d.space(), "evolve_unitary");
  return Ket(psi0.space, d.evolve_states(s, psi0.amplitudes));
}

inline DensityMatrix evolve_lindblad(const DeviceConfig& cfg, const FluxSchedule& s,
                                     const DensityMatrix& rho0, const NoiseModel& noise) {
  Dynamics d(cfg);
  require_same_space(rho0.space, d.space(), "evolve_lindblad");
  return DensityMatrix(rho0.space, d.evolve_density(s, rho0.matrix, noise));
}

}  // namespace tqec::pulse
