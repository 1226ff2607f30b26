// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "tqec/device/config.hpp"
#include "tqec/gates/codes.hpp"
#include "tqec/pulse/calibration.hpp"

namespace tqec::qec {

using gates::Circuit;
using gates::PhaseVector;

enum class BackendKind { Ideal, Pulse, Lindblad };

// How T2 enters the gate-level idle channel.
//  QuasiStatic: a random static detuning per qubit and run (Gaussian, the
//               usual reading of a Ramsey T2*), averaged exactly by
//               Gauss-Hermite quadrature. Coherence decays as
//               exp(-t/2T1 - (sigma t)^2/2), matching exp(-1) at t = T2.
//  Markovian:   white-noise dephasing, coherence exp(-t/T2).
enum class Dephasing { QuasiStatic, Markovian };

inline Dephasing parse_dephasing(const std::string& s) {
  if (s == "quasi-static") return Dephasing::QuasiStatic;
  if (s == "markovian") return Dephasing::Markovian;
  throw std::invalid_argument("unknown dephasing model '" + s + "' (use quasi-static or markovian)");
}

inline std::string dephasing_name(Dephasing d) { return d == Dephasing::QuasiStatic ? "quasi-static" : "markovian"; }

// Detuning spread (rad/ns) giving coherence exp(-1) at T2 on top of the
// T1 contribution. Times in microseconds.
inline double quasi_static_sigma(double t1_us, double t2_us) {
  const double t1 = t1_us * 1e3, t2 = t2_us * 1e3;
  return std::sqrt(std::max(0.0, 2.0 * (1.0 - t2 / (2.0 * t1)))) / t2;
}

// Nodes and weights for the expectation over a standard normal variable
// (Golub-Welsch on the Hermite Jacobi matrix).
inline std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: need n >= 1");
  RMatrix j = RMatrix::Zero(n, n);
  for (int i = 1; i < n; ++i) j(i, i - 1) = j(i - 1, i) = std::sqrt(i / 2.0);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(j);
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    x[i] = std::sqrt(2.0) * es.eigenvalues()(i);
    w[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
  return {x, w};
}

inline BackendKind parse_backend(const std::string& s) {
  if (s == "ideal") return BackendKind::Ideal;
  if (s == "pulse") return BackendKind::Pulse;
  if (s == "lindblad") return BackendKind::Lindblad;
  throw std::invalid_argument("unknown backend '" + s + "' (use ideal, pulse or lindblad)");
}

inline std::string backend_name(BackendKind k) {
  switch (k) {
    case BackendKind::Ideal: return "ideal";
    case BackendKind::Pulse: return "pulse";
    default: return "lindblad";
  }
}

// The hardware CCPhase as seen by the gate layer: its computational block
// (unitary backend) and, when noise is on, its 64x64 channel.
struct HardwareCCPhase {
  CMatrix block;    // 8x8, not unitary when the pulse leaks
  CMatrix superop;  // 64x64 (see pulse::vec8); empty without noise
  PhaseVector phases;
  double duration_ns = 0;
  double max_leakage = 0;
  bool pure_dephasing = true;  // channel includes the Markovian T2 part
};

// With noise and without pure dephasing, the channel carries relaxation only
// (T2 = 2 T1); the quasi-static backend adds its detuning on top.
inline HardwareCCPhase hardware_ccphase(pulse::Dynamics& dyn, const pulse::FluxSchedule& s, bool with_noise,
                                        bool pure_dephasing = true) {
  HardwareCCPhase h;
  auto m = pulse::gate_metrics(dyn, s);
  h.block = m.block;
  h.phases = m.phases;
  h.duration_ns = m.duration_ns;
  h.max_leakage = m.max_leakage;
  h.pure_dephasing = pure_dephasing;
  if (with_noise) {
    auto noise = pulse::NoiseModel::from_config(dyn.config());
    if (!pure_dephasing)
      for (int q = 0; q < 3; ++q) noise.t2_us[q] = 2 * noise.t1_us[q];
    h.superop = dyn.computational_channel(s, noise);
  }
  return h;
}

// Executes gate circuits on three-qubit density matrices.
//  ideal:    exact unitaries, z rotations folded into frames.
//  pulse:    CCPhase replaced by the calibrated pulse-level block; population
//            leaked out of the subspace returns as I/8.
//  lindblad: as pulse but with the noisy pulse-level CCPhase channel, and
//            every other gate followed by idle decoherence for its duration;
//            dephasing per the Dephasing model.
// Single-qubit rotations on distinct qubits share one time slot; z rotations
// are virtual and take no time.
class Backend {
 public:
  static Backend ideal(device::GateTiming t = {}) {
    Backend b;
    b.timing_ = t;
    b.ccphase_.phases = PhaseVector::ccz();
    b.ccphase_.block = b.ccphase_.phases.unitary();
    return b;
  }

  static Backend pulse(HardwareCCPhase g, device::GateTiming t = {}) {
    Backend b;
    b.kind_ = BackendKind::Pulse;
    b.timing_ = t;
    b.ccphase_ = std::move(g);
    return b;
  }

  // t1/t2 in microseconds per qubit. For QuasiStatic the CCPhase channel
  // must come without pure dephasing.
  static Backend lindblad(HardwareCCPhase g, std::array<double, 3> t1_us, std::array<double, 3> t2_us,
                          device::GateTiming t = {}, Dephasing d = Dephasing::QuasiStatic, int nodes = 6) {
    if (g.superop.rows() != 64) throw std::invalid_argument("lindblad backend: CCPhase channel missing");
    if (d == Dephasing::QuasiStatic && g.pure_dephasing) {
      throw std::invalid_argument("lindblad backend: quasi-static dephasing needs a relaxation-only CCPhase channel");
    }
    if (d == Dephasing::Markovian && !g.pure_dephasing) {
      throw std::invalid_argument("lindblad backend: markovian dephasing needs the full CCPhase channel");
    }
    for (int q = 0; q < 3; ++q) {
      if (!(t1_us[q] > 0 && t2_us[q] > 0)) throw std::invalid_argument("lindblad backend: T1, T2 must be > 0");
      if (t2_us[q] > 2 * t1_us[q] * (1 + 1e-12)) throw std::invalid_argument("lindblad backend: T2 exceeds 2 T1");
    }
    Backend b;
    b.kind_ = BackendKind::Lindblad;
    b.timing_ = t;
    b.ccphase_ = std::move(g);
    b.t1_ = t1_us;
    b.t2_ = t2_us;
    b.dephasing_ = d;
    if (d == Dephasing::QuasiStatic) {
      auto [x, w] = gauss_hermite(nodes);
      b.nodes_ = x;
      b.weights_ = w;
      for (int q = 0; q < 3; ++q) b.sigma_[q] = quasi_static_sigma(t1_us[q], t2_us[q]);
    }
    return b;
  }

  // Builds the requested backend for a device, running the pulse-level
  // simulation of an already calibrated CCPhase schedule.
  static Backend make(BackendKind k, const device::DeviceConfig& cfg, const pulse::FluxSchedule& ccphase,
                      Dephasing d = Dephasing::QuasiStatic) {
    if (k == BackendKind::Ideal) return ideal(cfg.timing);
    pulse::Dynamics dyn(cfg);
    auto hw = hardware_ccphase(dyn, ccphase, k == BackendKind::Lindblad, d == Dephasing::Markovian);
    if (k == BackendKind::Pulse) return pulse(std::move(hw), cfg.timing);
    return lindblad(std::move(hw), cfg.t1_us, cfg.t2_star_us, cfg.timing, d);
  }

  BackendKind kind() const { return kind_; }
  Dephasing dephasing() const { return dephasing_; }
  const device::GateTiming& timing() const { return timing_; }
  const HardwareCCPhase& ccphase() const { return ccphase_; }

  CMatrix run(const Circuit& c, const CMatrix& rho) const {
    c.validate();
    if (c.n_qubits != 3 || rho.rows() != 8 || rho.cols() != 8) throw std::invalid_argument("backend: three-qubit circuits only");
    if (kind_ == BackendKind::Ideal) {
      CMatrix u = gates::circuit_unitary(c);
      return u * rho * u.adjoint();
    }
    if (kind_ != BackendKind::Lindblad || dephasing_ == Dephasing::Markovian) return run_fixed(c, rho, {0, 0, 0});
    // Average over the static detunings of the three qubits.
    const std::size_t n = nodes_.size();
    CMatrix acc = CMatrix::Zero(8, 8);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          const std::array<double, 3> d{sigma_[0] * nodes_[i], sigma_[1] * nodes_[j], sigma_[2] * nodes_[k]};
          acc += weights_[i] * weights_[j] * weights_[k] * run_fixed(c, rho, d);
        }
    return acc;
  }

  // Wall-clock length of a circuit under this backend's timing model.
  double duration_ns(const Circuit& c) const {
    double t = 0;
    std::set<int> slot;
    auto close_slot = [&]() {
      if (!slot.empty()) t += timing_.rotation_ns;
      slot.clear();
    };
    for (const auto& op : c.ops) {
      if (auto r = std::get_if<gates::Rotation>(&op)) {
        if (r->axis == Axis::Z) continue;
        if (slot.count(r->qubit)) close_slot();
        slot.insert(r->qubit);
        continue;
      }
      close_slot();
      if (auto g = std::get_if<gates::Barrier>(&op)) t += g->idle_ns;
      else if (std::holds_alternative<gates::CPhase>(op)) t += timing_.cphase_ns;
      else if (std::holds_alternative<gates::CCPhase>(op)) t += ccphase_.duration_ns;
      else t += duration_ns(gates::ccnot_circuit());
    }
    close_slot();
    return t;
  }

  // Decoherence of all three qubits idling for t ns: amplitude damping
  // 1 - exp(-t/T1), then either Markovian dephasing (coherences decay as
  // exp(-t/T2)) or the precession of a fixed detuning (rad/ns). No-op
  // except for the lindblad backend.
  void idle(CMatrix& rho, double t_ns, const std::array<double, 3>& detuning = {0, 0, 0}) const {
    if (kind_ != BackendKind::Lindblad || t_ns <= 0) return;
    const bool markov = dephasing_ == Dephasing::Markovian;
    for (int q = 1; q <= 3; ++q) {
      const double t1 = t1_[q - 1] * 1e3, t2 = t2_[q - 1] * 1e3;
      const double g = 1.0 - std::exp(-t_ns / t1);
      const cplx lam = markov ? cplx(std::exp(-t_ns / t2 + 0.5 * t_ns / t1), 0)
                              : std::exp(cplx(0, -detuning[q - 1] * t_ns));  // |1> picks up exp(-i d t)
      const int bit = 1 << (3 - q);
      CMatrix out = rho;
      for (int k = 0; k < 8; ++k) {
        for (int l = 0; l < 8; ++l) {
          const bool ek = k & bit, el = l & bit;
          if (ek && el) out(k, l) = (1 - g) * rho(k, l);
          else if (ek != el) out(k, l) = std::sqrt(1 - g) * (ek ? lam : std::conj(lam)) * rho(k, l);
          else out(k, l) = rho(k, l) + g * rho(k | bit, l | bit);
        }
      }
      rho = out;
    }
  }

 private:
  Backend() = default;

  static void unitary(CMatrix& rho, const CMatrix& u) { rho = u * rho * u.adjoint(); }

  // One run with fixed static detunings (rad/ns) per qubit.
  CMatrix run_fixed(const Circuit& c, CMatrix rho, const std::array<double, 3>& detuning) const {
    std::set<int> slot;  // qubits rotated in the open time slot
    auto close_slot = [&]() {
      if (!slot.empty()) idle(rho, timing_.rotation_ns, detuning);
      slot.clear();
    };
    for (const auto& op : c.ops) {
      if (auto r = std::get_if<gates::Rotation>(&op)) {
        if (r->axis != Axis::Z) {
          if (slot.count(r->qubit)) close_slot();
          slot.insert(r->qubit);
        }
        unitary(rho, gates::gate_unitary(op, 3));
        continue;
      }
      close_slot();
      if (auto g = std::get_if<gates::Barrier>(&op)) {
        idle(rho, g->idle_ns, detuning);
      } else if (std::holds_alternative<gates::CPhase>(op)) {
        unitary(rho, gates::gate_unitary(op, 3));
        idle(rho, timing_.cphase_ns, detuning);
      } else if (auto g = std::get_if<gates::CCPhase>(&op)) {
        hardware_gate(rho, g->phases, detuning);
      } else {
        const auto& t = std::get<gates::CCNot>(op);
        if (!(t.target == 2 && std::min(t.control1, t.control2) == 1 && std::max(t.control1, t.control2) == 3)) {
          throw std::invalid_argument("backend: hardware CCNot needs controls Q1, Q3 and target Q2");
        }
        rho = run_fixed(gates::ccnot_circuit(), rho, detuning);
      }
    }
    close_slot();
    return rho;
  }


  // Only the nominal CCZ is available as a hardware gate; any phase error of
  // the calibrated pulse (phi101 in particular) comes with it.
  void hardware_gate(CMatrix& rho, const PhaseVector& nominal, const std::array<double, 3>& detuning) const {
    const CMatrix ideal = PhaseVector::ccz().unitary();
    if ((nominal.unitary() - ideal).cwiseAbs().maxCoeff() > 1e-6) {
      throw std::invalid_argument("backend: only the CCZ phase gate has a hardware implementation");
    }
    CMatrix out;
    if (kind_ == BackendKind::Lindblad) {
      out = pulse::unvec8(ccphase_.superop * pulse::vec8(rho));
    } else {
      out = ccphase_.block * rho * ccphase_.block.adjoint();
    }
    const double lost = std::real(rho.trace() - out.trace());
    rho = out + (lost / 8.0) * CMatrix::Identity(8, 8);
    if (detuning != std::array<double, 3>{0, 0, 0}) {
      const double t = ccphase_.duration_ns;
      unitary(rho, kron(kron(rotation_z(-detuning[0] * t), rotation_z(-detuning[1] * t)), rotation_z(-detuning[2] * t)));
    }
  }

  BackendKind kind_ = BackendKind::Ideal;
  device::GateTiming timing_;
  HardwareCCPhase ccphase_;
  std::array<double, 3> t1_{}, t2_{};
  Dephasing dephasing_ = Dephasing::Markovian;
  std::vector<double> nodes_, weights_;
  std::array<double, 3> sigma_{};
};

}  // namespace tqec::qec
