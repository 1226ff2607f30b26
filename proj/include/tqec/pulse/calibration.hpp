// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "tqec/device/spectrum.hpp"
#include "tqec/gates/phase_vector.hpp"
#include "tqec/pulse/evolve.hpp"

namespace tqec::pulse {

using device::AvoidedCrossing;
using device::Occupation;
using device::parse_occupation;
using gates::PhaseVector;

namespace detail {

inline double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) { hi = x2; x2 = x1; f2 = f1; x1 = hi - r * (hi - lo); f1 = f(x1); }
    else { lo = x1; x1 = x2; f1 = f2; x2 = lo + r * (hi - lo); f2 = f(x2); }
  }
  return 0.5 * (lo + hi);
}

// Root of wrap(f(x) - target) in [lo, hi]. A uniform scan brackets the first
// genuine sign change (not a 2 pi wrap), then bisection with secant steps.
inline double phase_root(const std::function<double(double)>& f, double lo, double hi, double target,
                         int scan = 12, double xtol = 1e-7) {
  auto g = [&](double x) { return wrap_angle(f(x) - target); };
  double xa = lo, ga = g(lo);
  if (ga == 0) return lo;
  for (int i = 1; i <= scan; ++i) {
    double xb = lo + (hi - lo) * i / scan;
    double gb = g(xb);
    if (gb == 0) return xb;
    if ((ga < 0) != (gb < 0) && std::abs(gb - ga) < kPi) {
      for (int it = 0; it < 100 && std::abs(xb - xa) > xtol; ++it) {
        double xm = xa - ga * (xb - xa) / (gb - ga);
        if (!(xm > std::min(xa, xb) && xm < std::max(xa, xb))) xm = 0.5 * (xa + xb);
        if (std::abs(xm - xa) < 0.1 * std::abs(xb - xa) || std::abs(xb - xm) < 0.1 * std::abs(xb - xa)) {
          xm = 0.5 * (xa + xb);
        }
        const double gm = g(xm);
        if (std::abs(gm) < 1e-10) return xm;
        if ((gm < 0) == (ga < 0)) { xa = xm; ga = gm; }
        else { xb = xm; gb = gm; }
      }
      return 0.5 * (xa + xb);
    }
    xa = xb;
    ga = gb;
  }
  throw CalibrationError("phase search: no root in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace detail

// Ramp of one qubit toward (or away from) an avoided crossing at fixed
// adiabaticity: the mixing angle theta = atan(gap/detuning)/2 advances at
// d(theta)/dt = kappa * 2 pi * splitting. Steps are at most max_step_ns.
inline void adiabatic_ramp(FluxSchedule& s, const DeviceConfig& cfg, const Flux& base, int qubit,
                           double f_from, double f_to, double f_cross, double gap, double kappa,
                           double max_step_ns = 0.25) {
  if (!(kappa > 0) || !(gap > 0)) throw std::invalid_argument("adiabatic_ramp: kappa and gap must be > 0");
  const double sgn = f_cross > f_from ? 1.0 : -1.0;
  const double d0 = sgn * (f_cross - f_from), d1 = sgn * (f_cross - f_to);
  if (d0 <= 0 || d1 <= 0) throw std::invalid_argument("adiabatic_ramp: ramp must stay on one side of the crossing");
  const double c0 = d0 / std::hypot(d0, gap), c1 = d1 / std::hypot(d1, gap);
  const double rate = 4.0 * kPi * kappa * gap;  // d(cos 2 theta)/dt
  const double T = std::abs(c0 - c1) / rate;
  if (T <= 0) return;
  const int n = std::max(1, static_cast<int>(std::ceil(T / max_step_ns)));
  for (int k = 0; k < n; ++k) {
    const double c = c0 + (c1 - c0) * (k + 0.5) / n;
    const double d = gap * c / std::sqrt(std::max(1e-300, 1.0 - c * c));
    s.hold(device::with_frequency(cfg, base, qubit, f_cross - sgn * d), T / n);
  }
}

// Duration of adiabatic_ramp between the two detunings.
inline double adiabatic_ramp_ns(double d0, double d1, double gap, double kappa) {
  return std::abs(d0 / std::hypot(d0, gap) - d1 / std::hypot(d1, gap)) / (4.0 * kPi * kappa * gap);
}

struct SwapCalibration {
  double freq_ghz = 0;     // bare omega01 of the swapped qubit during the pulse
  double flux = 0;
  double duration_ns = 0;  // flat top
  double rise_ns = 0;      // linear edge to and from the operating point
  double transfer = 0;     // mean population moved into the target states
  double returned = 0;     // worst population back home after two pulses
};

// Edge between the operating point and the swap point; zero rise is a
// sudden step.
inline void swap_edge(FluxSchedule& s, const DeviceConfig& cfg, double f_from, double f_to, double rise_ns) {
  linear_ramp(s, cfg, cfg.nominal_flux, 2, f_from, f_to, rise_ns, 0.05);
}

// One complete swap pulse starting and ending at the operating point.
inline void swap_pulse(FluxSchedule& s, const DeviceConfig& cfg, const SwapCalibration& sw) {
  const double f0 = cfg.operating_omega01_ghz[1];
  swap_edge(s, cfg, f0, sw.freq_ghz, sw.rise_ns);
  s.hold(device::with_frequency(cfg, cfg.nominal_flux, 2, sw.freq_ghz), sw.duration_ns);
  swap_edge(s, cfg, sw.freq_ghz, f0, sw.rise_ns);
}

// Return: residual after swap-in + swap-back (the stand-alone swap).
// Transfer: population landing in the `after` eigenbasis, for a swap that is
// followed by a sudden jump elsewhere (inside the CCPhase sequence).
enum class SwapObjective { Return, Transfer };

// Square pulse on Q2 swapping |011> -> |002> and |111> -> |102>. Nested
// golden-section search, amplitude outside and flat-top duration inside, of
// the population missing from |011> and |111> after swap-in + swap-back.
// That residual alone is blind to detuned partial swaps (they also return),
// so transfer below `min_transfer` is penalized. Transfer is scored in the
// eigenbasis of the point the pulse jumps to afterwards (`after`, typically
// the parking point).
inline SwapCalibration calibrate_swap(Dynamics& dyn, const AvoidedCrossing& crossing, const Flux& after,
                                      double rise_ns = 0, SwapObjective objective = SwapObjective::Return,
                                      double min_transfer = 0.995) {
  if (rise_ns < 0) throw std::invalid_argument("calibrate_swap: rise must be >= 0");
  const DeviceConfig& cfg = dyn.config();
  const HilbertSpace sp = dyn.space();
  const Eigen::Index dim = sp.total_dim();
  const auto& fr = dyn.frame();
  const double f0 = cfg.operating_omega01_ghz[1];
  const std::array<int, 2> src{3, 7};  // |011>, |111>
  const std::vector<Occupation> dst{parse_occupation("002"), parse_occupation("102")};
  const Eigensystem& ea = dyn.eig(after);
  auto ia = device::assign_labels(ea, sp, dst);
  CMatrix tgt(dim, 2), psi0(dim, 2);
  for (int k = 0; k < 2; ++k) {
    tgt.col(k) = ea.vectors.col(ia[k]).cast<cplx>();
    psi0.col(k) = fr.basis.col(src[k]);
  }

  // Edge propagators depend only on the amplitude.
  double edge_f = std::numeric_limits<double>::quiet_NaN();
  CMatrix up, down;
  auto edges = [&](double f) {
    if (f == edge_f) return;
    FluxSchedule a, b;
    swap_edge(a, cfg, f0, f, rise_ns);
    swap_edge(b, cfg, f, f0, rise_ns);
    up = dyn.evolve_states(a, CMatrix::Identity(dim, dim));
    down = dyn.evolve_states(b, CMatrix::Identity(dim, dim));
    edge_f = f;
  };
  auto flat = [&](double f, double t, const CMatrix& psi) -> CMatrix {
    const Eigensystem& es = dyn.eig(device::with_frequency(cfg, cfg.nominal_flux, 2, f));
    CVector ph = (es.energies.cast<cplx>() * cplx(0, -kTwoPi * t)).array().exp().matrix();
    return es.vectors.cast<cplx>() * (ph.asDiagonal() * (es.vectors.transpose().cast<cplx>() * psi));
  };
  auto transfer_at = [&](double f, double t) {
    edges(f);
    const CMatrix psi = flat(f, t, up * psi0);
    return 0.5 * (std::norm(tgt.col(0).dot(psi.col(0))) + std::norm(tgt.col(1).dot(psi.col(1))));
  };
  auto returned_at = [&](double f, double t) {
    edges(f);
    CMatrix psi = down * flat(f, t, up * psi0);
    psi = down * flat(f, t, up * psi);
    return std::min(std::norm(psi0.col(0).dot(psi.col(0))), std::norm(psi0.col(1).dot(psi.col(1))));
  };

  auto residual = [&](double f, double t) {
    if (objective == SwapObjective::Transfer) return 1.0 - transfer_at(f, t);
    return 1.0 - returned_at(f, t) + std::max(0.0, min_transfer - transfer_at(f, t));
  };
  const double gap = crossing.gap_ghz;
  auto best_t = [&](double f) {
    return detail::golden_min([&](double t) { return residual(f, t); }, 0.3 / gap, 0.75 / gap, 1e-5);
  };
  const double f = detail::golden_min([&](double x) { return residual(x, best_t(x)); },
                                      crossing.frequency_ghz - 0.5 * gap, crossing.frequency_ghz + 0.5 * gap, 1e-6);
  SwapCalibration out;
  out.freq_ghz = f;
  out.flux = device::flux_for_frequency(cfg, 2, f);
  out.duration_ns = best_t(f);
  out.rise_ns = rise_ns;
  out.transfer = transfer_at(f, out.duration_ns);
  out.returned = returned_at(f, out.duration_ns);
  return out;
}

inline SwapCalibration calibrate_swap(const DeviceConfig& cfg, const AvoidedCrossing& crossing, double park_ghz,
                                      double rise_ns = 0, SwapObjective objective = SwapObjective::Return) {
  Dynamics dyn(cfg);
  return calibrate_swap(dyn, crossing, device::with_frequency(cfg, cfg.nominal_flux, 2, park_ghz), rise_ns,
                        objective);
}

// Ramsey measurement of the conditional phase on `target` (1..3). `controls`
// is the 3-bit computational state with the target bit ignored. Phases are
// referenced to the operating-point frame, so an empty schedule gives 0.
inline double measure_phase(Dynamics& dyn, const FluxSchedule& s, int target, int controls) {
  const int bit = 1 << (3 - target);
  const int k0 = controls & ~bit, k1 = k0 | bit;
  const auto& fr = dyn.frame();
  CMatrix psi = (fr.basis.col(k0) + fr.basis.col(k1)) / std::sqrt(2.0);
  CMatrix out = dyn.evolve_states(s, psi);
  CVector a = fr.basis_at(s.duration_ns()).adjoint() * out.col(0);
  return std::arg(a(k1) / a(k0));
}

// The seven conditional phases from Ramsey measurements: the target-Q3 phase
// with controls (Q1,Q2) gives phi001 + a phi101 + b phi011 + ab phi111; Q2
// and Q1 targets supply phi010, phi100 and phi110.
inline PhaseVector ramsey_phase_vector(Dynamics& dyn, const FluxSchedule& s) {
  auto m = [&](int target, int controls) { return measure_phase(dyn, s, target, controls); };
  const double r00 = m(3, 0), r01 = m(3, 2), r10 = m(3, 4), r11 = m(3, 6);
  const double q2_0 = m(2, 0), q2_1 = m(2, 4);
  const double q1_0 = m(1, 0);
  PhaseVector v;
  v[1] = wrap_angle(r00);
  v[3] = wrap_angle(r01 - r00);
  v[5] = wrap_angle(r10 - r00);
  v[7] = wrap_angle(r11 - r10 - r01 + r00);
  v[2] = wrap_angle(q2_0);
  v[6] = wrap_angle(q2_1 - q2_0);
  v[4] = wrap_angle(q1_0);
  return v;
}

inline double measure_phase(const DeviceConfig& cfg, const FluxSchedule& s, int target, int controls) {
  Dynamics dyn(cfg);
  return measure_phase(dyn, s, target, controls);
}

// Parameters of the three-qubit conditional-phase pulse sequence.
struct CCPhaseParams {
  double swap_freq_ghz = 0, swap_ns = 0;   // Q2 swap |11x> -> |x02>
  double swap_rise_ns = 0;                 // edge on the operating-point side
  double park_freq_ghz = 0;                // Q2 parked above Q3 meanwhile
  double cross3_freq_ghz = 0, cross3_gap_ghz = 0;  // |102>/|003> seen by Q1
  double hold3_detuning_ghz = 0;           // closest approach of Q1 to it
  double hold3_ns = 0;
  double corr_cross_freq_ghz = 0, corr_cross_gap_ghz = 0;  // |110>/|020> seen by Q1
  double corr_freq_ghz = 0;                // Q1 target of the correction excursion
  double corr_hold_ns = 1.0;
  bool corr_refocus = true;                // pi pulses on Q2 around the correction
  double kappa = 0.04;                     // adiabaticity of the Q1 ramps
  double corr_kappa = 0.015;               // slower: the two short ramps interfere
  double max_step_ns = 0.25;
  std::array<double, 3> z_correction{0, 0, 0};  // final virtual Z, radians
};

inline nlohmann::json to_json(const CCPhaseParams& p) {
  return {{"swap_freq_ghz", p.swap_freq_ghz},   {"swap_ns", p.swap_ns},
          {"swap_rise_ns", p.swap_rise_ns},
          {"park_freq_ghz", p.park_freq_ghz},   {"cross3_freq_ghz", p.cross3_freq_ghz},
          {"cross3_gap_ghz", p.cross3_gap_ghz}, {"hold3_detuning_ghz", p.hold3_detuning_ghz},
          {"hold3_ns", p.hold3_ns},             {"corr_cross_freq_ghz", p.corr_cross_freq_ghz},
          {"corr_cross_gap_ghz", p.corr_cross_gap_ghz}, {"corr_freq_ghz", p.corr_freq_ghz},
          {"corr_hold_ns", p.corr_hold_ns},     {"corr_refocus", p.corr_refocus},
          {"kappa", p.kappa},                   {"corr_kappa", p.corr_kappa},
          {"max_step_ns", p.max_step_ns},
          {"z_correction_rad", p.z_correction}};
}

inline CCPhaseParams ccphase_params_from_json(const nlohmann::json& j) {
  CCPhaseParams p;
  p.swap_freq_ghz = j.at("swap_freq_ghz");
  p.swap_ns = j.at("swap_ns");
  p.swap_rise_ns = j.value("swap_rise_ns", 0.0);
  p.park_freq_ghz = j.at("park_freq_ghz");
  p.cross3_freq_ghz = j.at("cross3_freq_ghz");
  p.cross3_gap_ghz = j.at("cross3_gap_ghz");
  p.hold3_detuning_ghz = j.at("hold3_detuning_ghz");
  p.hold3_ns = j.at("hold3_ns");
  p.corr_cross_freq_ghz = j.at("corr_cross_freq_ghz");
  p.corr_cross_gap_ghz = j.at("corr_cross_gap_ghz");
  p.corr_freq_ghz = j.at("corr_freq_ghz");
  p.corr_hold_ns = j.at("corr_hold_ns");
  p.corr_refocus = j.at("corr_refocus");
  p.kappa = j.at("kappa");
  p.corr_kappa = j.at("corr_kappa");
  p.max_step_ns = j.at("max_step_ns");
  p.z_correction = j.at("z_correction_rad").get<std::array<double, 3>>();
  return p;
}

// Swap in, adiabatic Q1 excursion toward |102>/|003>, swap out, then a
// refocused Q1 excursion toward |110>/|020> and final virtual Z corrections.
inline FluxSchedule ccphase_schedule(const DeviceConfig& cfg, const CCPhaseParams& p) {
  const Flux op = cfg.nominal_flux;
  const double f1 = cfg.operating_omega01_ghz[0];
  const double f2 = cfg.operating_omega01_ghz[1];
  FluxSchedule s;
  swap_edge(s, cfg, f2, p.swap_freq_ghz, p.swap_rise_ns);
  s.hold(device::with_frequency(cfg, op, 2, p.swap_freq_ghz), p.swap_ns);
  const Flux park = device::with_frequency(cfg, op, 2, p.park_freq_ghz);
  const double f3 = p.cross3_freq_ghz - p.hold3_detuning_ghz;
  adiabatic_ramp(s, cfg, park, 1, f1, f3, p.cross3_freq_ghz, p.cross3_gap_ghz, p.kappa, p.max_step_ns);
  s.hold(device::with_frequency(cfg, park, 1, f3), p.hold3_ns);
  adiabatic_ramp(s, cfg, park, 1, f3, f1, p.cross3_freq_ghz, p.cross3_gap_ghz, p.kappa, p.max_step_ns);
  s.hold(device::with_frequency(cfg, op, 2, p.swap_freq_ghz), p.swap_ns);
  swap_edge(s, cfg, p.swap_freq_ghz, f2, p.swap_rise_ns);
  if (p.corr_freq_ghz > f1) {
    if (p.corr_refocus) s.rotate(2, Axis::X, kPi);
    adiabatic_ramp(s, cfg, op, 1, f1, p.corr_freq_ghz, p.corr_cross_freq_ghz, p.corr_cross_gap_ghz,
                   p.corr_kappa, p.max_step_ns);
    s.hold(device::with_frequency(cfg, op, 1, p.corr_freq_ghz), p.corr_hold_ns);
    adiabatic_ramp(s, cfg, op, 1, p.corr_freq_ghz, f1, p.corr_cross_freq_ghz, p.corr_cross_gap_ghz,
                   p.corr_kappa, p.max_step_ns);
    if (p.corr_refocus) s.rotate(2, Axis::X, -kPi);
  }
  for (int q = 0; q < 3; ++q) {
    if (p.z_correction[q] != 0) s.rotate(q + 1, Axis::Z, p.z_correction[q]);
  }
  return s;
}

// Gate figures of merit extracted from the dressed computational block.
struct GateMetrics {
  PhaseVector phases;
  std::array<double, 8> leakage{};  // 1 - sum_i |M_ij|^2 per input j
  double max_leakage = 0;
  double max_error = 0;             // worst 1 - |M_jj|^2, leakage included
  double duration_ns = 0;
  CMatrix block;
};

inline GateMetrics gate_metrics(Dynamics& dyn, const FluxSchedule& s) {
  GateMetrics m;
  m.block = dyn.computational_block(s);
  m.phases = PhaseVector::from_unitary(m.block);
  for (int j = 0; j < 8; ++j) {
    m.leakage[j] = std::max(0.0, 1.0 - m.block.col(j).squaredNorm());
    m.max_leakage = std::max(m.max_leakage, m.leakage[j]);
    m.max_error = std::max(m.max_error, 1.0 - std::norm(m.block(j, j)));
  }
  m.duration_ns = s.duration_ns();
  return m;
}

struct CCPhaseOptions {
  double kappa = 0.04;
  double corr_kappa = 0.015;
  double hold3_detuning_in_gaps = 0.8;       // closest approach, units of the gap
  std::vector<double> park_offsets_ghz{0.20, 0.25, 0.30};  // initial park above Q3
  double leakage_target = 1e-2;
  double corr_hold_ns = 1.0;
  double swap_rise_ns = 0;  // sudden; the swap is scored by transfer into the park basis
  int iterations = 4;
  double phase_tol_rad = 0.1 * kPi / 180.0;
};

struct CCPhaseCalibration {
  CCPhaseParams params;
  FluxSchedule schedule;
  GateMetrics metrics;
  SwapCalibration swap;
  AvoidedCrossing swap_crossing, crossing3, corr_crossing;
  bool converged = false;
  std::vector<std::string> log;
};

inline nlohmann::json to_json(const CCPhaseCalibration& c) {
  nlohmann::json j;
  j["params"] = to_json(c.params);
  j["schedule"] = to_json(c.schedule);
  j["phases_deg"] = c.metrics.phases.to_json_deg();
  j["leakage"] = c.metrics.leakage;
  j["max_leakage"] = c.metrics.max_leakage;
  j["max_error"] = c.metrics.max_error;
  j["duration_ns"] = c.metrics.duration_ns;
  j["swap"] = {{"freq_ghz", c.swap.freq_ghz}, {"duration_ns", c.swap.duration_ns},
               {"rise_ns", c.swap.rise_ns},   {"transfer", c.swap.transfer},
               {"returned", c.swap.returned}};
  j["crossings"] = {
      {"swap_011_002", {{"freq_ghz", c.swap_crossing.frequency_ghz}, {"gap_ghz", c.swap_crossing.gap_ghz}}},
      {"q1_102_003", {{"freq_ghz", c.crossing3.frequency_ghz}, {"gap_ghz", c.crossing3.gap_ghz}}},
      {"q1_110_020", {{"freq_ghz", c.corr_crossing.frequency_ghz}, {"gap_ghz", c.corr_crossing.gap_ghz}}}};
  j["converged"] = c.converged;
  j["log"] = c.log;
  return j;
}

namespace detail {

// One pass of the calibration loop starting from a given park frequency.
inline CCPhaseCalibration calibrate_from_park(Dynamics& dyn, double park0, const CCPhaseOptions& opt,
                                              const AvoidedCrossing& swap_x, const AvoidedCrossing& corr_x) {
  const DeviceConfig& cfg = dyn.config();
  CCPhaseCalibration c;
  c.swap_crossing = swap_x;
  c.corr_crossing = corr_x;
  CCPhaseParams& p = c.params;
  p.kappa = opt.kappa;
  p.corr_kappa = opt.corr_kappa;
  p.park_freq_ghz = park0;
  p.corr_hold_ns = opt.corr_hold_ns;
  p.corr_cross_freq_ghz = corr_x.frequency_ghz;
  p.corr_cross_gap_ghz = corr_x.gap_ghz;
  p.corr_freq_ghz = 0;  // no correction until phi110 is known
  const double f1 = cfg.operating_omega01_ghz[0];
  auto metrics = [&]() {
    CCPhaseParams q = p;
    q.z_correction = {0, 0, 0};
    return gate_metrics(dyn, ccphase_schedule(cfg, q));
  };
  auto phase = [&](int mask) { return metrics().phases[mask]; };
  char buf[200];

  for (int it = 0; it < opt.iterations; ++it) {
    const Flux park = device::with_frequency(cfg, cfg.nominal_flux, 2, p.park_freq_ghz);
    c.crossing3 = device::find_avoided_crossing_ghz(cfg, 1, parse_occupation("102"), parse_occupation("003"),
                                                    f1 + 0.3, std::min(p.park_freq_ghz, cfg.operating_omega01_ghz[2]) - 0.05, park);
    p.cross3_freq_ghz = c.crossing3.frequency_ghz;
    p.cross3_gap_ghz = c.crossing3.gap_ghz;
    p.hold3_detuning_ghz = opt.hold3_detuning_in_gaps * c.crossing3.gap_ghz;
    c.swap = calibrate_swap(dyn, swap_x, park, opt.swap_rise_ns, SwapObjective::Transfer);
    p.swap_freq_ghz = c.swap.freq_ghz;
    p.swap_ns = c.swap.duration_ns;
    p.swap_rise_ns = c.swap.rise_ns;

    // phi111 = pi through the flat-top duration.
    const double rate = 0.5 * (std::hypot(p.hold3_detuning_ghz, p.cross3_gap_ghz) - p.hold3_detuning_ghz);
    p.hold3_ns = phase_root([&](double t) { p.hold3_ns = t; return phase(7); }, 0.0, 1.0 / rate + 1.0, kPi,
                            24, 1e-6);
    // phi011 = 0 through the park frequency.
    const double span = std::min(0.04, 0.6 / std::max(1.0, 2 * (p.swap_ns + p.swap_rise_ns) + p.hold3_ns));
    const double pc = p.park_freq_ghz;
    p.park_freq_ghz = phase_root([&](double f) { p.park_freq_ghz = f; return phase(3); }, pc - span, pc + span,
                                 0.0, 12, 1e-9);
    // phi110 = 0 through the amplitude of the refocused correction.
    const double fmax = corr_x.frequency_ghz - opt.hold3_detuning_in_gaps * corr_x.gap_ghz;
    try {
      p.corr_refocus = true;
      p.corr_freq_ghz = phase_root([&](double f) { p.corr_freq_ghz = f; return phase(6); }, f1 + 1e-3, fmax, 0.0,
                                   16, 1e-9);
    } catch (const CalibrationError&) {
      p.corr_refocus = false;
      p.corr_freq_ghz = phase_root([&](double f) { p.corr_freq_ghz = f; return phase(6); }, f1 + 1e-3, fmax, 0.0,
                                   16, 1e-9);
    }
    GateMetrics m = metrics();
    std::snprintf(buf, sizeof(buf),
                  "iter %d: park %.5f hold %.3f ns corr %.5f%s phi111 %.3f phi011 %.3f phi110 %.3f deg leak %.4g",
                  it, p.park_freq_ghz, p.hold3_ns, p.corr_freq_ghz, p.corr_refocus ? "" : " (no refocus)",
                  m.phases[7] * 180 / kPi, m.phases[3] * 180 / kPi, m.phases[6] * 180 / kPi, m.max_leakage);
    c.log.emplace_back(buf);
    c.converged = std::abs(wrap_angle(m.phases[7] - kPi)) < opt.phase_tol_rad &&
                  std::abs(m.phases[3]) < opt.phase_tol_rad && std::abs(m.phases[6]) < opt.phase_tol_rad;
    if (c.converged && it > 0) break;
  }
  GateMetrics m = metrics();
  p.z_correction = {-m.phases[4], -m.phases[2], -m.phases[1]};
  c.schedule = ccphase_schedule(cfg, p);
  c.metrics = gate_metrics(dyn, c.schedule);
  return c;
}

}  // namespace detail

// Full calibration of the pulse-level CCPhase: locate the crossings, then
// iterate swap, phi111, phi011 and phi110 tuning; single-qubit phases are
// removed by virtual Z. Among the park starting points the run with the
// smallest worst-case leakage is kept.
inline CCPhaseCalibration calibrate_ccphase(Dynamics& dyn, const CCPhaseOptions& opt = {}) {
  const DeviceConfig& cfg = dyn.config();
  const auto& w = cfg.operating_omega01_ghz;
  // A device without the expected level crossings cannot be calibrated.
  AvoidedCrossing swap_x, corr_x;
  try {
    swap_x = device::find_avoided_crossing_ghz(cfg, 2, parse_occupation("011"), parse_occupation("002"), w[1] + 0.05,
                                               w[2] - 0.05);
    corr_x = device::find_avoided_crossing_ghz(cfg, 1, parse_occupation("110"), parse_occupation("020"), w[0] + 0.05,
                                               w[1] - 0.05);
  } catch (const std::logic_error& e) {
    throw CalibrationError(std::string("calibrate_ccphase: crossing search failed: ") + e.what());
  }
  // Converged first, then leakage within target, then smallest worst-case
  // population error.
  auto rank = [&](const CCPhaseCalibration& c) {
    return std::make_tuple(!c.converged, c.metrics.max_leakage > opt.leakage_target, c.metrics.max_error);
  };
  auto better = [&](const CCPhaseCalibration& a, const CCPhaseCalibration& b) { return rank(a) < rank(b); };
  CCPhaseCalibration best;
  bool have = false;
  std::vector<std::string> errors;
  for (double off : opt.park_offsets_ghz) {
    try {
      auto c = detail::calibrate_from_park(dyn, w[2] + off, opt, swap_x, corr_x);
      if (!have || better(c, best)) {
        best = std::move(c);
        have = true;
      }
    } catch (const CalibrationError& e) {
      errors.emplace_back(e.what());
    } catch (const std::logic_error& e) {
      errors.emplace_back(e.what());
    }
  }
  if (!have) {
    std::string msg = "calibrate_ccphase: all starting points failed";
    for (const auto& e : errors) msg += "; " + e;
    throw CalibrationError(msg);
  }
  return best;
}

inline CCPhaseCalibration calibrate_ccphase(const DeviceConfig& cfg, const CCPhaseOptions& opt = {}) {
  Dynamics dyn(cfg);
  return calibrate_ccphase(dyn, opt);
}

}  // namespace tqec::pulse
