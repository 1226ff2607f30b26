// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tqec/core/linalg.hpp"
#include "tqec/device/hamiltonian.hpp"

namespace tqec::pulse {

using device::Flux;
using json = nlohmann::json;

using tqec::Axis;
using tqec::axis_char;
using tqec::parse_axis;

// Piecewise-constant flux: hold `flux` for `duration_ns`.
struct Segment {
  double duration_ns = 0;
  Flux flux{};
};

// Instantaneous rotation in the operating-point frame, applied once the
// first `after_segment` segments have run.
struct RotationEvent {
  std::size_t after_segment = 0;
  int qubit = 1;
  Axis axis = Axis::X;
  double angle = 0;  // radians
};

struct FluxSchedule {
  std::vector<Segment> segments;
  std::vector<RotationEvent> rotations;

  double duration_ns() const {
    double t = 0;
    for (const auto& s : segments) t += s.duration_ns;
    return t;
  }

  void hold(const Flux& f, double ns) {
    if (ns < 0) throw std::invalid_argument("schedule: negative duration");
    if (ns > 0) segments.push_back({ns, f});
  }

  void rotate(int qubit, Axis axis, double angle) {
    rotations.push_back({segments.size(), qubit, axis, angle});
  }

  void append(const FluxSchedule& o) {
    const std::size_t off = segments.size();
    segments.insert(segments.end(), o.segments.begin(), o.segments.end());
    for (auto r : o.rotations) {
      r.after_segment += off;
      rotations.push_back(r);
    }
  }

  void validate() const {
    for (const auto& s : segments) {
      if (!(s.duration_ns >= 0) || !std::isfinite(s.duration_ns)) {
        throw std::invalid_argument("schedule: invalid segment duration");
      }
      for (double x : s.flux) {
        if (!std::isfinite(x)) throw std::invalid_argument("schedule: non-finite flux");
      }
    }
    std::size_t last = 0;
    for (const auto& r : rotations) {
      if (r.after_segment > segments.size()) throw std::invalid_argument("schedule: rotation past end");
      if (r.after_segment < last) throw std::invalid_argument("schedule: rotations out of order");
      if (r.qubit < 1 || r.qubit > 3) throw std::invalid_argument("schedule: rotation qubit must be 1..3");
      last = r.after_segment;
    }
  }
};

// Linear interpolation of one qubit's bare frequency, discretised into steps
// no longer than max_step_ns (midpoint sampling).
inline void linear_ramp(FluxSchedule& s, const device::DeviceConfig& cfg, Flux base, int qubit,
                        double f_from, double f_to, double ramp_ns, double max_step_ns = 0.25) {
  if (ramp_ns <= 0) return;
  const int n = std::max(1, static_cast<int>(std::ceil(ramp_ns / max_step_ns)));
  for (int k = 0; k < n; ++k) {
    const double x = (k + 0.5) / n;
    s.hold(device::with_frequency(cfg, base, qubit, f_from + x * (f_to - f_from)), ramp_ns / n);
  }
}

inline json to_json(const FluxSchedule& s) {
  json j;
  j["segments"] = json::array();
  for (const auto& g : s.segments) j["segments"].push_back({{"duration_ns", g.duration_ns}, {"flux", g.flux}});
  j["rotations"] = json::array();
  for (const auto& r : s.rotations) {
    j["rotations"].push_back({{"after_segment", r.after_segment},
                              {"qubit", r.qubit},
                              {"axis", std::string(1, axis_char(r.axis))},
                              {"angle_rad", r.angle}});
  }
  return j;
}

inline FluxSchedule schedule_from_json(const json& j) {
  FluxSchedule s;
  for (const auto& g : j.at("segments")) {
    s.segments.push_back({g.at("duration_ns").get<double>(), g.at("flux").get<Flux>()});
  }
  if (j.contains("rotations")) {
    for (const auto& r : j.at("rotations")) {
      s.rotations.push_back({r.at("after_segment").get<std::size_t>(), r.at("qubit").get<int>(),
                             parse_axis(r.at("axis").get<std::string>()), r.at("angle_rad").get<double>()});
    }
  }
  s.validate();
  return s;
}

}  // namespace tqec::pulse
