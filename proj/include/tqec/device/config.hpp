// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tqec/device/transmon.hpp"

namespace tqec::device {

using json = nlohmann::json;

struct GateTiming {
  double rotation_ns = 10.0;  // resonant single-qubit pulse
  double cphase_ns = 20.0;    // two-qubit conditional phase
};

struct DeviceConfig {
  double cavity_freq_ghz = 9.070;
  int cavity_levels = 3;
  std::array<TransmonParams, 3> transmons{};
  std::array<double, 3> t1_us{1.3, 0.9, 0.7};
  std::array<double, 3> t2_star_us{0.5, 0.6, 1.3};
  std::array<double, 3> operating_omega01_ghz{6.0, 7.0, 7.85};
  std::array<double, 3> nominal_flux{0.0, 0.0, 0.0};
  FluxMap flux_map{};
  GateTiming timing{};
  int charge_cutoff = 20;

  void validate() const {
    if (!(cavity_freq_ghz > 0)) throw std::invalid_argument("config: cavity_freq_ghz must be > 0");
    if (cavity_levels < 1) throw std::invalid_argument("config: cavity_levels must be >= 1");
    for (int q = 0; q < 3; ++q) {
      const auto& t = transmons[q];
      const std::string n = "config: transmon " + std::to_string(q + 1);
      if (t.levels < 2) throw std::invalid_argument(n + " levels must be >= 2");
      if (!(t.ec_ghz > 0) || !(t.ej_max_ghz > 0)) throw std::invalid_argument(n + " Ej/Ec must be > 0");
      if (t.g_ghz < 0) throw std::invalid_argument(n + " g must be >= 0");
      if (!(t1_us[q] > 0) || !(t2_star_us[q] > 0)) throw std::invalid_argument(n + " T1/T2 must be > 0");
      if (t2_star_us[q] > 2 * t1_us[q] * (1 + 1e-12)) throw std::invalid_argument(n + " requires T2 <= 2 T1");
    }
    if (charge_cutoff < 5) throw std::invalid_argument("config: charge_cutoff must be >= 5");
    if (timing.rotation_ns < 0 || timing.cphase_ns < 0) throw std::invalid_argument("config: negative gate time");
  }

  HilbertSpace space() const {
    return HilbertSpace({"Q1", "Q2", "Q3", "C"},
                        {transmons[0].levels, transmons[1].levels,
                         transmons[2].levels, cavity_levels});
  }
};

// Sets nominal_flux (and the flux-map offsets, so that zero bias is the
// operating point) such that each bare omega01 hits its target.
inline void calibrate_operating_point(DeviceConfig& cfg) {
  for (int q = 0; q < 3; ++q) {
    cfg.nominal_flux[q] = flux_for_omega01(cfg.transmons[q], cfg.operating_omega01_ghz[q]);
  }
  cfg.flux_map.offset = Eigen::Vector3d(cfg.nominal_flux[0], cfg.nominal_flux[1], cfg.nominal_flux[2]);
}

inline DeviceConfig default_config() {
  DeviceConfig c;
  c.transmons[0] = {33.0, 0.33, 0.22, 4};
  c.transmons[1] = {35.0, 0.33, 0.22, 4};
  c.transmons[2] = {26.0, 0.33, 0.22, 4};
  calibrate_operating_point(c);
  c.validate();
  return c;
}

namespace detail {
template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}
}  // namespace detail

inline json to_json(const DeviceConfig& c) {
  json j;
  j["cavity_freq_ghz"] = c.cavity_freq_ghz;
  j["cavity_levels"] = c.cavity_levels;
  j["transmons"] = json::array();
  for (const auto& t : c.transmons) {
    j["transmons"].push_back({{"ej_max_ghz", t.ej_max_ghz},
                              {"ec_ghz", t.ec_ghz},
                              {"g_ghz", t.g_ghz},
                              {"levels", t.levels}});
  }
  j["t1_us"] = c.t1_us;
  j["t2_star_us"] = c.t2_star_us;
  j["operating_omega01_ghz"] = c.operating_omega01_ghz;
  j["nominal_flux"] = c.nominal_flux;
  json m = json::array();
  for (int r = 0; r < 3; ++r) {
    m.push_back({c.flux_map.matrix(r, 0), c.flux_map.matrix(r, 1), c.flux_map.matrix(r, 2)});
  }
  j["flux_crosstalk"] = m;
  j["flux_offset"] = {c.flux_map.offset(0), c.flux_map.offset(1), c.flux_map.offset(2)};
  j["gate_timing"] = {{"rotation_ns", c.timing.rotation_ns}, {"cphase_ns", c.timing.cphase_ns}};
  j["charge_cutoff"] = c.charge_cutoff;
  return j;
}

// Missing keys keep their defaults. If nominal_flux is absent it is derived
// from operating_omega01_ghz.
inline DeviceConfig config_from_json(const json& j) {
  DeviceConfig c = default_config();
  static const char* known[] = {"cavity_freq_ghz", "cavity_levels", "transmons", "t1_us",
                                "t2_star_us", "operating_omega01_ghz", "nominal_flux",
                                "flux_crosstalk", "flux_offset", "gate_timing", "charge_cutoff"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw std::invalid_argument("config: unknown key '" + it.key() + "'");
  }
  detail::read_opt(j, "cavity_freq_ghz", c.cavity_freq_ghz);
  detail::read_opt(j, "cavity_levels", c.cavity_levels);
  if (j.contains("transmons")) {
    const auto& ts = j.at("transmons");
    if (!ts.is_array() || ts.size() != 3) throw std::invalid_argument("config: need 3 transmons");
    for (int q = 0; q < 3; ++q) {
      detail::read_opt(ts[q], "ej_max_ghz", c.transmons[q].ej_max_ghz);
      detail::read_opt(ts[q], "ec_ghz", c.transmons[q].ec_ghz);
      detail::read_opt(ts[q], "g_ghz", c.transmons[q].g_ghz);
      detail::read_opt(ts[q], "levels", c.transmons[q].levels);
    }
  }
  detail::read_opt(j, "t1_us", c.t1_us);
  detail::read_opt(j, "t2_star_us", c.t2_star_us);
  detail::read_opt(j, "operating_omega01_ghz", c.operating_omega01_ghz);
  if (j.contains("flux_crosstalk")) {
    auto m = j.at("flux_crosstalk").get<std::array<std::array<double, 3>, 3>>();
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) c.flux_map.matrix(r, k) = m[r][k];
  }
  if (j.contains("gate_timing")) {
    detail::read_opt(j.at("gate_timing"), "rotation_ns", c.timing.rotation_ns);
    detail::read_opt(j.at("gate_timing"), "cphase_ns", c.timing.cphase_ns);
  }
  detail::read_opt(j, "charge_cutoff", c.charge_cutoff);
  if (j.contains("nominal_flux")) {
    c.nominal_flux = j.at("nominal_flux").get<std::array<double, 3>>();
    c.flux_map.offset = Eigen::Vector3d(c.nominal_flux[0], c.nominal_flux[1], c.nominal_flux[2]);
  } else {
    calibrate_operating_point(c);
  }
  if (j.contains("flux_offset")) {
    auto o = j.at("flux_offset").get<std::array<double, 3>>();
    c.flux_map.offset = Eigen::Vector3d(o[0], o[1], o[2]);
  }
  c.validate();
  return c;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("invalid JSON in '" + path + "': " + e.what());
  }
}

inline DeviceConfig load_config(const std::string& path) {
  return config_from_json(read_json_file(path));
}

}  // namespace tqec::device
