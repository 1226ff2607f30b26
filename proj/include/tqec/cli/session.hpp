// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "tqec/device/config.hpp"
#include "tqec/pulse/calibration.hpp"

#ifndef TQEC_VERSION
#define TQEC_VERSION "0.0.0"
#endif
#ifndef TQEC_DATA_DIR
#define TQEC_DATA_DIR "data"
#endif

namespace tqec::cli {

using json = nlohmann::json;

// KEY=VALUE with a dotted key into the config document; array elements are
// addressed by index ("transmons.1.g_ghz", "t1_us.0"). VALUE is read as JSON
// when it parses, else as a string.
struct Override {
  std::string path;
  json value;
  std::string text;
};

inline Override parse_override(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
    throw std::invalid_argument("override '" + s + "': expected KEY=VALUE");
  }
  Override o;
  o.text = s;
  o.path = s.substr(0, eq);
  const std::string v = s.substr(eq + 1);
  o.value = json::parse(v, nullptr, false);
  if (o.value.is_discarded()) o.value = v;
  return o;
}

namespace detail {

inline std::vector<std::string> split_path(const std::string& p) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto dot = p.find('.', start);
    out.push_back(p.substr(start, dot - start));
    if (out.back().empty()) throw std::invalid_argument("override: empty key component in '" + p + "'");
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return out;
}

inline bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return true;
  if (a.is_array() && b.is_array()) return a.size() == b.size();
  return a.type() == b.type();
}

}  // namespace detail

// Replaces an existing entry; unknown keys, out-of-range indices and type
// changes are rejected.
inline void apply_override(json& doc, const Override& o) {
  json* node = &doc;
  for (const auto& key : detail::split_path(o.path)) {
    if (node->is_object()) {
      if (!node->contains(key)) throw std::invalid_argument("override: unknown config key '" + o.path + "'");
      node = &(*node)[key];
    } else if (node->is_array()) {
      std::size_t idx = 0, used = 0;
      try {
        idx = std::stoul(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != key.size() || idx >= node->size()) {
        throw std::invalid_argument("override: bad index '" + key + "' in '" + o.path + "'");
      }
      node = &(*node)[idx];
    } else {
      throw std::invalid_argument("override: '" + o.path + "' descends into a scalar");
    }
  }
  if (!detail::same_kind(*node, o.value)) {
    throw std::invalid_argument("override: '" + o.text + "' changes the type of the entry");
  }
  *node = o.value;
}

// Entries from which the operating point (nominal flux) is derived.
inline bool moves_operating_point(const std::string& path) {
  for (const char* k : {"transmons", "operating_omega01_ghz", "charge_cutoff"}) {
    const std::string s(k);
    if (path == s || path.rfind(s + ".", 0) == 0) return true;
  }
  return false;
}

struct ConfigResult {
  device::DeviceConfig config;
  json effective;  // full document after overrides
};

// Starts from the given document (or the built-in defaults), completes it,
// and applies overrides. The operating point is re-derived when an override
// moves it, unless the flux itself is overridden too.
inline ConfigResult resolve_config(const std::optional<json>& file, const std::vector<Override>& overrides) {
  json doc = device::to_json(file ? device::config_from_json(*file) : device::default_config());
  bool rederive = false, flux_given = false;
  for (const auto& o : overrides) {
    apply_override(doc, o);
    rederive = rederive || moves_operating_point(o.path);
    flux_given = flux_given || o.path.rfind("nominal_flux", 0) == 0 || o.path.rfind("flux_offset", 0) == 0;
  }
  if (rederive && !flux_given) {
    doc.erase("nominal_flux");
    doc.erase("flux_offset");
  }
  ConfigResult r;
  r.config = device::config_from_json(doc);
  r.effective = device::to_json(r.config);
  return r;
}

// Structural equality with a relative tolerance on numbers.
inline bool json_close(const json& a, const json& b, double rtol = 1e-12) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    return std::abs(x - y) <= rtol * std::max({1.0, std::abs(x), std::abs(y)});
  }
  if (a.type() != b.type() || a.size() != b.size()) return false;
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it)
      if (!b.contains(it.key()) || !json_close(it.value(), b.at(it.key()), rtol)) return false;
    return true;
  }
  if (a.is_array()) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!json_close(a[i], b[i], rtol)) return false;
    return true;
  }
  return a == b;
}

inline std::string default_calibration_path() { return std::string(TQEC_DATA_DIR) + "/default_ccphase.json"; }

// A calibration document as written by the calibrate command: the
// calibration report plus the device it was made for.
inline json calibration_document(const pulse::CCPhaseCalibration& c, const device::DeviceConfig& cfg) {
  json j = pulse::to_json(c);
  j["device"] = device::to_json(cfg);
  return j;
}

inline bool calibration_matches(const json& doc, const device::DeviceConfig& cfg) {
  return doc.contains("device") && json_close(doc.at("device"), device::to_json(cfg));
}

struct LoadedCalibration {
  pulse::CCPhaseParams params;
  pulse::FluxSchedule schedule;
  std::string source;  // file path, or "computed"
  json report;
};

// Explicit file: must match the device. Otherwise the shipped calibration is
// used when it was made for this device, and a fresh calibration is run as a
// last resort.
inline LoadedCalibration obtain_calibration(const device::DeviceConfig& cfg, const std::string& explicit_path = "",
                                            const std::string& fallback_path = default_calibration_path()) {
  LoadedCalibration out;
  auto from_doc = [&](const json& doc, const std::string& src) {
    out.params = pulse::ccphase_params_from_json(doc.at("params"));
    out.schedule = pulse::ccphase_schedule(cfg, out.params);
    out.source = src;
    out.report = doc;
    out.report.erase("device");
  };
  if (!explicit_path.empty()) {
    json doc = device::read_json_file(explicit_path);
    if (!calibration_matches(doc, cfg)) {
      throw std::invalid_argument("calibration '" + explicit_path + "' was made for a different device");
    }
    from_doc(doc, explicit_path);
    return out;
  }
  if (!fallback_path.empty() && std::filesystem::exists(fallback_path)) {
    json doc = device::read_json_file(fallback_path);
    if (calibration_matches(doc, cfg)) {
      from_doc(doc, fallback_path);
      return out;
    }
  }
  auto cal = pulse::calibrate_ccphase(cfg);
  if (!cal.converged) throw CalibrationError("CCPhase calibration did not converge");
  from_doc(calibration_document(cal, cfg), "computed");
  return out;
}

// Echo of everything that determined a command's outputs.
struct Manifest {
  std::string command;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::uint64_t seed = 0;
  json effective_config;
  json parameters = json::object();
  json results = json::object();
  std::vector<std::string> outputs;

  json to_json() const {
    return {{"command", command},
            {"config_path", config_path},
            {"overrides", overrides},
            {"output_dir", out_dir},
            {"seed", seed},
            {"version", TQEC_VERSION},
            {"effective_config", effective_config},
            {"parameters", parameters},
            {"results", results},
            {"outputs", outputs}};
  }
};

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::invalid_argument("cannot write '" + p.string() + "'");
  os << s;
}

// Sorted keys, two-space indent, trailing newline.
inline void write_json(const std::filesystem::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

}  // namespace tqec::cli
