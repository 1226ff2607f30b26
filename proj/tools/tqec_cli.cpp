// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Every command writes its data files plus a JSON
// manifest into --out.
//
// Exit codes: 0 success, 2 usage or input error, 3 calibration failure,
// 4 numerical-invariant violation.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "tqec/cli/session.hpp"
#include "tqec/pulse/chevron.hpp"
#include "tqec/qec/experiments.hpp"

namespace fs = std::filesystem;
using namespace tqec;
using json = nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "tqec_out";
  std::string backend = "ideal";
  std::string calibration;
  std::string dephasing = "quasi-static";
  std::uint64_t seed = 1;
};

void add_common(CLI::App* sub, Common& c, bool with_backend) {
  sub->add_option("--config", c.config_path, "Device config JSON (default: $TQEC_CONFIG or built-in)");
  sub->add_option("--override", c.overrides, "KEY=VALUE on the config, dotted keys; repeatable");
  sub->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
  if (with_backend) {
    sub->add_option("--backend", c.backend, "ideal, pulse or lindblad")->capture_default_str();
    sub->add_option("--calibration", c.calibration, "CCPhase calibration JSON from the calibrate command");
    sub->add_option("--dephasing", c.dephasing, "lindblad dephasing: quasi-static or markovian")
        ->capture_default_str();
  }
}

// Shared set-up of one command invocation.
class Session {
 public:
  Session(std::string command, const Common& c) : c_(c) {
    m_.command = std::move(command);
    std::string path = c.config_path;
    if (path.empty()) {
      if (const char* env = std::getenv("TQEC_CONFIG")) path = env;
    }
    std::optional<json> file;
    if (!path.empty()) file = device::read_json_file(path);
    std::vector<cli::Override> ovs;
    for (const auto& s : c.overrides) ovs.push_back(cli::parse_override(s));
    auto r = cli::resolve_config(file, ovs);
    cfg_ = r.config;
    m_.config_path = path;
    m_.overrides = c.overrides;
    m_.out_dir = c.out_dir;
    m_.seed = c.seed;
    m_.effective_config = r.effective;
    fs::create_directories(c.out_dir);
  }

  const device::DeviceConfig& cfg() const { return cfg_; }
  cli::Manifest& manifest() { return m_; }

  qec::Backend backend() {
    const auto kind = qec::parse_backend(c_.backend);
    const auto deph = qec::parse_dephasing(c_.dephasing);
    m_.parameters["backend"] = qec::backend_name(kind);
    if (kind == qec::BackendKind::Lindblad) m_.parameters["dephasing"] = qec::dephasing_name(deph);
    if (kind == qec::BackendKind::Ideal) return qec::Backend::ideal(cfg_.timing);
    auto cal = cli::obtain_calibration(cfg_, c_.calibration);
    m_.parameters["calibration_source"] = cal.source;
    m_.parameters["ccphase_params"] = pulse::to_json(cal.params);
    auto b = qec::Backend::make(kind, cfg_, cal.schedule, deph);
    m_.results["ccphase_phases_deg"] = b.ccphase().phases.to_json_deg();
    m_.results["ccphase_max_leakage"] = b.ccphase().max_leakage;
    m_.results["ccphase_duration_ns"] = b.ccphase().duration_ns;
    return b;
  }

  template <class Writer>
  void output(const std::string& name, Writer&& w) {
    std::ostringstream os;
    w(os);
    cli::write_text(fs::path(c_.out_dir) / name, os.str());
    m_.outputs.push_back(name);
  }

  void finish() {
    cli::write_json(fs::path(c_.out_dir) / (m_.command + ".manifest.json"), m_.to_json());
    std::cout << m_.results.dump(2) << "\n";
  }

 private:
  Common c_;
  device::DeviceConfig cfg_;
  cli::Manifest m_;
};

std::vector<device::Occupation> parse_labels(const std::string& s) {
  std::vector<device::Occupation> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(device::parse_occupation(tok));
  if (out.empty()) throw std::invalid_argument("no state labels given");
  return out;
}

// Frequency window of one qubit, clipped below its maximum frequency.
std::pair<double, double> flux_window(const device::DeviceConfig& cfg, int q, double fmin, double fmax) {
  if (q < 1 || q > 3) throw std::invalid_argument("qubit must be 1..3");
  if (!(fmax > fmin)) throw std::invalid_argument("empty frequency range");
  const double top = device::omega01(cfg.transmons[q - 1], 0.0) - 1e-6;
  double a = device::flux_for_frequency(cfg, q, std::min(fmin, top));
  double b = device::flux_for_frequency(cfg, q, std::min(fmax, top));
  return {std::min(a, b), std::max(a, b)};
}

json crossing_json(const device::AvoidedCrossing& x) {
  return {{"flux", x.flux}, {"frequency_ghz", x.frequency_ghz}, {"gap_ghz", x.gap_ghz}};
}

CMatrix input_state(const std::string& s) {
  if (s.size() != 3) throw std::invalid_argument("input must have three characters from 0, 1, x, y");
  const auto in = tomography::single_qubit_inputs();
  CMatrix rho = CMatrix::Identity(1, 1);
  for (char c : s) {
    const std::string k = "01xy";
    const auto i = k.find(c);
    if (i == std::string::npos) throw std::invalid_argument(std::string("unknown input state '") + c + "'");
    rho = kron(rho, in[i]);
  }
  return rho;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-qubit error-correction simulator: spectroscopy, pulse-level gates, tomography and QEC sweeps"};
  app.set_version_flag("--version", TQEC_VERSION);
  app.require_subcommand(1);
  Common c;

  // spectrum
  auto* sp = app.add_subcommand("spectrum", "Labelled eigenenergies along a one-qubit frequency scan");
  add_common(sp, c, false);
  int sp_qubit = 2, sp_points = 201;
  double sp_fmin = 7.0, sp_fmax = 8.6;
  std::string sp_labels = "011,002,111,102";
  sp->add_option("--qubit", sp_qubit, "Scanned qubit")->capture_default_str();
  sp->add_option("--fmin", sp_fmin, "Lowest bare frequency of the scanned qubit, GHz")->capture_default_str();
  sp->add_option("--fmax", sp_fmax, "Highest bare frequency, GHz")->capture_default_str();
  sp->add_option("--points", sp_points, "Scan points")->capture_default_str();
  sp->add_option("--labels", sp_labels, "Comma-separated states; consecutive pairs are searched for crossings")
      ->capture_default_str();

  // chevron
  auto* ch = app.add_subcommand("chevron", "Population after square flux pulses of varying amplitude and duration");
  add_common(ch, c, false);
  int ch_qubit = 2, ch_apoints = 41, ch_tpoints = 161;
  double ch_fmin = 7.3, ch_fmax = 7.7, ch_tmax = 40;
  std::string ch_prepare = "011", ch_target = "002";
  ch->add_option("--qubit", ch_qubit, "Pulsed qubit")->capture_default_str();
  ch->add_option("--prepare", ch_prepare, "Initial bare state")->capture_default_str();
  ch->add_option("--target", ch_target, "Recorded bare state")->capture_default_str();
  ch->add_option("--fmin", ch_fmin, "Lowest pulse frequency of the qubit, GHz")->capture_default_str();
  ch->add_option("--fmax", ch_fmax, "Highest pulse frequency, GHz")->capture_default_str();
  ch->add_option("--amp-points", ch_apoints, "Amplitude points")->capture_default_str();
  ch->add_option("--t-max", ch_tmax, "Longest pulse, ns")->capture_default_str();
  ch->add_option("--t-points", ch_tpoints, "Duration points")->capture_default_str();

  // calibrate
  auto* ca = app.add_subcommand("calibrate", "Calibrate the pulse-level CCPhase gate");
  add_common(ca, c, false);

  // truth-table
  auto* tt = app.add_subcommand("truth-table", "Classical truth table of the CCNot");
  add_common(tt, c, true);

  // qpt
  auto* qp = app.add_subcommand("qpt", "Process tomography of the CCZ");
  add_common(qp, c, true);
  long qp_shots = 0;
  qp->add_option("--shots", qp_shots, "Finite-shot Pauli estimates (0 = exact)")->capture_default_str();
  qp->add_option("--seed", c.seed, "Seed of the shot sampler")->capture_default_str();

  // qec
  auto* qe = app.add_subcommand("qec", "Error-strength sweep of a repetition code");
  add_common(qe, c, true);
  std::string qe_code = "phase";
  bool qe_uncorrected = false, qe_stochastic = false;
  int qe_points = 21;
  qe->add_option("--code", qe_code, "phase or bit")->capture_default_str();
  qe->add_flag("--uncorrected", qe_uncorrected, "Baseline without encoding");
  qe->add_flag("--stochastic", qe_stochastic, "Stochastic flips instead of coherent rotations");
  qe->add_option("--points", qe_points, "Grid points, uniform in theta")->capture_default_str();

  // syndrome
  auto* sy = app.add_subcommand("syndrome", "Ancilla syndromes and single-qubit error curves");
  add_common(sy, c, true);
  std::string sy_code = "bit";
  int sy_curve_points = 13, sy_input = 0;
  sy->add_option("--code", sy_code, "phase or bit")->capture_default_str();
  sy->add_option("--curve-points", sy_curve_points, "Theta points of the error curves (0: none)")
      ->capture_default_str();
  sy->add_option("--curve-input", sy_input, "Input of the error curves: 0 |0>, 1 |1>, 2 |+x>, 3 |+y>")
      ->capture_default_str();

  // ghz
  auto* gz = app.add_subcommand("ghz", "Fidelity of the phase-flip encoding of |+x>");
  add_common(gz, c, true);

  // circuit
  auto* ci = app.add_subcommand("circuit", "Run a gate circuit file and report the output Pauli set");
  add_common(ci, c, true);
  std::string ci_file, ci_input = "000";
  ci->add_option("--file", ci_file, "Circuit: text (one gate per line) or .json")->required();
  ci->add_option("--input", ci_input, "Per-qubit input from 0, 1, x, y (Q1 first)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sp) {
      Session s("spectrum", c);
      if (sp_points < 2) throw std::invalid_argument("need at least 2 points");
      auto labels = parse_labels(sp_labels);
      auto [lo, hi] = flux_window(s.cfg(), sp_qubit, sp_fmin, sp_fmax);
      auto spec = device::labeled_spectrum_scan(s.cfg(), sp_qubit, pulse::linspace(lo, hi, sp_points), labels);
      s.manifest().parameters = {{"qubit", sp_qubit}, {"fmin_ghz", sp_fmin}, {"fmax_ghz", sp_fmax},
                                 {"points", sp_points}, {"labels", sp_labels}};
      json xs = json::array();
      for (std::size_t i = 0; i + 1 < labels.size(); i += 2) {
        json e = {{"pair", device::to_string(labels[i]) + "/" + device::to_string(labels[i + 1])}};
        try {
          e["crossing"] = crossing_json(device::find_avoided_crossing(s.cfg(), sp_qubit, labels[i], labels[i + 1], lo, hi));
        } catch (const std::domain_error&) {
          e["crossing"] = nullptr;
        }
        xs.push_back(e);
      }
      s.manifest().results["crossings"] = xs;
      s.output("spectrum.csv", [&](std::ostream& os) { spec.write_csv(os); });
      s.finish();
    } else if (*ch) {
      Session s("chevron", c);
      if (ch_apoints < 1 || ch_tpoints < 1 || !(ch_tmax >= 0)) throw std::invalid_argument("empty chevron range");
      auto [lo, hi] = flux_window(s.cfg(), ch_qubit, ch_fmin, ch_fmax);
      const auto prep = device::parse_occupation(ch_prepare), tgt = device::parse_occupation(ch_target);
      const Ket psi = Ket::basis(s.cfg().space(), prep.vec());
      auto map = pulse::chevron_scan(s.cfg(), psi.amplitudes, ch_qubit, pulse::linspace(lo, hi, ch_apoints),
                                     pulse::linspace(0, ch_tmax, ch_tpoints), tgt);
      s.manifest().parameters = {{"qubit", ch_qubit},  {"prepare", ch_prepare}, {"target", ch_target},
                                 {"fmin_ghz", ch_fmin}, {"fmax_ghz", ch_fmax},   {"amp_points", ch_apoints},
                                 {"t_max_ns", ch_tmax}, {"t_points", ch_tpoints}};
      // Oscillation at the crossing, when the window contains one.
      try {
        auto x = device::find_avoided_crossing(s.cfg(), ch_qubit, prep, tgt, lo, hi);
        auto one = pulse::chevron_scan(s.cfg(), psi.amplitudes, ch_qubit, {x.flux}, map.duration_ns, tgt);
        std::vector<double> y(map.duration_ns.size());
        for (std::size_t t = 0; t < y.size(); ++t) y[t] = one.population(0, static_cast<Eigen::Index>(t));
        s.manifest().results["crossing"] = crossing_json(x);
        if (ch_tpoints >= 4 && ch_tmax > 0) {
          const double nyq = 0.5 * (ch_tpoints - 1) / ch_tmax;
          s.manifest().results["resonant_frequency_ghz"] = pulse::dominant_frequency(map.duration_ns, y, 0.0, nyq);
        }
      } catch (const std::domain_error&) {
        s.manifest().results["crossing"] = nullptr;
      }
      s.output("chevron.csv", [&](std::ostream& os) { map.write_csv(os); });
      s.finish();
    } else if (*ca) {
      Session s("calibrate", c);
      auto cal = pulse::calibrate_ccphase(s.cfg());
      json doc = cli::calibration_document(cal, s.cfg());
      s.output("ccphase.json", [&](std::ostream& os) { os << doc.dump(2) << "\n"; });
      s.manifest().results = {{"phases_deg", cal.metrics.phases.to_json_deg()},
                              {"max_leakage", cal.metrics.max_leakage},
                              {"duration_ns", cal.metrics.duration_ns},
                              {"converged", cal.converged}};
      s.finish();
      if (!cal.converged) {
        std::cerr << "error: calibration did not converge (best attempt written)\n";
        return 3;
      }
    } else if (*tt) {
      Session s("truth-table", c);
      auto b = s.backend();
      auto t = qec::ccnot_truth_table(b);
      s.manifest().results["classical_fidelity"] = t.classical_fidelity;
      s.output("truth_table.csv", [&](std::ostream& os) { t.write_csv(os); });
      s.finish();
    } else if (*qp) {
      Session s("qpt", c);
      if (qp_shots < 0) throw std::invalid_argument("shots must be >= 0");
      auto b = s.backend();
      s.manifest().parameters["shots"] = qp_shots;
      gates::Circuit g;
      g.add(gates::CCPhase{});
      tomography::ChiMatrix chi;
      if (qp_shots == 0) {
        chi = qec::ccphase_chi(b);
      } else {
        std::mt19937_64 rng(c.seed);
        const tomography::PauliBasis basis(3);
        std::vector<CMatrix> outs;
        for (const auto& in : tomography::tomography_inputs(3)) {
          auto ps = tomography::sample_pauli_set(b.run(g, in), basis, qp_shots, rng);
          outs.push_back(tomography::density_from_pauli(ps, basis));
        }
        chi = tomography::chi_from_outputs(outs, 3);
      }
      const auto ideal = tomography::ideal_chi(gates::PhaseVector::ccz().unitary());
      s.manifest().results["fidelity_ccz"] = tomography::process_fidelity(chi, ideal);
      s.manifest().results["fidelity_phase_gate"] =
          tomography::process_fidelity(chi, tomography::ideal_chi(b.ccphase().phases.unitary()));
      s.manifest().results["chi_trace"] = std::real(chi.chi.trace());
      s.output("chi.json", [&](std::ostream& os) { os << chi.to_json().dump(2) << "\n"; });
      s.output("chi.csv", [&](std::ostream& os) { chi.write_csv(os); });
      s.finish();
    } else if (*qe) {
      Session s("qec", c);
      qec::QecRun run;
      run.code = gates::parse_code(qe_code);
      run.corrected = !qe_uncorrected;
      run.error_model = qe_stochastic ? qec::ErrorModel::Stochastic : qec::ErrorModel::Coherent;
      run.p_grid = qec::default_p_grid(qe_points);
      auto b = s.backend();
      auto sw = qec::run_qec_sweep(b, run);
      s.manifest().parameters["code"] = gates::code_name(run.code);
      s.manifest().parameters["corrected"] = run.corrected;
      s.manifest().parameters["error_model"] = qe_stochastic ? "stochastic" : "coherent";
      s.manifest().parameters["points"] = qe_points;
      if (sw.p.size() >= 6) {
        s.manifest().results["fit"] = qec::fit_cubic(sw.p, sw.process_fidelity, false).to_json();
        s.manifest().results["fit_with_linear"] = qec::fit_cubic(sw.p, sw.process_fidelity, true).to_json();
      }
      s.output("sweep.csv", [&](std::ostream& os) { sw.write_csv(os); });
      s.finish();
    } else if (*sy) {
      Session s("syndrome", c);
      const auto code = gates::parse_code(sy_code);
      if (sy_curve_points < 0) throw std::invalid_argument("curve points must be >= 0");
      auto b = s.backend();
      auto res = qec::syndrome_tomography(b, code);
      json r = json::array();
      for (const auto& x : res) {
        r.push_back({{"error", x.error}, {"expected", x.expected}, {"argmax", x.argmax}, {"fidelity", x.fidelity}});
      }
      s.manifest().parameters["code"] = gates::code_name(code);
      s.manifest().parameters["curve_points"] = sy_curve_points;
      s.manifest().parameters["curve_input"] = sy_input;
      s.manifest().results["syndromes"] = r;
      s.output("syndrome.csv", [&](std::ostream& os) {
        io::csv_row(os, std::vector<std::string>{"error", "expected", "argmax", "fidelity", "p00", "p01", "p10", "p11"});
        for (const auto& x : res) {
          std::vector<std::string> row{x.error, x.expected, x.argmax, io::num(x.fidelity)};
          for (int k = 0; k < 4; ++k) row.push_back(io::num(std::real(x.rho(k, k))));
          io::csv_row(os, row);
        }
      });
      if (sy_curve_points > 0) {
        const auto th = pulse::linspace(0, kPi, sy_curve_points);
        std::vector<qec::ErrorCurve> curves;
        for (int q = 1; q <= 3; ++q) curves.push_back(qec::single_qubit_error_curve(b, q, th, code, sy_input));
        s.output("error_curves.csv", [&](std::ostream& os) {
          io::csv_row(os, std::vector<std::string>{"qubit", "theta_rad", "corrected", "uncorrected"});
          for (const auto& e : curves)
            for (std::size_t i = 0; i < e.theta.size(); ++i)
              io::csv_row(os, {std::to_string(e.qubit), io::num(e.theta[i]), io::num(e.corrected[i]),
                               io::num(e.uncorrected[i])});
        });
      }
      s.finish();
    } else if (*gz) {
      Session s("ghz", c);
      auto b = s.backend();
      s.manifest().results["fidelity"] = qec::ghz_benchmark(b);
      s.finish();
    } else if (*ci) {
      Session s("circuit", c);
      const std::string text = slurp(ci_file);
      gates::Circuit circ = fs::path(ci_file).extension() == ".json" ? gates::circuit_from_json(json::parse(text))
                                                                     : gates::parse_circuit_text(text);
      auto b = s.backend();
      const CMatrix out = b.run(circ, input_state(ci_input));
      DensityMatrix(HilbertSpace::qubits(3), out).validate(1e-8);
      s.manifest().parameters["circuit"] = gates::to_json(circ);
      s.manifest().parameters["input"] = ci_input;
      s.manifest().parameters["duration_ns"] = b.duration_ns(circ);
      s.manifest().results["purity"] = std::real((out * out).trace());
      const auto ps = tomography::pauli_set(out, tomography::PauliBasis(3));
      s.output("pauli_set.csv", [&](std::ostream& os) { ps.write_csv(os); });
      s.finish();
    }
  } catch (const CalibrationError& e) {
    std::cerr << "calibration error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::logic_error& e) {  // invalid_argument, domain_error, out_of_range
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
