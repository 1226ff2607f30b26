// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tqec/qec/backend.hpp"
#include "tqec/tomography/process.hpp"

namespace tqec::qec {

using gates::Code;

// Reduced density matrix of the listed qubits (1..3), in the listed order.
inline CMatrix reduce_qubits(const CMatrix& rho, const std::vector<int>& keep) {
  if (rho.rows() != 8) throw std::invalid_argument("reduce_qubits: three-qubit state expected");
  std::set<int> uniq(keep.begin(), keep.end());
  if (keep.empty() || uniq.size() != keep.size() || *uniq.begin() < 1 || *uniq.rbegin() > 3) {
    throw std::invalid_argument("reduce_qubits: qubits must be distinct and in 1..3");
  }
  const int nk = static_cast<int>(keep.size());
  CMatrix out = CMatrix::Zero(1 << nk, 1 << nk);
  auto key = [&](int s, bool kept_part) {
    int k = 0;
    if (kept_part) {
      for (int q : keep) k = 2 * k + ((s >> (3 - q)) & 1);
    } else {
      for (int q = 1; q <= 3; ++q)
        if (!uniq.count(q)) k = 2 * k + ((s >> (3 - q)) & 1);
    }
    return k;
  };
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (key(i, false) == key(j, false)) out(key(i, true), key(j, true)) += rho(i, j);
  return out;
}

// Q2 carries the logical state, the ancillas start in |0>.
inline CMatrix embed_logical(const CMatrix& rho2) {
  CMatrix g = CMatrix::Zero(2, 2);
  g(0, 0) = 1;
  return kron(kron(g, rho2), g);
}

enum class ErrorModel { Coherent, Stochastic };

struct QecRun {
  Code code = Code::PhaseFlip;
  bool corrected = true;
  ErrorModel error_model = ErrorModel::Coherent;
  std::vector<double> p_grid;
};

// p = sin^2(theta/2) for n thetas uniform on [0, pi].
inline std::vector<double> default_p_grid(int n = 21) {
  if (n < 2) throw std::invalid_argument("p grid: need >= 2 points");
  std::vector<double> p;
  for (int i = 0; i < n; ++i) {
    const double s = std::sin(0.5 * kPi * i / (n - 1));
    p.push_back(i == n - 1 ? 1.0 : s * s);
  }
  return p;
}

inline double theta_of_p(double p) { return 2.0 * std::asin(std::sqrt(p)); }

struct SweepResult {
  std::vector<double> p;
  std::vector<double> process_fidelity;
  RMatrix state_fidelity;  // [input (0, 1, +x, +y), point]

  void write_csv(std::ostream& os) const {
    io::csv_row(os, std::vector<std::string>{"p", "f_process", "f_state_0", "f_state_1", "f_state_x", "f_state_y"});
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto c = static_cast<Eigen::Index>(i);
      io::csv_row(os, std::vector<double>{p[i], process_fidelity[i], state_fidelity(0, c), state_fidelity(1, c),
                                          state_fidelity(2, c), state_fidelity(3, c)});
    }
  }
};

// Uncorrected reference: the error acts on Q2 alone, padded with idling so
// the procedure lasts as long as the corrected one.
inline Circuit baseline_circuit(Code code, double theta, double idle_ns) {
  Circuit c;
  if (theta != 0) c.add(gates::Rotation{2, code == Code::PhaseFlip ? Axis::Z : Axis::Y, theta});
  if (idle_ns > 0) c.add(gates::Barrier{idle_ns});
  return c;
}

// Logical channel on Q2 at one error strength: weighted circuits applied to
// the embedded input, reduced back to Q2.
inline CMatrix logical_output(const Backend& b, const QecRun& run, double p, const CMatrix& in2) {
  const std::vector<int> all{1, 2, 3};
  std::vector<std::pair<double, Circuit>> branches;
  if (run.corrected) {
    if (run.error_model == ErrorModel::Coherent) {
      branches.emplace_back(1.0, gates::qec_circuit(run.code, all, theta_of_p(p)));
    } else {
      for (const auto& [w, flipped] : gates::flip_branches(all, p))
        if (w > 0) branches.emplace_back(w, gates::qec_circuit(run.code, flipped, kPi));
    }
  } else {
    const double pad = b.duration_ns(gates::qec_circuit(run.code, all, 0.0));
    if (run.error_model == ErrorModel::Coherent) {
      branches.emplace_back(1.0, baseline_circuit(run.code, theta_of_p(p), pad));
    } else {
      if (p < 1) branches.emplace_back(1 - p, baseline_circuit(run.code, 0.0, pad));
      if (p > 0) branches.emplace_back(p, baseline_circuit(run.code, kPi, pad));
    }
  }
  CMatrix out = CMatrix::Zero(2, 2);
  for (const auto& [w, c] : branches) out += w * reduce_qubits(b.run(c, embed_logical(in2)), {2});
  return out;
}

inline SweepResult run_qec_sweep(const Backend& b, const QecRun& run) {
  if (run.p_grid.empty()) throw std::invalid_argument("qec sweep: empty p grid");
  for (std::size_t i = 0; i < run.p_grid.size(); ++i) {
    const double p = run.p_grid[i];
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("qec sweep: p outside [0,1]");
    if (i > 0 && p < run.p_grid[i - 1]) throw std::invalid_argument("qec sweep: p grid must be sorted");
  }
  const auto inputs = tomography::single_qubit_inputs();
  const auto ideal = tomography::ideal_chi(CMatrix::Identity(2, 2));
  SweepResult r;
  r.p = run.p_grid;
  r.state_fidelity.resize(4, static_cast<Eigen::Index>(run.p_grid.size()));
  for (std::size_t i = 0; i < run.p_grid.size(); ++i) {
    std::vector<CMatrix> outs;
    for (int k = 0; k < 4; ++k) {
      outs.push_back(logical_output(b, run, run.p_grid[i], inputs[k]));
      r.state_fidelity(k, static_cast<Eigen::Index>(i)) = std::real((inputs[k] * outs.back()).trace());
    }
    r.process_fidelity.push_back(tomography::process_fidelity(tomography::chi_from_outputs(outs, 1), ideal));
  }
  return r;
}

struct CubicFit {
  std::array<double, 4> c{};   // f = c0 + c1 p + c2 p^2 + c3 p^3
  std::array<double, 4> se{};  // standard errors, 0 for a fixed term
  bool linear_term_allowed = false;

  nlohmann::json to_json() const {
    return {{"c", c}, {"stderr", se}, {"linear_term_allowed", linear_term_allowed}};
  }
};

// Least squares with standard errors from sigma^2 (X^T X)^-1, sigma^2 the
// residual variance.
inline CubicFit fit_cubic(const std::vector<double>& p, const std::vector<double>& f, bool allow_linear) {
  if (p.size() != f.size()) throw std::invalid_argument("fit_cubic: length mismatch");
  if (p.size() < 6) throw std::invalid_argument("fit_cubic: need at least 6 points");
  std::vector<int> powers{0, 2, 3};
  if (allow_linear) powers = {0, 1, 2, 3};
  const auto n = static_cast<Eigen::Index>(p.size());
  const auto k = static_cast<Eigen::Index>(powers.size());
  RMatrix X(n, k);
  RVector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) X(i, j) = std::pow(p[static_cast<std::size_t>(i)], powers[static_cast<std::size_t>(j)]);
    y(i) = f[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<RMatrix> qr(X);
  if (qr.rank() < k) throw std::invalid_argument("fit_cubic: rank-deficient design (too few distinct p)");
  RVector beta = qr.solve(y);
  const RVector res = y - X * beta;
  const double s2 = n > k ? res.squaredNorm() / static_cast<double>(n - k) : 0.0;
  const RMatrix cov = s2 * (X.transpose() * X).inverse();
  CubicFit out;
  out.linear_term_allowed = allow_linear;
  for (Eigen::Index j = 0; j < k; ++j) {
    out.c[static_cast<std::size_t>(powers[static_cast<std::size_t>(j)])] = beta(j);
    out.se[static_cast<std::size_t>(powers[static_cast<std::size_t>(j)])] = std::sqrt(std::max(0.0, cov(j, j)));
  }
  return out;
}

// Ancilla register after encode, full flip, decode. Reported as (Q3, Q1), so
// the labels read 00, 10, 01, 11 for no error and errors on Q3, Q1, Q2.
struct SyndromeResult {
  std::string error;     // "none", "Q1", "Q2", "Q3"
  std::string expected;  // ideal syndrome label
  CMatrix rho;           // 4x4 ancilla state, (Q3, Q1) order
  double fidelity = 0;   // population of the expected label
  std::string argmax;    // most populated label
};

inline std::string syndrome_label(int k) { return std::string{static_cast<char>('0' + (k >> 1)), static_cast<char>('0' + (k & 1))}; }

inline std::vector<SyndromeResult> syndrome_tomography(const Backend& b, Code code = Code::BitFlip,
                                                       const CMatrix& input = CMatrix()) {
  CMatrix in2 = input.size() ? input : tomography::single_qubit_inputs()[0];
  const std::vector<std::pair<std::string, std::vector<int>>> cases{
      {"none", {}}, {"Q3", {3}}, {"Q1", {1}}, {"Q2", {2}}};
  const std::array<int, 4> expected{0, 2, 1, 3};
  std::vector<SyndromeResult> out;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    Circuit c = gates::qec_circuit(code, cases[i].second, kPi, PhaseVector::ccz(), false);
    SyndromeResult s;
    s.error = cases[i].first;
    s.rho = reduce_qubits(b.run(c, embed_logical(in2)), {3, 1});
    s.expected = syndrome_label(expected[i]);
    s.fidelity = std::real(s.rho(expected[i], expected[i]));
    int best = 0;
    for (int k = 1; k < 4; ++k)
      if (std::real(s.rho(k, k)) > std::real(s.rho(best, best))) best = k;
    s.argmax = syndrome_label(best);
    out.push_back(std::move(s));
  }
  return out;
}

struct ErrorCurve {
  int qubit = 2;
  int input = 0;  // index into single_qubit_inputs()
  std::vector<double> theta;
  std::vector<double> corrected, uncorrected;  // fidelity to the prepared state
};

// A single error of angle theta on one qubit; "uncorrected" runs the same
// encode/decode without the CCNot. The CCNot flips Q2 about x, so every
// correctable error decodes to an x flip of Q2 and a +x input would not see
// it: the default input is |0>, the state the flip moves furthest.
inline ErrorCurve single_qubit_error_curve(const Backend& b, int qubit, const std::vector<double>& thetas,
                                           Code code = Code::BitFlip, int input = 0) {
  if (qubit < 1 || qubit > 3) throw std::invalid_argument("error curve: qubit must be 1..3");
  if (input < 0 || input > 3) throw std::invalid_argument("error curve: input must be 0..3");
  const CMatrix in = tomography::single_qubit_inputs()[static_cast<std::size_t>(input)];
  ErrorCurve e;
  e.qubit = qubit;
  e.input = input;
  e.theta = thetas;
  for (double th : thetas) {
    for (bool corr : {true, false}) {
      Circuit c = gates::qec_circuit(code, {qubit}, th, PhaseVector::ccz(), corr);
      const double f = std::real((in * reduce_qubits(b.run(c, embed_logical(in)), {2})).trace());
      (corr ? e.corrected : e.uncorrected).push_back(f);
    }
  }
  return e;
}

// Phase-flip encoding of +x: fidelity of the three-qubit output to the ideal
// GHZ-class code state.
inline double ghz_benchmark(const Backend& b) {
  const CMatrix in = embed_logical(tomography::single_qubit_inputs()[2]);
  const Circuit enc = gates::encode_circuit(Code::PhaseFlip);
  const CMatrix u = gates::circuit_unitary(enc);
  const CMatrix ideal = u * in * u.adjoint();
  return std::real((ideal * b.run(enc, in)).trace());
}

// Truth table of the CCNot (controls Q1, Q3, target Q2). Each basis input is
// prepared from |000> with pi pulses, so preparation shares the backend's
// noise.
inline tomography::TruthTable ccnot_truth_table(const Backend& b) {
  std::vector<int> intended{0, 1, 2, 3, 4, 7, 6, 5};
  const Circuit ccnot = gates::ccnot_circuit();
  tomography::TruthTable t;
  t.table = RMatrix::Zero(8, 8);
  CMatrix ground = CMatrix::Zero(8, 8);
  ground(0, 0) = 1;
  for (int i = 0; i < 8; ++i) {
    Circuit c;
    for (int q = 1; q <= 3; ++q)
      if ((i >> (3 - q)) & 1) c.add(gates::rx(q, kPi));
    c.append(ccnot);
    CMatrix out = b.run(c, ground);
    for (int j = 0; j < 8; ++j) t.table(i, j) = std::real(out(j, j));
    t.classical_fidelity += t.table(i, intended[static_cast<std::size_t>(i)]) / 8.0;
  }
  return t;
}

// Three-qubit process tomography of the (hardware) CCZ.
inline tomography::ChiMatrix ccphase_chi(const Backend& b) {
  Circuit c;
  c.add(gates::CCPhase{});
  return tomography::process_tomography([&](const CMatrix& rho) { return b.run(c, rho); }, 3);
}

}  // namespace tqec::qec
