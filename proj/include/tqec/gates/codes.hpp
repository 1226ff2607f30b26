// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tqec/gates/circuit.hpp"

namespace tqec::gates {

enum class Code { PhaseFlip, BitFlip };

inline Code parse_code(const std::string& s) {
  if (s == "phase" || s == "phase-flip") return Code::PhaseFlip;
  if (s == "bit" || s == "bit-flip") return Code::BitFlip;
  throw std::invalid_argument("unknown code '" + s + "' (use phase or bit)");
}
inline std::string code_name(Code c) { return c == Code::PhaseFlip ? "phase-flip" : "bit-flip"; }

// Toffoli with controls Q1, Q3 and target Q2 built from a diagonal phase gate:
// Ry(pi/2) . CCPhase . Ry(-pi/2) as an operator product, i.e. the -pi/2 pulse
// comes first in time. Exact CCNot when phi101 = 0.
inline Circuit ccnot_circuit(const PhaseVector& pv = PhaseVector::ccz()) {
  if (std::abs(wrap_angle(pv.at("111") - kPi)) > 1e-6) {
    throw std::invalid_argument("ccnot_circuit: phi111 must be pi");
  }
  for (const char* l : {"001", "010", "100", "011", "110"}) {
    if (std::abs(pv.at(l)) > 1e-6) throw std::invalid_argument(std::string("ccnot_circuit: phi") + l + " must be 0");
  }
  Circuit c;
  c.add(ry(2, -kPi / 2)).add(CCPhase{pv}).add(ry(2, kPi / 2));
  return c;
}

// Entangling core shared by both codes: pi/2 on the ancillas, then CZ(Q1,Q2)
// and CZ(Q2,Q3). Q2 carries the protected state.
inline Circuit encode_core() {
  Circuit c;
  c.add(ry(1, kPi / 2)).add(ry(3, kPi / 2)).add(CPhase{1, 2, 3}).add(CPhase{2, 3, 3});
  return c;
}

// Code-specific rotations applied after the core.
inline Circuit code_rotations(Code code) {
  Circuit c;
  if (code == Code::PhaseFlip) {
    c.add(ry(2, kPi / 2));
  } else {
    c.add(ry(1, -kPi / 2)).add(ry(3, -kPi / 2)).add(rz(2, kPi / 2));
  }
  return c;
}

inline Circuit inverse(const Circuit& c) {
  Circuit out;
  out.n_qubits = c.n_qubits;
  for (auto it = c.ops.rbegin(); it != c.ops.rend(); ++it) {
    if (auto r = std::get_if<Rotation>(&*it)) {
      out.add(Rotation{r->qubit, r->axis, -r->angle});
    } else if (std::holds_alternative<CPhase>(*it) || std::holds_alternative<CCNot>(*it) ||
               std::holds_alternative<Barrier>(*it)) {
      out.add(*it);
    } else {
      PhaseVector pv = std::get<CCPhase>(*it).phases;
      for (int s = 1; s < 8; ++s) pv[s] = wrap_angle(-pv[s]);
      out.add(CCPhase{pv});
    }
  }
  return out;
}

inline Circuit encode_circuit(Code code) {
  Circuit c = encode_core();
  c.append(code_rotations(code));
  return c;
}

inline Circuit decode_circuit(Code code) { return inverse(encode_circuit(code)); }

// Where and how a rotation error of the protected kind enters each qubit.
// Phase code: z rotations on the encoded state. Bit code: y rotation of Q2 on
// the encoded state; the ancilla flips, sandwiched between the CPhase-to-CNot
// pulses, compile to z rotations placed before the code rotations.
struct ErrorSlot {
  Axis axis;
  bool before_code_rotations;
};

inline ErrorSlot error_slot(Code code, int qubit) {
  if (code == Code::PhaseFlip) return {Axis::Z, false};
  if (qubit == 2) return {Axis::Y, false};
  return {Axis::Z, true};
}

// Inserts rotation errors of angle theta about `axis` on `qubits` at position
// `pos` of the op list.
inline Circuit apply_error(const Circuit& c, std::size_t pos, Axis axis, double theta,
                           const std::vector<int>& qubits) {
  if (pos > c.ops.size()) throw std::invalid_argument("apply_error: position past end");
  if (!std::isfinite(theta)) throw std::invalid_argument("apply_error: non-finite angle");
  Circuit out;
  out.n_qubits = c.n_qubits;
  out.ops.assign(c.ops.begin(), c.ops.begin() + static_cast<long>(pos));
  if (theta != 0) {
    for (int q : qubits) out.add(Rotation{q, axis, theta});
  }
  out.ops.insert(out.ops.end(), c.ops.begin() + static_cast<long>(pos), c.ops.end());
  out.validate();
  return out;
}

// Stochastic flips with independent probability p on each listed qubit:
// every subset of flipped qubits with weight p^k (1-p)^(n-k).
inline std::vector<std::pair<double, std::vector<int>>> flip_branches(const std::vector<int>& qubits, double p) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("flip_branches: p must lie in [0,1]");
  const std::size_t n = qubits.size();
  std::vector<std::pair<double, std::vector<int>>> out;
  for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
    double w = 1;
    std::vector<int> flipped;
    for (std::size_t i = 0; i < n; ++i) {
      if ((m >> i) & 1) {
        w *= p;
        flipped.push_back(qubits[i]);
      } else {
        w *= 1 - p;
      }
    }
    out.emplace_back(w, flipped);
  }
  return out;
}

// Encode, rotation errors of angle theta on `error_qubits`, decode. The
// correcting CCNot is appended when `correct` is set. Returns the circuit.
inline Circuit qec_circuit(Code code, const std::vector<int>& error_qubits, double theta,
                           const PhaseVector& ccphase = PhaseVector::ccz(), bool correct = true) {
  Circuit c = encode_core();
  for (int q : error_qubits) {
    auto s = error_slot(code, q);
    if (s.before_code_rotations && theta != 0) c.add(Rotation{q, s.axis, theta});
  }
  c.append(code_rotations(code));
  for (int q : error_qubits) {
    auto s = error_slot(code, q);
    if (!s.before_code_rotations && theta != 0) c.add(Rotation{q, s.axis, theta});
  }
  c.append(decode_circuit(code));
  if (correct) c.append(ccnot_circuit(ccphase));
  return c;
}

}  // namespace tqec::gates
