// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tqec/core/linalg.hpp"
#include "tqec/gates/phase_vector.hpp"

namespace tqec::gates {

struct Rotation {
  int qubit = 1;
  Axis axis = Axis::X;
  double angle = 0;  // radians
};

// Phase of pi on the two-qubit basis state `state` of (a, b); state uses two
// bits with `a` as the high bit, so 3 ("11") is the usual CZ.
struct CPhase {
  int a = 1, b = 2;
  int state = 3;
};

struct CCPhase {
  PhaseVector phases = PhaseVector::ccz();
};

struct CCNot {
  int control1 = 1, control2 = 3, target = 2;
};

struct Barrier {
  double idle_ns = 0;
};

using GateOp = std::variant<Rotation, CPhase, CCPhase, CCNot, Barrier>;

struct Circuit {
  int n_qubits = 3;
  std::vector<GateOp> ops;

  Circuit& add(GateOp op) {
    ops.push_back(std::move(op));
    return *this;
  }
  Circuit& append(const Circuit& o) {
    if (o.n_qubits != n_qubits) throw std::invalid_argument("circuit: qubit count mismatch");
    ops.insert(ops.end(), o.ops.begin(), o.ops.end());
    return *this;
  }
  void validate() const;
};

inline Rotation rx(int q, double a) { return {q, Axis::X, a}; }
inline Rotation ry(int q, double a) { return {q, Axis::Y, a}; }
inline Rotation rz(int q, double a) { return {q, Axis::Z, a}; }

namespace detail {
inline void check_qubit(int q, int n) {
  if (q < 1 || q > n) throw std::invalid_argument("circuit: qubit index " + std::to_string(q) + " out of range");
}
inline int bit_of(Eigen::Index k, int q, int n) { return static_cast<int>((k >> (n - q)) & 1); }
}  // namespace detail

inline void Circuit::validate() const {
  if (n_qubits < 1 || n_qubits > 3) throw std::invalid_argument("circuit: 1 to 3 qubits supported");
  for (const auto& op : ops) {
    std::visit(
        [&](const auto& g) {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, Rotation>) {
            detail::check_qubit(g.qubit, n_qubits);
            if (!std::isfinite(g.angle)) throw std::invalid_argument("circuit: non-finite angle");
          } else if constexpr (std::is_same_v<T, CPhase>) {
            detail::check_qubit(g.a, n_qubits);
            detail::check_qubit(g.b, n_qubits);
            if (g.a == g.b) throw std::invalid_argument("circuit: cphase needs two distinct qubits");
            if (g.state < 0 || g.state > 3) throw std::invalid_argument("circuit: cphase state must be 00..11");
          } else if constexpr (std::is_same_v<T, CCPhase>) {
            if (n_qubits != 3) throw std::invalid_argument("circuit: ccphase needs 3 qubits");
            for (double p : g.phases.ordered())
              if (!std::isfinite(p)) throw std::invalid_argument("circuit: non-finite phase");
          } else if constexpr (std::is_same_v<T, CCNot>) {
            if (n_qubits != 3) throw std::invalid_argument("circuit: ccnot needs 3 qubits");
            if (g.control1 == g.control2 || g.control1 == g.target || g.control2 == g.target)
              throw std::invalid_argument("circuit: ccnot qubits must be distinct");
            detail::check_qubit(g.control1, 3);
            detail::check_qubit(g.control2, 3);
            detail::check_qubit(g.target, 3);
          } else {
            if (!(g.idle_ns >= 0)) throw std::invalid_argument("circuit: negative barrier idle");
          }
        },
        op);
  }
}

inline CMatrix embed_single(int n, int qubit, const CMatrix& u2) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int q = 1; q <= n; ++q) out = kron(out, q == qubit ? u2 : CMatrix::Identity(2, 2));
  return out;
}

// Ideal unitary of one op on n qubits (Q1 most significant).
inline CMatrix gate_unitary(const GateOp& op, int n) {
  const Eigen::Index d = Eigen::Index(1) << n;
  return std::visit(
      [&](const auto& g) -> CMatrix {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Rotation>) {
          return embed_single(n, g.qubit, rotation_2x2(g.axis, g.angle));
        } else if constexpr (std::is_same_v<T, CPhase>) {
          CMatrix u = CMatrix::Identity(d, d);
          for (Eigen::Index k = 0; k < d; ++k) {
            const int s = 2 * detail::bit_of(k, g.a, n) + detail::bit_of(k, g.b, n);
            if (s == g.state) u(k, k) = -1.0;
          }
          return u;
        } else if constexpr (std::is_same_v<T, CCPhase>) {
          return g.phases.unitary();
        } else if constexpr (std::is_same_v<T, CCNot>) {
          CMatrix u = CMatrix::Zero(d, d);
          const Eigen::Index tbit = Eigen::Index(1) << (n - g.target);
          for (Eigen::Index k = 0; k < d; ++k) {
            const bool on = detail::bit_of(k, g.control1, n) && detail::bit_of(k, g.control2, n);
            u(on ? (k ^ tbit) : k, k) = 1.0;
          }
          return u;
        } else {
          return CMatrix::Identity(d, d);
        }
      },
      op);
}

inline bool is_z_rotation(const GateOp& op) {
  auto r = std::get_if<Rotation>(&op);
  return r && r->axis == Axis::Z;
}

// Composes the circuit left to right. With fold_z, z rotations only advance
// per-qubit reference frames: every later op G is applied as Zf^dag G Zf and
// the accumulated frame Zf is applied once at the end.
inline CMatrix circuit_unitary(const Circuit& c, bool fold_z = true) {
  c.validate();
  const int n = c.n_qubits;
  const Eigen::Index d = Eigen::Index(1) << n;
  CMatrix u = CMatrix::Identity(d, d);
  if (!fold_z) {
    for (const auto& op : c.ops) u = gate_unitary(op, n) * u;
    return u;
  }
  std::vector<double> frame(n + 1, 0.0);
  auto frame_op = [&]() {
    CMatrix z = CMatrix::Identity(1, 1);
    for (int q = 1; q <= n; ++q) z = kron(z, rotation_z(frame[q]));
    return z;
  };
  for (const auto& op : c.ops) {
    if (auto r = std::get_if<Rotation>(&op)) {
      if (r->axis == Axis::Z) {
        frame[r->qubit] += r->angle;
        continue;
      }
      const double phi = (r->axis == Axis::X ? 0.0 : kPi / 2) - frame[r->qubit];
      u = embed_single(n, r->qubit, rotation_xy(phi, r->angle)) * u;
      continue;
    }
    if (std::holds_alternative<Barrier>(op)) continue;
    CMatrix g = gate_unitary(op, n);
    if (std::holds_alternative<CCNot>(op)) {
      CMatrix z = frame_op();
      g = z.adjoint() * g * z;
    }
    u = g * u;
  }
  return frame_op() * u;
}

inline CMatrix apply_circuit(const Circuit& c, const CMatrix& rho) {
  CMatrix u = circuit_unitary(c);
  if (rho.cols() == 1) return u * rho;
  return u * rho * u.adjoint();
}

// min over phi of max |U - e^{i phi} V|, with phi aligned on the largest
// overlap element.
inline double phase_aligned_distance(const CMatrix& u, const CMatrix& v) {
  cplx ov = (v.adjoint() * u).trace();
  cplx ph = std::abs(ov) > 1e-15 ? ov / std::abs(ov) : cplx(1, 0);
  return (u - ph * v).cwiseAbs().maxCoeff();
}

// ---- serialisation ----

inline nlohmann::json to_json(const GateOp& op) {
  return std::visit(
      [](const auto& g) -> nlohmann::json {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Rotation>) {
          return {{"gate", "rotation"}, {"qubit", g.qubit}, {"axis", std::string(1, axis_char(g.axis))},
                  {"angle_deg", g.angle * 180.0 / kPi}};
        } else if constexpr (std::is_same_v<T, CPhase>) {
          return {{"gate", "cphase"}, {"qubits", {g.a, g.b}},
                  {"state", std::string{char('0' + (g.state >> 1)), char('0' + (g.state & 1))}}};
        } else if constexpr (std::is_same_v<T, CCPhase>) {
          return {{"gate", "ccphase"}, {"phases_deg", g.phases.to_json_deg()}};
        } else if constexpr (std::is_same_v<T, CCNot>) {
          return {{"gate", "ccnot"}, {"controls", {g.control1, g.control2}}, {"target", g.target}};
        } else {
          return {{"gate", "barrier"}, {"idle_ns", g.idle_ns}};
        }
      },
      op);
}

inline nlohmann::json to_json(const Circuit& c) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : c.ops) ops.push_back(to_json(op));
  return {{"n_qubits", c.n_qubits}, {"ops", ops}};
}

inline int parse_two_bits(const std::string& s) {
  if (s.size() != 2 || (s[0] != '0' && s[0] != '1') || (s[1] != '0' && s[1] != '1'))
    throw std::invalid_argument("cphase state must be two bits, got '" + s + "'");
  return 2 * (s[0] - '0') + (s[1] - '0');
}

inline GateOp gate_from_json(const nlohmann::json& j) {
  const std::string g = j.at("gate");
  if (g == "rotation") {
    return Rotation{j.at("qubit").get<int>(), parse_axis(j.at("axis").get<std::string>()),
                    j.at("angle_deg").get<double>() * kPi / 180.0};
  }
  if (g == "cphase") {
    auto q = j.at("qubits").get<std::array<int, 2>>();
    return CPhase{q[0], q[1], j.contains("state") ? parse_two_bits(j.at("state")) : 3};
  }
  if (g == "ccphase") {
    return CCPhase{j.contains("phases_deg") ? PhaseVector::from_json_deg(j.at("phases_deg")) : PhaseVector::ccz()};
  }
  if (g == "ccnot") {
    auto c = j.at("controls").get<std::array<int, 2>>();
    return CCNot{c[0], c[1], j.at("target").get<int>()};
  }
  if (g == "barrier") return Barrier{j.value("idle_ns", 0.0)};
  throw std::invalid_argument("unknown gate '" + g + "'");
}

inline Circuit circuit_from_json(const nlohmann::json& j) {
  Circuit c;
  const nlohmann::json* ops = &j;
  if (j.is_object()) {
    c.n_qubits = j.value("n_qubits", 3);
    ops = &j.at("ops");
  }
  for (const auto& o : *ops) c.ops.push_back(gate_from_json(o));
  c.validate();
  return c;
}

// One gate per line, angles in degrees, '#' starts a comment:
//   rx|ry|rz Q ANGLE     cz A B     cphase A B STATE     ccz
//   ccphase P001 P010 P100 P011 P101 P110 P111     ccnot C1 C2 T     barrier [NS]
inline Circuit parse_circuit_text(const std::string& text, int n_qubits = 3) {
  Circuit c;
  c.n_qubits = n_qubits;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string g;
    if (!(ls >> g)) continue;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("circuit line " + std::to_string(lineno) + ": " + why);
    };
    if (g == "rx" || g == "ry" || g == "rz") {
      int q;
      double a;
      if (!(ls >> q >> a)) fail("expected '" + g + " QUBIT DEGREES'");
      c.ops.push_back(Rotation{q, parse_axis(g.substr(1)), a * kPi / 180.0});
    } else if (g == "cz") {
      int a, b;
      if (!(ls >> a >> b)) fail("expected 'cz A B'");
      c.ops.push_back(CPhase{a, b, 3});
    } else if (g == "cphase") {
      int a, b;
      std::string s;
      if (!(ls >> a >> b >> s)) fail("expected 'cphase A B STATE'");
      c.ops.push_back(CPhase{a, b, parse_two_bits(s)});
    } else if (g == "ccz") {
      c.ops.push_back(CCPhase{});
    } else if (g == "ccphase") {
      std::array<double, 7> p{};
      for (auto& x : p) {
        if (!(ls >> x)) fail("expected seven phases in degrees");
        x *= kPi / 180.0;
      }
      c.ops.push_back(CCPhase{PhaseVector::from_ordered(p)});
    } else if (g == "ccnot") {
      int a, b, t;
      if (!(ls >> a >> b >> t)) fail("expected 'ccnot C1 C2 TARGET'");
      c.ops.push_back(CCNot{a, b, t});
    } else if (g == "barrier") {
      double ns = 0;
      ls >> ns;
      c.ops.push_back(Barrier{ns});
    } else {
      fail("unknown gate '" + g + "'");
    }
    std::string extra;
    if (ls >> extra) fail("unexpected token '" + extra + "'");
  }
  c.validate();
  return c;
}

}  // namespace tqec::gates
