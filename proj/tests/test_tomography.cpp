// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "test_util.hpp"
#include "tqec/gates/codes.hpp"
#include "tqec/tomography/process.hpp"

namespace tqec::tomography {
namespace {

using testing::max_abs;

CMatrix ghz_density() {
  CVector g = CVector::Zero(8);
  g(0) = g(7) = 1 / std::sqrt(2.0);
  return g * g.adjoint();
}

// Random channel as a set of Kraus operators: slices of a random isometry.
std::vector<CMatrix> random_kraus(std::mt19937_64& rng, int d, int k) {
  const CMatrix v = testing::random_unitary(rng, d * k).leftCols(d);
  std::vector<CMatrix> out;
  for (int i = 0; i < k; ++i) out.push_back(v.middleRows(i * d, d));
  return out;
}

Channel kraus_channel(const std::vector<CMatrix>& ks) {
  return [ks](const CMatrix& rho) {
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (const auto& k : ks) out += k * rho * k.adjoint();
    return out;
  };
}

// Direct chi: chi_mn = sum_k c^k_m conj(c^k_n), c^k_m = Tr(P_m K_k) / d.
CMatrix chi_from_kraus(const std::vector<CMatrix>& ks, const PauliBasis& b) {
  CMatrix chi = CMatrix::Zero(b.size(), b.size());
  for (const auto& k : ks) {
    CVector c(b.size());
    for (std::size_t m = 0; m < b.size(); ++m) c(m) = (b.op(m) * k).trace() / static_cast<double>(b.dim());
    chi += c * c.adjoint();
  }
  return chi;
}

TEST(Pauli, LabelOrder) {
  const auto& l = pauli_labels_3q();
  ASSERT_EQ(l.size(), 64u);
  EXPECT_EQ(l[0], "III");
  EXPECT_EQ(l[9], "ZII");
  EXPECT_EQ(l[63], "ZZZ");
  std::set<std::string> unique(l.begin(), l.end());
  EXPECT_EQ(unique.size(), 64u);
  // Operators are orthogonal under the trace inner product.
  const PauliBasis b(3);
  for (std::size_t m = 0; m < 64; m += 7)
    for (std::size_t n = 0; n < 64; ++n)
      EXPECT_NEAR(std::abs((b.op(m).adjoint() * b.op(n)).trace()), m == n ? 8.0 : 0.0, 1e-12);
  EXPECT_THROW(PauliBasis(4), std::invalid_argument);
  EXPECT_THROW(b.index_of("ABC"), std::invalid_argument);
}

TEST(Pauli, GroundStateSet) {
  const PauliBasis b(3);
  CMatrix rho = CMatrix::Zero(8, 8);
  rho(0, 0) = 1;
  const auto s = pauli_set(rho, b);
  for (std::size_t m = 0; m < 64; ++m) {
    const bool only_iz = b.labels()[m].find_first_of("XY") == std::string::npos;
    EXPECT_NEAR(s.values[m], only_iz ? 1.0 : 0.0, 1e-15) << b.labels()[m];
  }
}

TEST(Pauli, GhzSet) {
  const PauliBasis b(3);
  const auto s = pauli_set(ghz_density(), b);
  auto v = [&](const std::string& l) { return s.values[b.index_of(l)]; };
  EXPECT_NEAR(v("III"), 1, 1e-15);
  EXPECT_NEAR(v("ZZI"), 1, 1e-15);
  EXPECT_NEAR(v("IZZ"), 1, 1e-15);
  EXPECT_NEAR(v("ZIZ"), 1, 1e-15);
  EXPECT_NEAR(v("XXX"), 1, 1e-15);
  EXPECT_NEAR(v("XYY"), -1, 1e-15);
  EXPECT_NEAR(v("YXY"), -1, 1e-15);
  EXPECT_NEAR(v("YYX"), -1, 1e-15);
  double sum_sq = 0;
  for (double x : s.values) sum_sq += x * x;
  EXPECT_NEAR(sum_sq, 8.0, 1e-12);  // pure state: Tr rho^2 = sum / 8
}

TEST(Pauli, ReconstructionIsExact) {
  std::mt19937_64 rng(11);
  for (int n : {1, 2, 3}) {
    const PauliBasis b(n);
    for (int t = 0; t < 5; ++t) {
      const CMatrix rho = testing::random_density(rng, b.dim());
      EXPECT_LT(max_abs(density_from_pauli(pauli_set(rho, b), b) - rho), 1e-12);
    }
  }
}

TEST(Pauli, InputValidation) {
  const PauliBasis b(3);
  EXPECT_THROW(pauli_set(CMatrix::Identity(4, 4) / 4.0, b), std::invalid_argument);
  EXPECT_THROW(pauli_set(CMatrix::Identity(8, 8), b), std::invalid_argument);
  EXPECT_THROW(density_from_pauli(PauliSet{{}, {1.0}}, b), std::invalid_argument);
}

TEST(Pauli, SamplingIsSeededAndUnbiased) {
  const PauliBasis b(3);
  const CMatrix rho = ghz_density();
  std::mt19937_64 r1(4), r2(4);
  const auto a = sample_pauli_set(rho, b, 1000, r1), c = sample_pauli_set(rho, b, 1000, r2);
  EXPECT_EQ(a.values, c.values);
  std::mt19937_64 r3(5);
  const long shots = 200000;
  const auto big = sample_pauli_set(rho, b, shots, r3);
  const auto exact = pauli_set(rho, b);
  for (std::size_t m = 0; m < 64; ++m) {
    const double sd = std::sqrt((1 - exact.values[m] * exact.values[m]) / shots);
    EXPECT_NEAR(big.values[m], exact.values[m], 5 * sd + 1e-12) << b.labels()[m];
  }
  EXPECT_THROW(sample_pauli_set(rho, b, 0, r3), std::invalid_argument);
}

TEST(Pauli, CsvHasHeaderAndRows) {
  std::ostringstream os;
  pauli_set(ghz_density(), PauliBasis(3)).write_csv(os);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("operator,value\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 65);
}

TEST(Process, InputsSpanOperatorSpace) {
  for (int n : {1, 2, 3}) {
    const auto ins = tomography_inputs(n);
    ASSERT_EQ(ins.size(), std::size_t{1} << (2 * n));
    const int d = 1 << n;
    CMatrix m(d * d, static_cast<Eigen::Index>(ins.size()));
    for (std::size_t k = 0; k < ins.size(); ++k) {
      EXPECT_NEAR(std::abs(ins[k].trace() - 1.0), 0.0, 1e-15);
      m.col(k) = Eigen::Map<const CVector>(ins[k].data(), d * d);
    }
    EXPECT_EQ(Eigen::FullPivLU<CMatrix>(m).rank(), d * d);
  }
}

TEST(Process, CczChiIsDiagonalInZStrings) {
  const auto chi = ideal_chi(gates::PhaseVector::ccz().unitary());
  const PauliBasis b(3);
  for (std::size_t m = 0; m < 64; ++m) {
    const std::string& l = b.labels()[m];
    const bool iz = l.find_first_of("XY") == std::string::npos;
    const double expect = l == "III" ? 9.0 / 16 : (iz ? 1.0 / 16 : 0.0);
    EXPECT_NEAR(std::real(chi.chi(m, m)), expect, 1e-15) << l;
  }
  EXPECT_NEAR(std::abs(chi.chi.trace() - 1.0), 0.0, 1e-14);
}

TEST(Process, TomographyOfUnitaryMatchesDirectChi) {
  std::mt19937_64 rng(12);
  for (int n : {1, 2, 3}) {
    const CMatrix u = testing::random_unitary(rng, 1 << n);
    const auto est = process_tomography([&](const CMatrix& r) { CMatrix o = u * r * u.adjoint(); return o; }, n);
    EXPECT_LT(max_abs(est.chi - ideal_chi(u).chi), 1e-10) << n;
    EXPECT_NEAR(process_fidelity(est, ideal_chi(u)), 1.0, 1e-10);
  }
}

TEST(Process, TomographyOfRandomChannelMatchesKraus) {
  std::mt19937_64 rng(13);
  for (int n : {1, 3}) {
    const PauliBasis b(n);
    const auto ks = random_kraus(rng, b.dim(), 3);
    const auto est = process_tomography(kraus_channel(ks), n);
    const CMatrix direct = chi_from_kraus(ks, b);
    EXPECT_LT(max_abs(est.chi - direct), 1e-10);
    // Trace preserving, Hermitian and positive.
    EXPECT_NEAR(std::abs(est.chi.trace() - 1.0), 0.0, 1e-10);
    EXPECT_LT(max_abs(est.chi - est.chi.adjoint()), 1e-12);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<CMatrix>(est.chi).eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(Process, FidelityBetweenPhaseGates) {
  const auto ref = ideal_chi(gates::PhaseVector::ccz().unitary());
  for (double phi : {0.0, 0.3, 1.0, 57 * kPi / 180, kPi}) {
    gates::PhaseVector v = gates::PhaseVector::ccz();
    v.at("101") = phi;
    const double f = process_fidelity(ref, ideal_chi(v.unitary()));
    EXPECT_NEAR(f, (40 + 24 * std::cos(phi)) / 64, 1e-13) << phi;
  }
  EXPECT_NEAR(process_fidelity(ideal_chi(pauli::I()), ideal_chi(pauli::Z())), 0.0, 1e-15);
  EXPECT_THROW(process_fidelity(ideal_chi(pauli::I()), ref), std::invalid_argument);
}

TEST(Process, DepolarizingFidelityIsLinear) {
  // Process fidelity with identity of p-depolarizing on 3 qubits: 1 - p + p/64.
  for (double p : {0.0, 0.25, 1.0}) {
    const auto chi = process_tomography(
        [p](const CMatrix& r) {
          CMatrix o = (1 - p) * r + p * r.trace() * CMatrix::Identity(8, 8) / 8.0;
          return o;
        },
        3);
    EXPECT_NEAR(process_fidelity(chi, ideal_chi(CMatrix::Identity(8, 8))), 1 - p + p / 64, 1e-12);
  }
}

TEST(Process, OutputCountChecked) {
  EXPECT_THROW(chi_from_outputs(std::vector<CMatrix>(15, CMatrix::Identity(2, 2)), 1), std::invalid_argument);
}

TEST(Process, ChiJsonShape) {
  const auto j = ideal_chi(pauli::X()).to_json();
  EXPECT_EQ(j["labels"].size(), 4u);
  EXPECT_EQ(j["re"][1][1].get<double>(), 1.0);
  EXPECT_EQ(j["im"].size(), 4u);
}

TEST(TruthTable, IdentityAndDepolarized) {
  const auto id = truth_table([](const CMatrix& r) { return r; });
  EXPECT_NEAR(id.classical_fidelity, 1.0, 1e-15);
  EXPECT_LT(max_abs(id.table - RMatrix::Identity(8, 8)), 1e-15);
  const auto dep = truth_table([](const CMatrix& r) { CMatrix o = r.trace() * CMatrix::Identity(8, 8) / 8.0; return o; });
  EXPECT_NEAR(dep.classical_fidelity, 1.0 / 8, 1e-15);
  // Rows are probability distributions.
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(dep.table.row(i).sum(), 1.0, 1e-15);
}

TEST(TruthTable, IntendedPermutation) {
  const CMatrix u = gates::circuit_unitary(gates::ccnot_circuit());
  const Channel ch = [&](const CMatrix& r) { CMatrix o = u * r * u.adjoint(); return o; };
  EXPECT_NEAR(truth_table(ch, {0, 1, 2, 3, 4, 7, 6, 5}).classical_fidelity, 1.0, 1e-12);
  EXPECT_NEAR(truth_table(ch).classical_fidelity, 6.0 / 8, 1e-12);
  EXPECT_THROW(truth_table(ch, {0, 1}), std::invalid_argument);
  std::ostringstream os;
  truth_table(ch).write_csv(os);
  EXPECT_EQ(os.str().rfind("input,000,001", 0), 0u);
}

}  // namespace
}  // namespace tqec::tomography
