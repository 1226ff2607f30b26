// Copyright 2026 The tqec Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "tqec/device/config.hpp"
#include "tqec/device/hamiltonian.hpp"
#include "tqec/device/spectrum.hpp"

namespace tqec::device {
namespace {

Occupation occ(const char* s) { return parse_occupation(s); }

// Energy of the dressed state labelled `l`, relative to the dressed ground.
double dressed(const DeviceConfig& cfg, const Flux& f, const Occupation& l) {
  const auto es = diagonalize(cfg, f);
  const auto idx = assign_labels(es, cfg.space(), {l});
  return es.energies(idx[0]) - es.energies(0);
}

TEST(Transmon, JosephsonEnergyVersusFlux) {
  EXPECT_DOUBLE_EQ(ej_at_flux(35.0, 0.0), 35.0);
  EXPECT_NEAR(ej_at_flux(35.0, 1.0 / 3.0), 17.5, 1e-12);
  EXPECT_NEAR(ej_at_flux(35.0, 0.5), 0.0, 1e-14);
  EXPECT_NEAR(ej_at_flux(35.0, -0.2), ej_at_flux(35.0, 0.2), 1e-15);
}

TEST(Transmon, DeepTransmonAsymptotics) {
  // Ej/Ec = 100: omega01 ~ sqrt(8 Ej Ec) - Ec, alpha ~ -Ec,
  // <0|n|1> ~ (Ej / 8Ec)^(1/4) / sqrt(2).
  const TransmonParams p{33.0, 0.33, 0.2, 4};
  const auto s = transmon_spectrum(p, 0.0);
  const double w01 = s.energies(1);
  EXPECT_NEAR(w01, std::sqrt(8 * 33.0 * 0.33) - 0.33, 0.02 * w01);
  EXPECT_NEAR(s.energies(2) - 2 * w01, -0.33, 0.15 * 0.33);
  EXPECT_NEAR(s.n01_raw, std::pow(33.0 / (8 * 0.33), 0.25) / std::sqrt(2.0), 0.05 * s.n01_raw);
  EXPECT_DOUBLE_EQ(s.energies(0), 0.0);
  for (int k = 1; k < 4; ++k) EXPECT_GT(s.energies(k), s.energies(k - 1));
}

TEST(Transmon, ChargeMatrixNormalisationAndParity) {
  const auto s = transmon_spectrum({35.0, 0.33, 0.22, 4}, 0.1);
  EXPECT_DOUBLE_EQ(s.charge(0, 1), 1.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      EXPECT_NEAR(s.charge(i, j), s.charge(j, i), 1e-12);
      if ((i + j) % 2 == 0) EXPECT_EQ(s.charge(i, j), 0.0);
    }
  // Harmonic-oscillator scaling of the ladder elements: sqrt(2) for 1-2.
  EXPECT_NEAR(s.charge(1, 2), std::sqrt(2.0), 0.1);
}

TEST(Transmon, UnconvergedChargeBasisIsReported) {
  EXPECT_THROW(transmon_spectrum({400.0, 0.2, 0.2, 4}, 0.0, 5), NumericalError);
  EXPECT_THROW(transmon_spectrum({35.0, 0.33, 0.2, 1}, 0.0), std::invalid_argument);
}

TEST(Transmon, FluxForFrequencyInvertsSpectrum) {
  const TransmonParams p{35.0, 0.33, 0.22, 4};
  for (double f : {6.0, 7.0, 7.85, 8.5}) {
    const double phi = flux_for_omega01(p, f);
    EXPECT_NEAR(omega01(p, phi), f, 1e-9);
    EXPECT_GE(phi, 0.0);
    EXPECT_LT(phi, 0.5);
  }
  EXPECT_THROW(flux_for_omega01(p, 20.0), std::domain_error);
}

TEST(Transmon, FrequencyDecreasesAwayFromSweetSpot) {
  const TransmonParams p{26.0, 0.33, 0.22, 4};
  double prev = omega01(p, 0.0);
  for (double phi = 0.02; phi < 0.45; phi += 0.02) {
    const double w = omega01(p, phi);
    EXPECT_LT(w, prev);
    prev = w;
  }
}

TEST(FluxMap, CrosstalkAndOffsetAreInvertible) {
  FluxMap m;
  m.matrix << 1.0, 0.02, 0.0, 0.01, 1.0, 0.03, 0.0, 0.02, 1.0;
  m.offset << 0.1, -0.05, 0.2;
  const Eigen::Vector3d v(0.3, -0.2, 0.05);
  EXPECT_LT((m.volts(m.flux(v)) - v).norm(), 1e-14);
  EXPECT_LT((m.flux(Eigen::Vector3d::Zero()) - m.offset).norm(), 1e-15);
  FluxMap id;
  EXPECT_LT((id.flux(v) - v).norm(), 1e-15);
}

TEST(Config, DefaultOperatingPoint) {
  const auto cfg = default_config();
  EXPECT_EQ(cfg.space().total_dim(), 4 * 4 * 4 * 3);
  for (int q = 1; q <= 3; ++q) {
    EXPECT_NEAR(frequency_at_flux(cfg, q, cfg.nominal_flux[q - 1]), cfg.operating_omega01_ghz[q - 1], 1e-9);
  }
}

TEST(Config, JsonRoundTripAndValidation) {
  const auto cfg = default_config();
  const json j = to_json(cfg);
  EXPECT_EQ(to_json(config_from_json(j)), j);
  json bad = j;
  bad["no_such_key"] = 1;
  EXPECT_THROW(config_from_json(bad), std::invalid_argument);
  json t2 = j;
  t2["t2_star_us"] = {3.0, 0.6, 1.3};
  EXPECT_THROW(config_from_json(t2), std::invalid_argument);
  json three = j;
  three["transmons"].erase(2);
  EXPECT_THROW(config_from_json(three), std::invalid_argument);
}

TEST(Config, MissingFluxIsDerivedFromFrequencies) {
  json j = to_json(default_config());
  j.erase("nominal_flux");
  j.erase("flux_offset");
  j["operating_omega01_ghz"] = {6.1, 7.0, 7.85};
  const auto c = config_from_json(j);
  EXPECT_NEAR(frequency_at_flux(c, 1, c.nominal_flux[0]), 6.1, 1e-9);
}

TEST(Config, ShippedDeviceFileMatchesDefaults) {
  const auto c = load_config(std::string(TQEC_DATA_DIR) + "/default_device.json");
  const json a = to_json(c), b = to_json(default_config());
  for (auto it = b.begin(); it != b.end(); ++it) {
    ASSERT_TRUE(a.contains(it.key())) << it.key();
  }
  for (int q = 0; q < 3; ++q) EXPECT_NEAR(c.nominal_flux[q], default_config().nominal_flux[q], 1e-12);
}

TEST(Hamiltonian, HermitianAndParityBlocked) {
  const auto cfg = default_config();
  const RMatrix h = hamiltonian_real(cfg, cfg.nominal_flux);
  EXPECT_LT((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  // Odd transmon step plus one photon: total excitation parity is conserved.
  const auto sp = cfg.space();
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      if (h(i, j) == 0.0) continue;
      auto a = sp.occupation(i), b = sp.occupation(j);
      int pa = 0, pb = 0;
      for (int k = 0; k < 4; ++k) pa += a[k], pb += b[k];
      EXPECT_EQ((pa + pb) % 2, 0);
    }
  EXPECT_TRUE(build_hamiltonian(cfg, cfg.nominal_flux).is_hermitian());
}

TEST(Hamiltonian, UncoupledSpectrumIsSumOfParts) {
  auto cfg = default_config();
  for (auto& t : cfg.transmons) t.g_ghz = 0.0;
  const auto es = diagonalize(cfg, cfg.nominal_flux);
  std::array<TransmonSpectrum, 3> tr;
  for (int q = 0; q < 3; ++q) tr[q] = transmon_spectrum(cfg.transmons[q], cfg.nominal_flux[q]);
  std::vector<double> want;
  const auto sp = cfg.space();
  for (Eigen::Index i = 0; i < sp.total_dim(); ++i) {
    auto o = sp.occupation(i);
    want.push_back(tr[0].energies(o[0]) + tr[1].energies(o[1]) + tr[2].energies(o[2]) + cfg.cavity_freq_ghz * o[3]);
  }
  std::sort(want.begin(), want.end());
  for (Eigen::Index i = 0; i < sp.total_dim(); ++i) EXPECT_NEAR(es.energies(i), want[i], 1e-9);
  // Labels sit on their bare states exactly.
  EXPECT_NEAR(dressed(cfg, cfg.nominal_flux, occ("101")), tr[0].energies(1) + tr[2].energies(1), 1e-9);
}

TEST(Hamiltonian, DressedQubitsNearOperatingFrequencies) {
  const auto cfg = default_config();
  EXPECT_NEAR(dressed(cfg, cfg.nominal_flux, occ("100")), 6.0, 0.1);
  EXPECT_NEAR(dressed(cfg, cfg.nominal_flux, occ("010")), 7.0, 0.1);
  EXPECT_NEAR(dressed(cfg, cfg.nominal_flux, occ("001")), 7.85, 0.1);
}

// One transmon on resonance with the cavity: vacuum Rabi splitting 2g in the
// single-excitation manifold and 2g sqrt(2) in the next.
TEST(Hamiltonian, JaynesCummingsSplitting) {
  auto cfg = default_config();
  const double g = 0.03;
  for (auto& t : cfg.transmons) t.levels = 2, t.g_ghz = 0.0;
  cfg.transmons[0].g_ghz = g;
  cfg.cavity_freq_ghz = frequency_at_flux(cfg, 1, cfg.nominal_flux[0]);
  const double s1 = pair_splitting(cfg, cfg.nominal_flux, occ("100"), {0, 0, 0, 1});
  const double s2 = pair_splitting(cfg, cfg.nominal_flux, {1, 0, 0, 1}, {0, 0, 0, 2});
  EXPECT_NEAR(s1, 2 * g, 0.01 * 2 * g);
  EXPECT_NEAR(s2, 2 * g * std::sqrt(2.0), 0.01 * 2 * g * std::sqrt(2.0));
}

TEST(Hamiltonian, TruncationConverged) {
  const auto cfg = default_config();
  auto big = cfg;
  for (auto& t : big.transmons) t.levels = 5;
  big.cavity_levels = 4;
  for (const char* l : {"100", "010", "001"}) {
    EXPECT_NEAR(dressed(cfg, cfg.nominal_flux, occ(l)), dressed(big, big.nominal_flux, occ(l)), 1e-3) << l;
  }
}

TEST(Occupation, ParseAndPrint) {
  const auto o = parse_occupation("102,1");
  EXPECT_EQ(o, (Occupation{1, 0, 2, 1}));
  EXPECT_EQ(to_string(o), "|102,1>");
  EXPECT_EQ(to_string(occ("011")), "|011>");
  EXPECT_THROW(parse_occupation("01"), std::invalid_argument);
  EXPECT_THROW(parse_occupation("0a1"), std::invalid_argument);
}

TEST(Spectrum, UncoupledScanFollowsBareSums) {
  auto cfg = default_config();
  for (auto& t : cfg.transmons) t.g_ghz = 0.0;
  std::vector<double> grid;
  for (int i = 0; i < 11; ++i) grid.push_back(cfg.nominal_flux[1] - 0.01 * i);
  const auto s = labeled_spectrum_scan(cfg, 2, grid, {occ("010"), occ("011"), occ("001")});
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto i = static_cast<Eigen::Index>(p);
    EXPECT_NEAR(s.energies(i, 0), s.frequency_ghz[p], 1e-9);
    EXPECT_NEAR(s.energies(i, 1) - s.energies(i, 0), s.energies(i, 2), 1e-9);
    EXPECT_NEAR(s.overlaps(i, 1), 1.0, 1e-12);
  }
}

TEST(Spectrum, ScanEnergiesAreEigenvalues) {
  const auto cfg = default_config();
  const std::vector<double> grid{cfg.nominal_flux[1], cfg.nominal_flux[1] - 0.05};
  const auto s = labeled_spectrum_scan(cfg, 2, grid, {occ("011"), occ("002")});
  for (std::size_t p = 0; p < grid.size(); ++p) {
    Flux f = cfg.nominal_flux;
    f[1] = grid[p];
    const auto es = diagonalize(cfg, f);
    for (Eigen::Index l = 0; l < 2; ++l) {
      const double e = s.energies(static_cast<Eigen::Index>(p), l) + es.energies(0);
      EXPECT_LT((es.energies.array() - e).abs().minCoeff(), 1e-9);
    }
  }
  EXPECT_THROW(labeled_spectrum_scan(cfg, 4, grid, {occ("011")}), std::invalid_argument);
  EXPECT_THROW(labeled_spectrum_scan(cfg, 2, {}, {occ("011")}), std::invalid_argument);
}

TEST(Spectrum, SwapCrossingLocationAndGap) {
  const auto cfg = default_config();
  const auto x = find_avoided_crossing_ghz(cfg, 2, occ("011"), occ("002"), 7.05, 7.8);
  // Resonance of Q2 with the 1-2 transition of Q3.
  const auto t3 = transmon_spectrum(cfg.transmons[2], cfg.nominal_flux[2]);
  EXPECT_NEAR(x.frequency_ghz, t3.energies(2) - t3.energies(1), 0.05);
  // The found gap is the minimum of the splitting on a fine grid.
  for (double df : {-0.02, -0.005, 0.005, 0.02}) {
    EXPECT_GE(pair_splitting(cfg, with_frequency(cfg, cfg.nominal_flux, 2, x.frequency_ghz + df), occ("011"),
                             occ("002")),
              x.gap_ghz - 1e-9);
  }
}

TEST(Spectrum, QuoteGapsWithinTolerance) {
  const auto cfg = default_config();
  const auto x111 = find_avoided_crossing_ghz(cfg, 2, occ("111"), occ("102"), 7.05, 7.8);
  EXPECT_NEAR(x111.gap_ghz, 0.067, 0.5 * 0.067);
  // Q1 toward |102>/|003> with Q2 parked above Q3.
  const Flux park = with_frequency(cfg, cfg.nominal_flux, 2, 8.1);
  const auto x3 = find_avoided_crossing_ghz(cfg, 1, occ("102"), occ("003"), 6.3, 7.8, park);
  EXPECT_NEAR(x3.gap_ghz, 0.121, 0.5 * 0.121);
}

TEST(Spectrum, GapScalesWithCouplingSquared) {
  // Q2 and Q3 talk through the cavity: the exchange is second order in g.
  auto cfg = default_config();
  const auto full = find_avoided_crossing_ghz(cfg, 2, occ("011"), occ("002"), 7.05, 7.8);
  for (auto& t : cfg.transmons) t.g_ghz /= std::sqrt(2.0);
  const auto half = find_avoided_crossing_ghz(cfg, 2, occ("011"), occ("002"), 7.05, 7.8);
  EXPECT_NEAR(half.gap_ghz / full.gap_ghz, 0.5, 0.05);
}

TEST(Spectrum, NoCrossingIsAnError) {
  const auto cfg = default_config();
  // |010> and |001> never meet while Q2 stays below Q3.
  EXPECT_THROW(find_avoided_crossing_ghz(cfg, 2, occ("010"), occ("001"), 6.5, 7.3), std::domain_error);
  EXPECT_THROW(find_avoided_crossing(cfg, 2, occ("011"), occ("002"), 0.2, 0.1), std::invalid_argument);
}

}  // namespace
}  // namespace tqec::device
