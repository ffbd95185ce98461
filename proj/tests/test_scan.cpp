#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ptspectra/metric.hpp"
#include "ptspectra/scan.hpp"
#include "test_support.hpp"

using namespace ptspectra;
using namespace ptspectra::testing;

namespace {

constexpr double kSep = 0.5242106130;

HamiltonianSpec hami5_tmpl() { return preset(Preset::hami5, 0.0, 0.5, 0.0); }
HamiltonianSpec hami27_tmpl(double q) { return preset(Preset::hami27, q, 0.5, 0.0); }

bool has_complex_pair(const CVector& energies, double tol) {
  return std::any_of(energies.begin(), energies.end(), [&](const Complex& z) { return std::abs(z.imag()) > tol; });
}

}  // namespace

TEST(Grid, Linear) {
  const auto g = linear_grid(-0.8, 0.8, 161);
  ASSERT_EQ(g.size(), 161u);
  EXPECT_EQ(g.front(), -0.8);
  EXPECT_EQ(g.back(), 0.8);
  EXPECT_NEAR(g[80], 0.0, 1e-15);
  for (std::size_t k = 1; k < g.size(); ++k) EXPECT_LT(g[k - 1], g[k]);
  EXPECT_EQ(error_code([] { (void)linear_grid(0, 1, 1); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_code([] { (void)linear_grid(1, 0, 5); }), ErrorCode::InvalidArgument);
}

TEST(Params, ParseAndSubstitute) {
  for (ScanParam p : {ScanParam::q, ScanParam::r, ScanParam::s, ScanParam::u}) {
    EXPECT_EQ(parse_scan_param(to_string(p)), p);
  }
  EXPECT_EQ(error_code([] { (void)parse_scan_param("t"); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(with_param(hami5_tmpl(), ScanParam::s, 0.3).s, 0.3);
  EXPECT_EQ(with_param(hami5_tmpl(), ScanParam::q, 0.2).q, 0.2);
  EXPECT_EQ(error_code([] { (void)with_param(hami5_tmpl(), ScanParam::u, 0.2); }), ErrorCode::InvalidArgument);
  HamiltonianSpec general;
  general.w = {0.5};
  general.v = {-1.0};
  EXPECT_EQ(with_param(general, ScanParam::u, 0.7).u, 0.7);
  EXPECT_EQ(error_code([&] { (void)with_param(general, ScanParam::s, 0.2); }), ErrorCode::InvalidArgument);
  EXPECT_GE(worker_count(), 1u);
}

TEST(Sweep, FivePointRealityWindow) {
  const SweepResult r = sweep_spectrum(hami5_tmpl(), ScanParam::s, -0.8, 0.8, 161);
  ASSERT_EQ(r.grid.size(), 161u);
  EXPECT_EQ(r.dimension(), 5u);
  for (std::size_t k = 0; k < r.grid.size(); ++k) {
    EXPECT_EQ(r.all_real[k], std::abs(r.grid[k]) < kSep) << r.grid[k];
    EXPECT_EQ(r.energies[k].size(), 5u);
  }
}

TEST(Sweep, ZeroCouplingAlwaysReal) {
  HamiltonianSpec spec;
  spec.M = 3;
  spec.w.assign(3, 0.0);
  spec.v.assign(3, 0.0);
  const SweepResult r = sweep_spectrum(spec, ScanParam::u, -2.0, 2.0, 41);
  for (std::size_t k = 0; k < r.grid.size(); ++k) EXPECT_TRUE(r.all_real[k]);
}

TEST(Sweep, SevenPointTripletAndQuadruplet) {
  const SweepResult r = sweep_spectrum(preset(Preset::hami7, 1.0 / 3.0, 0.5, 0.0), ScanParam::s, -0.55, -0.1, 13);
  const std::vector<double> triplet = {-std::numbers::sqrt2, 0.0, std::numbers::sqrt2};
  for (std::size_t k = 0; k < r.grid.size(); ++k) {
    ASSERT_TRUE(r.all_real[k]) << r.grid[k];
    int constant = 0;
    for (const Complex& e : r.energies[k]) {
      for (const double t : triplet) constant += std::abs(e - t) < 1e-9;
    }
    EXPECT_EQ(constant, 3) << r.grid[k];
  }
  // The other four move with s.
  const auto movers = [&](std::size_t k) {
    std::vector<double> out;
    for (const Complex& e : r.energies[k]) {
      if (std::none_of(triplet.begin(), triplet.end(), [&](double t) { return std::abs(e - t) < 1e-9; })) {
        out.push_back(e.real());
      }
    }
    return out;
  };
  const auto first = movers(0);
  const auto last = movers(r.grid.size() - 1);
  ASSERT_EQ(first.size(), 4u);
  ASSERT_EQ(last.size(), 4u);
  double shift = 0.0;
  for (std::size_t j = 0; j < 4; ++j) shift = std::max(shift, std::abs(first[j] - last[j]));
  EXPECT_GT(shift, 1e-3);
}

TEST(Boundary, BisectionBothSigns) {
  EXPECT_NEAR(locate_reality_boundary(hami5_tmpl(), ScanParam::s, 0.4, 0.7), kSep, 1e-6);
  EXPECT_NEAR(locate_reality_boundary(hami5_tmpl(), ScanParam::s, -0.7, -0.4), -kSep, 1e-6);
  EXPECT_NEAR(locate_reality_boundary(hami5_tmpl(), ScanParam::s, 0.4, 0.7), s_ep_closed_form(), 1e-6);
  EXPECT_EQ(error_code([] { (void)locate_reality_boundary(hami5_tmpl(), ScanParam::s, 0.0, 0.1); }),
            ErrorCode::NoSignChange);
}

TEST(Boundary, ClosedForm) {
  EXPECT_NEAR(s_ep_closed_form(), kSep, 1e-9);
  // Recompute the closed-form expression here with f^3 = 5 + sqrt(33).
  const double r33 = std::sqrt(33.0);
  const double f = std::cbrt(5.0 + r33);
  EXPECT_NEAR(f * f * f - (5.0 + r33), 0.0, 1e-13);
  const double num = 2.0 * std::sqrt(6 * f * f - 15 * f - f * r33 + 21 + 5 * r33) - 2.0 * std::numbers::sqrt2 * f;
  const double den = 4.0 * std::sqrt(f * (f * f - 2.0));
  EXPECT_NEAR(s_ep_closed_form(), num / den, 1e-14);
}

TEST(Certificate, InteriorPointsOfFivePointModel) {
  const EPCertificate plus = certify_interior_ep(build_preset(Preset::hami5, 0.0, 0.5, 0.5), -1.0);
  EXPECT_EQ(plus.geometric_multiplicity, 1);
  EXPECT_EQ(plus.jordan_block_size, 2);
  EXPECT_NEAR(plus.degenerate_eigenvalue.real(), -1.0, 1e-6);
  ASSERT_EQ(plus.null_vector.size(), 5u);
  const CVector want = {0, 0, 0, 1, 1};
  EXPECT_NEAR(alignment(plus.null_vector, want), 1.0, 1e-8);
  EXPECT_NEAR(norm2(plus.null_vector), 1.0, 1e-12);

  const EPCertificate minus = certify_interior_ep(build_preset(Preset::hami5, 0.0, 0.5, -0.5), 1.0);
  EXPECT_EQ(minus.geometric_multiplicity, 1);
  EXPECT_EQ(minus.jordan_block_size, 2);
  EXPECT_NEAR(minus.degenerate_eigenvalue.real(), 1.0, 1e-6);
  ASSERT_GE(minus.ranks.size(), 2u);
  EXPECT_EQ(minus.ranks[0], 4u);
  EXPECT_EQ(minus.ranks[1], 3u);
}

TEST(Certificate, NondegenerateRejected) {
  EXPECT_EQ(error_code([] { (void)certify_interior_ep(real_matrix({{1, 0.5}, {0.5, -1}}), 1.0); }),
            ErrorCode::NotDegenerate);
  EXPECT_EQ(error_code([] { (void)certify_interior_ep(build_preset(Preset::hami5, 0, 0.5, 0.3), -1.0); }),
            ErrorCode::NotDegenerate);
}

TEST(Domains, FivePointModel) {
  const DomainReport r = domain_report(hami5_tmpl(), ScanParam::s, -0.8, 0.8, 161);
  ASSERT_EQ(r.intervals.size(), 3u);
  const std::vector<double> ends = {-kSep, -0.5, -0.5, 0.5, 0.5, kSep};
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(r.intervals[k].lo, ends[2 * k], 1e-6);
    EXPECT_NEAR(r.intervals[k].hi, ends[2 * k + 1], 1e-6);
  }
  EXPECT_TRUE(r.gaps.empty());
  ASSERT_EQ(r.boundaries.size(), 4u);
  EXPECT_EQ(r.boundaries[0].type, BoundaryType::reality_boundary);
  EXPECT_EQ(r.boundaries[1].type, BoundaryType::interior_crossing);
  EXPECT_EQ(r.boundaries[2].type, BoundaryType::interior_crossing);
  EXPECT_EQ(r.boundaries[3].type, BoundaryType::reality_boundary);
  EXPECT_EQ(r.certificates.size(), 2u);
}

TEST(Domains, MirrorSymmetry) {
  const DomainReport r = domain_report(hami5_tmpl(), ScanParam::s, -0.8, 0.8, 161);
  const std::size_t n = r.intervals.size();
  for (std::size_t k = 0; k < n; ++k) {
    EXPECT_NEAR(r.intervals[k].lo, -r.intervals[n - 1 - k].hi, 1e-6);
    EXPECT_NEAR(r.intervals[k].hi, -r.intervals[n - 1 - k].lo, 1e-6);
  }
}

TEST(Domains, ThreeDomainsForNegativeQ) {
  const DomainReport r = domain_report(hami27_tmpl(-1.0 / 15.0), ScanParam::s, -1.2, 1.2, 481);
  EXPECT_EQ(r.intervals.size(), 3u);
  EXPECT_TRUE(r.gaps.empty());
}

TEST(Domains, GapForSmallPositiveQ) {
  const DomainReport r = domain_report(hami27_tmpl(0.01), ScanParam::s, -1.2, 1.2, 481);
  ASSERT_EQ(r.intervals.size(), 4u);
  ASSERT_EQ(r.gaps.size(), 1u);
  // Two adjacent pairs: touching endpoints inside each pair, the gap between them.
  EXPECT_NEAR(r.intervals[0].hi, r.intervals[1].lo, 1e-9);
  EXPECT_NEAR(r.intervals[2].hi, r.intervals[3].lo, 1e-9);
  EXPECT_NEAR(r.gaps[0].lo, r.intervals[1].hi, 1e-9);
  EXPECT_NEAR(r.gaps[0].hi, r.intervals[2].lo, 1e-9);
}

TEST(Domains, ReportInvariants) {
  for (const auto& [tmpl, n] : {std::pair{hami5_tmpl(), 161}, std::pair{hami27_tmpl(-1.0 / 15.0), 481},
                                std::pair{hami27_tmpl(0.01), 481}, std::pair{preset(Preset::hami7, 1.0 / 3.0, 0.5, 0), 481}}) {
    const DomainReport r = domain_report(tmpl, ScanParam::s, -1.2, 1.2, n);
    const int M = expand_preset(tmpl).M;
    for (std::size_t k = 0; k < r.intervals.size(); ++k) {
      EXPECT_LT(r.intervals[k].lo, r.intervals[k].hi);
      if (k > 0) {
        EXPECT_LE(r.intervals[k - 1].hi, r.intervals[k].lo);
      }
      // Inside a domain the spectral metric exists.
      const double mid = 0.5 * (r.intervals[k].lo + r.intervals[k].hi);
      const Matrix h = build(with_param(tmpl, ScanParam::s, mid));
      EXPECT_TRUE(metric_spectral(h, M, std::vector<double>(h.rows(), 1.0)).positive_definite);
    }
    for (const Boundary& b : r.boundaries) {
      const bool endpoint = std::any_of(r.intervals.begin(), r.intervals.end(), [&](const Interval& i) {
        return std::abs(i.lo - b.value) < 1e-12 || std::abs(i.hi - b.value) < 1e-12;
      });
      EXPECT_TRUE(endpoint) << b.value;
    }
    for (const EPCertificate& c : r.certificates) {
      EXPECT_GE(c.jordan_block_size, 2);
      const Matrix h = build(with_param(tmpl, ScanParam::s, c.param_value));
      EXPECT_EQ(error_code([&] { (void)metric_spectral(h, M, std::vector<double>(h.rows(), 1.0)); }),
                ErrorCode::DegenerateSpectrum);
    }
    // Every gap holds a grid point with a complex pair.
    const SweepResult sweep = sweep_spectrum(tmpl, ScanParam::s, -1.2, 1.2, n);
    for (const Interval& g : r.gaps) {
      bool found = false;
      for (std::size_t k = 0; k < sweep.grid.size(); ++k) {
        if (sweep.grid[k] > g.lo && sweep.grid[k] < g.hi && has_complex_pair(sweep.energies[k], 1e-6)) found = true;
      }
      EXPECT_TRUE(found);
    }
  }
}

TEST(Positivity, SspWindowAroundZero) {
  const Matrix h = build_preset(Preset::dim5, 0.0, 0.5, 0.0);
  const std::vector<double> base = {1, 0, 0, 0, 0};
  const std::vector<double> dir = {0, 0, 1, 0, 0};
  const PositivityScan p = metric_positivity_interval(h, base, dir, 0.0, -1.0, 2.0, 301);
  EXPECT_LT(p.interval.lo, 0.0);
  EXPECT_GT(p.interval.hi, 0.0);
  EXPECT_TRUE(p.lower_bounded);
  EXPECT_TRUE(p.upper_bounded);
  // Endpoints: the smallest metric eigenvalue vanishes there.
  for (const double edge : {p.interval.lo, p.interval.hi}) {
    std::vector<double> row = base;
    row[2] = edge;
    EXPECT_NEAR(metric_recurrent(h, row).eigenvalues.front(), 0.0, 1e-7);
  }
  // Eigenvalues at xi = 0 along the emitted curve.
  const auto at = std::find_if(p.grid.begin(), p.grid.end(), [](double x) { return std::abs(x) < 1e-12; });
  ASSERT_NE(at, p.grid.end());
  const auto& theta = p.eigencurves[static_cast<std::size_t>(at - p.grid.begin())];
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(theta[k], ssp_eigenvalues_at_zero()[k], 1e-8);
}

TEST(Positivity, CurvesAreContinuous) {
  const Matrix h = build_preset(Preset::dim5, 0.0, 0.5, 0.0);
  const PositivityScan p =
      metric_positivity_interval(h, std::vector<double>{1, 0, 0, 0, 0}, std::vector<double>{0, 0, 1, 0, 0}, 0.0, -1.0,
                                 2.0, 301);
  ASSERT_EQ(p.eigencurves.size(), p.grid.size());
  for (std::size_t j = 0; j < 5; ++j) {
    for (std::size_t k = 1; k + 1 < p.grid.size(); ++k) {
      const double jump = std::abs(p.eigencurves[k + 1][j] - p.eigencurves[k][j]);
      const double slope = std::max(std::abs(p.eigencurves[k][j] - p.eigencurves[k - 1][j]), 1e-3);
      EXPECT_LE(jump, 10.0 * slope);
    }
  }
}

TEST(Positivity, HermitianFamilyAndSeedCheck) {
  Matrix chain(5, 5);
  for (std::size_t k = 0; k + 1 < 5; ++k) chain(k, k + 1) = chain(k + 1, k) = -1.0;
  const std::vector<double> e1 = {1, 0, 0, 0, 0};
  const std::vector<double> none(5, 0.0);
  const PositivityScan p = metric_positivity_interval(chain, e1, none, 0.0, -1.0, 1.0, 21);
  EXPECT_FALSE(p.lower_bounded);
  EXPECT_FALSE(p.upper_bounded);
  for (const auto& curve : p.eigencurves) {
    for (const double t : curve) EXPECT_NEAR(t, 1.0, 1e-12);
  }
  const Matrix h = build_preset(Preset::dim5, 0.0, 0.5, 0.0);
  EXPECT_EQ(error_code([&] {
              (void)metric_positivity_interval(h, e1, std::vector<double>{0, 0, 1, 0, 0}, 1.5, -1.0, 2.0, 31);
            }),
            ErrorCode::SeedNotPositive);
}
