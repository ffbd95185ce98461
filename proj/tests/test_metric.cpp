#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ptspectra/metric.hpp"
#include "ptspectra/spectrum.hpp"
#include "test_support.hpp"

using namespace ptspectra;
using namespace ptspectra::testing;

namespace {

Matrix dim5_half() { return build_preset(Preset::dim5, 0.0, 0.5, 0.0); }

std::vector<double> ssp_row(double xi) { return {1.0, 0.0, xi, 0.0, 0.0}; }

// Real MA models with a real simple spectrum, drawn by rejection.
Matrix random_real_ma(std::mt19937_64& rng, int M) {
  for (;;) {
    const Matrix h = build(random_ma_spec(rng, M));
    if (full_spectrum(h, M).reality == Reality::all_real) return h;
  }
}

}  // namespace

TEST(Recurrent, ReproducesReferenceMatrixExactly) {
  const RationalMatrix h = build_exact(preset(Preset::dim5, 0.0, 0.5, 0.0));
  for (const Rational& xi : {Rational(0), Rational(1, 4), Rational(-1, 4), Rational(3, 7)}) {
    const std::vector<Rational> row = {Rational(1), Rational(0), xi, Rational(0), Rational(0)};
    EXPECT_EQ(metric_recurrent_exact(h, row), ssp_literal(xi));
  }
}

TEST(Recurrent, FloatingPathMatchesReferenceMatrix) {
  for (const double xi : {0.0, 0.25, -0.25, 0.1}) {
    const MetricCandidate m = metric_recurrent(dim5_half(), ssp_row(xi));
    EXPECT_LE(max_entry_diff(m.theta, to_complex(ssp_literal(Rational(xi)))), 1e-14);
    EXPECT_EQ(m.provenance, MetricProvenance::recurrent);
    EXPECT_EQ(m.parameters, ssp_row(xi));
    EXPECT_LE(m.residual, 1e-12);
    EXPECT_TRUE(is_hermitian(m.theta));
  }
}

TEST(Recurrent, ReferenceEigenvaluesAtZero) {
  const MetricCandidate m = metric_recurrent(dim5_half(), ssp_row(0.0));
  ASSERT_EQ(m.eigenvalues.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(m.eigenvalues[k], ssp_eigenvalues_at_zero()[k], 1e-8);
  EXPECT_TRUE(m.positive_definite);
}

TEST(Recurrent, ReferenceSecularQuintic) {
  const Polynomial<Rational> p = char_poly(ssp_literal(Rational(0)));
  const std::vector<Rational> want = {Rational(-9, 32), Rational(181, 64), Rational(-547, 64),
                                      Rational(21, 2),  Rational(-11, 2),  Rational(1)};
  EXPECT_EQ(p.coefficients, want);
  EXPECT_EQ(p(Rational(1)), Rational(0));
}

TEST(Recurrent, HermitianInputGivesIdentity) {
  // Zero coupling leaves a zero subdiagonal at the middle site, so the
  // Hermitian case is exercised on a plain -1 chain.
  for (std::size_t n = 2; n <= 9; ++n) {
    Matrix chain(n, n);
    for (std::size_t k = 0; k + 1 < n; ++k) chain(k, k + 1) = chain(k + 1, k) = -1.0;
    std::vector<double> e1(n, 0.0);
    e1[0] = 1.0;
    EXPECT_EQ(metric_recurrent(chain, e1).theta, Matrix::identity(n));
  }
}

TEST(Recurrent, ZeroSubdiagonalRejected) {
  HamiltonianSpec spec;
  spec.M = 2;
  spec.w = {0.5, -0.7};
  spec.v = {0.0, -0.5};
  const auto code = error_code([&] { (void)metric_recurrent(build(spec), std::vector<double>{1, 0, 0, 0, 0}); });
  ASSERT_TRUE(code.has_value());
  EXPECT_EQ(*code, ErrorCode::ZeroSubdiagonal);
}

TEST(Recurrent, InputChecks) {
  const Matrix h = dim5_half();
  auto code = error_code([&] { (void)metric_recurrent(h, std::vector<double>{1, 0, 0}); });
  EXPECT_EQ(code, ErrorCode::DimensionMismatch);
  Matrix full = h;
  full(4, 0) = 0.3;
  code = error_code([&] { (void)metric_recurrent(full, ssp_row(0.0)); });
  EXPECT_EQ(code, ErrorCode::NotHessenberg);
  code = error_code([&] { (void)metric_recurrent(Matrix(2, 3), std::vector<double>{1, 0}); });
  EXPECT_EQ(code, ErrorCode::NonSquare);
}

TEST(Recurrent, ComplexInputNeedsOptIn) {
  std::mt19937_64 rng(67);
  HamiltonianSpec spec = random_general_spec(rng, 2);
  spec.v = {Complex(-1.0), Complex(0.0)};
  const Matrix h = build(spec);
  const auto code = error_code([&] { (void)metric_recurrent(h, ssp_row(0.0)); });
  EXPECT_EQ(code, ErrorCode::NonRealCouplings);
  // With the opt-in the residual check decides; either outcome is legal.
  try {
    const MetricCandidate m = metric_recurrent(h, ssp_row(0.0), {.experimental_complex = true});
    EXPECT_LE(m.residual, 1e-9 * residual_scale(h, m.theta));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentSystem);
  }
}

TEST(Recurrent, LinearInFirstRow) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int M = 1 + trial % 4;
    const Matrix h = build(random_ma_spec(rng, M));
    const std::size_t n = h.rows();
    std::vector<double> f(n);
    std::vector<double> g(n);
    std::vector<double> mix(n);
    const double a = uni(rng);
    const double b = uni(rng);
    for (std::size_t k = 0; k < n; ++k) {
      f[k] = uni(rng);
      g[k] = uni(rng);
      mix[k] = a * f[k] + b * g[k];
    }
    const Matrix tf = metric_recurrent(h, f).theta;
    const Matrix tg = metric_recurrent(h, g).theta;
    const Matrix tm = metric_recurrent(h, mix).theta;
    const double scale = std::max({1.0, max_abs(tf), max_abs(tg)});
    EXPECT_LE(max_entry_diff(tm, Complex(a) * tf + Complex(b) * tg), 1e-12 * scale) << trial;
  }
}

TEST(Recurrent, ResidualInvariantOnRandomModels) {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix h = build(random_ma_spec(rng, 1 + trial % 5));
    std::vector<double> row(h.rows());
    for (double& x : row) x = uni(rng);
    const MetricCandidate m = metric_recurrent(h, row);
    EXPECT_TRUE(is_hermitian(m.theta, 1e-12));
    EXPECT_LE(quasi_hermiticity_residual(h, m.theta), 1e-9 * residual_scale(h, m.theta));
    EXPECT_EQ(m.positive_definite, m.eigenvalues.front() > kPdTol);
  }
}

TEST(Spectral, HermitianUnitWeightsGiveIdentity) {
  std::mt19937_64 rng(79);
  for (int M = 1; M <= 4; ++M) {
    HamiltonianSpec spec = random_general_spec(rng, M);
    for (std::size_t k = 0; k < spec.w.size(); ++k) spec.v[k] = spec.w[spec.w.size() - 1 - k];
    const Matrix h = build(spec);
    ASSERT_TRUE(is_hermitian(h));
    const std::vector<double> ones(h.rows(), 1.0);
    const MetricCandidate m = metric_spectral(h, M, ones);
    EXPECT_LE(max_entry_diff(m.theta, Matrix::identity(h.rows())), 1e-10);
    EXPECT_EQ(m.provenance, MetricProvenance::spectral);
  }
}

TEST(Spectral, RandomWeightsInsideDomain) {
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> weight(1e-3, 2.0);
  const Matrix h = build_preset(Preset::hami5, 0.0, 0.5, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> k2(5);
    for (double& x : k2) x = weight(rng);
    const MetricCandidate m = metric_spectral(h, 2, k2);
    EXPECT_TRUE(m.positive_definite);
    EXPECT_LE(m.residual, 1e-9);
    EXPECT_LE(m.residual, 1e-9 * residual_scale(h, m.theta));
    EXPECT_EQ(m.parameters, k2);
  }
}

TEST(Spectral, Errors) {
  const std::vector<double> ones(5, 1.0);
  EXPECT_EQ(error_code([&] { (void)metric_spectral(build_preset(Preset::hami5, 0, 0.5, 0.5), 2, ones); }),
            ErrorCode::DegenerateSpectrum);
  EXPECT_EQ(error_code([&] { (void)metric_spectral(build_preset(Preset::hami5, 0, 0.5, 0.6), 2, ones); }),
            ErrorCode::ComplexSpectrum);
  EXPECT_EQ(error_code([&] {
              (void)metric_spectral(build_preset(Preset::hami5, 0, 0.5, 0.3), 2, std::vector<double>{1, 1, 0, 1, 1});
            }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(error_code([&] {
              (void)metric_spectral(build_preset(Preset::hami5, 0, 0.5, 0.3), 2, std::vector<double>{1, 1});
            }),
            ErrorCode::DimensionMismatch);
}

TEST(Residual, Examples) {
  std::mt19937_64 rng(89);
  const Matrix herm = random_hermitian(rng, 6);
  EXPECT_LE(quasi_hermiticity_residual(herm, Matrix::identity(6)), 1e-15);
  EXPECT_LE(quasi_hermiticity_residual(dim5_half(), to_complex(ssp_literal(Rational(1, 10)))), 1e-12);
  EXPECT_GT(quasi_hermiticity_residual(build_preset(Preset::hami5, 0, 0.5, 0.3), Matrix::identity(5)), 0.1);
  EXPECT_EQ(error_code([] { (void)quasi_hermiticity_residual(Matrix::identity(3), Matrix::identity(4)); }),
            ErrorCode::ShapeMismatch);
}

TEST(Positivity, Examples) {
  const Positivity ssp = positivity_check(to_complex(ssp_literal(Rational(0))));
  EXPECT_TRUE(ssp.positive_definite);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(ssp.eigenvalues[k], ssp_eigenvalues_at_zero()[k], 1e-8);
  EXPECT_TRUE(positivity_check(Matrix::identity(3)).positive_definite);
  EXPECT_FALSE(positivity_check(real_matrix({{1, 0}, {0, -1}})).positive_definite);
  EXPECT_FALSE(positivity_check(real_matrix({{1, 0}, {0, 1e-11}})).positive_definite);
  EXPECT_EQ(error_code([] { (void)positivity_check(real_matrix({{1, 2}, {0, 1}})); }), ErrorCode::NotHermitian);
}

TEST(Dyson, Examples) {
  const DysonMap id = dyson_map(Matrix::identity(3));
  EXPECT_LE(max_entry_diff(id.omega, Matrix::identity(3)), 1e-14);
  const DysonMap d = dyson_map(real_matrix({{4, 0}, {0, 1}}));
  EXPECT_LE(max_entry_diff(d.omega, real_matrix({{2, 0}, {0, 1}})), 1e-14);
  EXPECT_EQ(error_code([] { (void)dyson_map(real_matrix({{1, 0}, {0, -2}})); }), ErrorCode::NotPositiveDefinite);
}

TEST(Dyson, ReferenceMetricHermitizes) {
  const Matrix h = dim5_half();
  const Matrix theta = to_complex(ssp_literal(Rational(0)));
  const DysonMap dm = dyson_map(theta);
  EXPECT_LE(max_entry_diff(adjoint(dm.omega) * dm.omega, theta), 1e-10);
  EXPECT_LE(max_entry_diff(dm.omega * dm.omega_inverse, Matrix::identity(5)), 1e-10);
  const Matrix image = dm.hermitian_image(h);
  EXPECT_TRUE(is_hermitian(image, 1e-8));
  EXPECT_LE(multiset_distance(eig_general(h).eigenvalues, eig_general(image).eigenvalues), 1e-8);
}

TEST(Dyson, RandomSpectralMetrics) {
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> weight(0.1, 2.0);
  for (int trial = 0; trial < 15; ++trial) {
    const int M = 1 + trial % 4;
    const Matrix h = random_real_ma(rng, M);
    std::vector<double> k2(h.rows());
    for (double& x : k2) x = weight(rng);
    const MetricCandidate m = metric_spectral(h, M, k2);
    const Matrix image = dyson_map(m.theta).hermitian_image(h);
    EXPECT_TRUE(is_hermitian(image, 1e-8));
    EXPECT_LE(multiset_distance(eig_general(h).eigenvalues, eig_symmetric(image).eigenvalues), 1e-8);
  }
}

TEST(Observable, Examples) {
  const Matrix h = dim5_half();
  const Matrix theta = metric_recurrent(h, ssp_row(0.0)).theta;
  EXPECT_LE(observable_check(h, theta), 1e-9);
  EXPECT_EQ(observable_check(Matrix::identity(5), theta), 0.0);
  std::mt19937_64 rng(101);
  EXPECT_GT(observable_check(random_matrix(rng, 4, true), Matrix::identity(4)), 0.0);
}

TEST(BasisMap, IdentityAndRoundTrip) {
  EXPECT_LE(max_entry_diff(metric_basis_map(Matrix::identity(7), 3, BasisDirection::to_reduced), Matrix::identity(7)),
            1e-12);
  std::mt19937_64 rng(103);
  const Matrix theta = random_hermitian(rng, 5);
  const Matrix there = metric_basis_map(theta, 2, BasisDirection::to_reduced);
  EXPECT_LE(max_entry_diff(metric_basis_map(there, 2, BasisDirection::from_reduced), theta), 1e-12);
  EXPECT_EQ(error_code([&] { (void)metric_basis_map(theta, 3, BasisDirection::to_reduced); }),
            ErrorCode::ShapeMismatch);
}

TEST(BasisMap, ResidualPreserved) {
  const Matrix h = build_preset(Preset::hami5, 0.0, 0.5, 0.3);
  const MetricCandidate m = metric_spectral(h, 2, std::vector<double>{1, 2, 0.5, 1, 1.5});
  const BasisTransform t = transform_basis(h, 2);
  const Matrix reduced_theta = metric_basis_map(m.theta, 2, BasisDirection::to_reduced);
  EXPECT_LE(quasi_hermiticity_residual(t.reduced, reduced_theta), m.residual + 1e-10);
  const Matrix dim5 = dim5_half();
  const Matrix ssp = metric_recurrent(dim5, ssp_row(0.2)).theta;
  EXPECT_LE(quasi_hermiticity_residual(transform_basis(dim5, 2).reduced,
                                       metric_basis_map(ssp, 2, BasisDirection::to_reduced)),
            1e-10);
}

TEST(SpectralGauge, RecurrentCandidateProjectsOntoWeights) {
  const Matrix h = dim5_half();
  const SpectralCoordinates pd = spectral_coordinates(h, 2, metric_recurrent(h, ssp_row(0.0)).theta);
  EXPECT_LE(pd.reconstruction_error, 1e-8);
  EXPECT_TRUE(std::all_of(pd.kappa_sq.begin(), pd.kappa_sq.end(), [](double k) { return k > 0.0; }));

  // Outside the positivity window the same family needs a negative weight.
  const MetricCandidate bad = metric_recurrent(h, ssp_row(1.5));
  ASSERT_FALSE(bad.positive_definite);
  const SpectralCoordinates ind = spectral_coordinates(h, 2, bad.theta);
  EXPECT_LE(ind.reconstruction_error, 1e-8);
  EXPECT_TRUE(std::any_of(ind.kappa_sq.begin(), ind.kappa_sq.end(), [](double k) { return k < 0.0; }));

  // Round trip through metric_spectral.
  const std::vector<double> k2 = {0.3, 1.1, 2.0, 0.7, 1.4};
  const SpectralCoordinates back = spectral_coordinates(h, 2, metric_spectral(h, 2, k2).theta);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(back.kappa_sq[j], k2[j], 1e-8);
}

TEST(Provenance, Names) {
  EXPECT_EQ(to_string(MetricProvenance::recurrent), "recurrent");
  EXPECT_EQ(to_string(MetricProvenance::spectral), "spectral");
}
