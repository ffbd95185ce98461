#include "ptspectra/metric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptspectra/model.hpp"
#include "ptspectra/spectrum.hpp"

namespace ptspectra {

namespace {

constexpr double kResidualTol = 1e-9;
constexpr double kHessenbergTol = 1e-12;
constexpr double kConditionTol = 1e-6;
constexpr double kGapTol = 1e-8;

void require_square(const Matrix& m, const char* what) {
  if (!m.is_square()) throw Error(ErrorCode::NonSquare, std::string(what) + " must be square");
}

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || !a.is_square()) {
    throw Error(ErrorCode::ShapeMismatch,
                "shapes " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " and " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

// Fills theta row by row from h^H theta = theta h. Entry (i+1, j) for j >= i+1
// is the only unknown left in equation (i, j) once rows 0..i are known.
template <class T>
DenseMatrix<T> recurrence(const DenseMatrix<T>& h, const std::vector<T>& first_row) {
  const std::size_t n = h.rows();
  DenseMatrix<T> theta(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    theta(0, j) = first_row[j];
    theta(j, 0) = conj_of(first_row[j]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const T pivot = conj_of(h(i + 1, i));
    for (std::size_t j = i + 1; j < n; ++j) {
      // sum_{k<=i+1} conj(h(k,i)) theta(k,j) = sum_{k<=j+1} theta(i,k) h(k,j)
      T rhs(0);
      const std::size_t kmax = std::min(n - 1, j + 1);
      for (std::size_t k = 0; k <= kmax; ++k) rhs += theta(i, k) * h(k, j);
      for (std::size_t k = 0; k <= i; ++k) rhs -= conj_of(h(k, i)) * theta(k, j);
      theta(i + 1, j) = rhs / pivot;
      theta(j, i + 1) = conj_of(theta(i + 1, j));
    }
  }
  return theta;
}

bool negligible(const Rational& x) { return x == 0; }
bool negligible(const Complex& z) { return std::abs(z) <= kHessenbergTol; }

template <class T>
void check_recurrence_input(const DenseMatrix<T>& h, std::size_t row_size) {
  if (!h.is_square()) throw Error(ErrorCode::NonSquare, "h must be square");
  const std::size_t n = h.rows();
  if (row_size != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "first row has " + std::to_string(row_size) + " entries, h is " + std::to_string(n) + "x" +
                    std::to_string(n));
  }
  // A vanishing pivot is reported first: it is the specific failure.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (negligible(h(i + 1, i))) {
      throw Error(ErrorCode::ZeroSubdiagonal,
                  "recurrence pivot h(" + std::to_string(i + 1) + "," + std::to_string(i) + ") vanishes");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j + 1 < i; ++j) {
      if (!negligible(h(i, j))) {
        throw Error(ErrorCode::NotHessenberg, "h(" + std::to_string(i) + "," + std::to_string(j) +
                                                  ") is nonzero below the first subdiagonal");
      }
    }
  }
}

MetricCandidate finish(const Matrix& h, Matrix theta, MetricProvenance provenance, std::vector<double> params) {
  MetricCandidate out;
  out.residual = quasi_hermiticity_residual(h, theta);
  if (out.residual > kResidualTol * residual_scale(h, theta)) {
    throw Error(ErrorCode::InconsistentSystem,
                "residual " + std::to_string(out.residual) + " exceeds tolerance");
  }
  const Positivity pos = positivity_check(theta);
  out.theta = std::move(theta);
  out.eigenvalues = pos.eigenvalues;
  out.positive_definite = pos.positive_definite;
  out.provenance = provenance;
  out.parameters = std::move(params);
  return out;
}

}  // namespace

std::string_view to_string(MetricProvenance p) {
  return p == MetricProvenance::recurrent ? "recurrent" : "spectral";
}

RationalMatrix metric_recurrent_exact(const RationalMatrix& h, std::span<const Rational> first_row) {
  check_recurrence_input(h, first_row.size());
  RationalMatrix theta = recurrence(h, std::vector<Rational>(first_row.begin(), first_row.end()));
  const RationalMatrix res = adjoint(h) * theta - theta * h;
  for (const auto& x : res.entries()) {
    if (x != 0) throw Error(ErrorCode::InconsistentSystem, "h^T theta != theta h");
  }
  return theta;
}

MetricCandidate metric_recurrent(const Matrix& h, std::span<const double> first_row,
                                 const RecurrentOptions& options) {
  std::vector<double> params(first_row.begin(), first_row.end());
  if (is_real(h)) {
    RationalMatrix hq(h.rows(), h.cols());
    for (std::size_t i = 0; i < h.rows(); ++i) {
      for (std::size_t j = 0; j < h.cols(); ++j) hq(i, j) = Rational(h(i, j).real());
    }
    std::vector<Rational> row(first_row.begin(), first_row.end());
    check_recurrence_input(hq, row.size());
    const RationalMatrix theta = recurrence(hq, row);
    return finish(h, to_complex(theta), MetricProvenance::recurrent, std::move(params));
  }
  if (!options.experimental_complex) {
    throw Error(ErrorCode::NonRealCouplings, "recurrent construction needs a real h (see experimental flag)");
  }
  check_recurrence_input(h, first_row.size());
  std::vector<Complex> row(first_row.begin(), first_row.end());
  return finish(h, recurrence(h, row), MetricProvenance::recurrent, std::move(params));
}

MetricCandidate metric_spectral(const Matrix& h, int M, std::span<const double> kappa_sq) {
  require_square(h, "h");
  if (kappa_sq.size() != h.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "kappa_sq has " + std::to_string(kappa_sq.size()) +
                                                  " entries, expected " + std::to_string(h.rows()));
  }
  for (double k : kappa_sq) {
    if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa_sq entries must be positive");
  }
  const SpectrumResult sr = left_eigensystem(h, M);
  if (sr.reality == Reality::complex_pairs) {
    throw Error(ErrorCode::ComplexSpectrum, "spectrum has complex-conjugate pairs");
  }
  const double scale = std::max(1.0, frobenius_norm(h));
  for (std::size_t k = 1; k < sr.energies.size(); ++k) {
    if (sr.reality == Reality::degenerate || std::abs(sr.energies[k] - sr.energies[k - 1]) <= kGapTol * scale) {
      throw Error(ErrorCode::DegenerateSpectrum, "eigenvalue gap below threshold; h is at or near an EP");
    }
  }
  // A Jordan block splits by about sqrt(machine eps) in floating point, which
  // can pass the gap test; left and right vectors of such a pair are then
  // almost orthogonal.
  for (std::size_t j = 0; j < sr.energies.size(); ++j) {
    if (std::abs(inner(sr.left_vectors[j], sr.right_vectors[j])) < kConditionTol) {
      throw Error(ErrorCode::DegenerateSpectrum, "eigenbasis is numerically defective; h is at or near an EP");
    }
  }
  const std::size_t n = h.rows();
  Matrix theta(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const CVector& psi = sr.left_vectors[j];
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) theta(a, b) += kappa_sq[j] * psi[a] * std::conj(psi[b]);
    }
  }
  // Symmetrize away rounding.
  theta = Complex(0.5) * (theta + adjoint(theta));
  return finish(h, std::move(theta), MetricProvenance::spectral,
                std::vector<double>(kappa_sq.begin(), kappa_sq.end()));
}

double quasi_hermiticity_residual(const Matrix& h, const Matrix& theta) {
  require_same_shape(h, theta);
  return max_abs(adjoint(h) * theta - theta * h);
}

double residual_scale(const Matrix& h, const Matrix& theta) {
  return std::max(1.0, frobenius_norm(h) * frobenius_norm(theta));
}

Positivity positivity_check(const Matrix& theta) {
  Positivity out;
  out.eigenvalues = symmetric_eigenvalues(theta);
  out.positive_definite = !out.eigenvalues.empty() && out.eigenvalues.front() > kPdTol;
  return out;
}

Matrix DysonMap::hermitian_image(const Matrix& h) const { return omega * h * omega_inverse; }

DysonMap dyson_map(const Matrix& theta) {
  const EigenDecomposition e = eig_symmetric(theta);
  const std::size_t n = theta.rows();
  if (n == 0 || e.eigenvalues.front().real() <= 1e-12) {
    throw Error(ErrorCode::NotPositiveDefinite, "metric must be positive definite");
  }
  DysonMap out{Matrix(n, n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const double root = std::sqrt(e.eigenvalues[k].real());
    const CVector& v = e.right_vectors[k];
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const Complex vv = v[a] * std::conj(v[b]);
        out.omega(a, b) += root * vv;
        out.omega_inverse(a, b) += vv / root;
      }
    }
  }
  return out;
}

double observable_check(const Matrix& lambda, const Matrix& theta) {
  return quasi_hermiticity_residual(lambda, theta);
}

Matrix metric_basis_map(const Matrix& theta, int M, BasisDirection direction) {
  if (M < 1 || !theta.is_square() || theta.rows() != static_cast<std::size_t>(2 * M + 1)) {
    throw Error(ErrorCode::ShapeMismatch, "metric must be (2M+1)x(2M+1)");
  }
  const Matrix u = basis_unitary(M);
  return direction == BasisDirection::to_reduced ? u * theta * adjoint(u) : adjoint(u) * theta * u;
}

SpectralCoordinates spectral_coordinates(const Matrix& h, int M, const Matrix& theta) {
  require_same_shape(h, theta);
  const SpectrumResult sr = left_eigensystem(h, M);
  if (sr.reality == Reality::complex_pairs) {
    throw Error(ErrorCode::ComplexSpectrum, "spectrum has complex-conjugate pairs");
  }
  if (sr.reality == Reality::degenerate) {
    throw Error(ErrorCode::DegenerateSpectrum, "spectrum is degenerate");
  }
  const std::size_t n = h.rows();
  Matrix a(n, n);
  CVector b(n);
  for (std::size_t k = 0; k < n; ++k) {
    const CVector& right = sr.right_vectors[k];
    b[k] = inner(right, theta * std::span<const Complex>(right));
    for (std::size_t j = 0; j < n; ++j) a(k, j) = std::norm(inner(right, sr.left_vectors[j]));
  }
  const CVector x = solve_linear(a, b);

  SpectralCoordinates out;
  Matrix rebuilt(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.kappa_sq.push_back(x[j].real());
    const CVector& psi = sr.left_vectors[j];
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < n; ++q) rebuilt(p, q) += x[j].real() * psi[p] * std::conj(psi[q]);
    }
  }
  out.reconstruction_error = max_abs(rebuilt - theta);
  return out;
}

}  // namespace ptspectra
