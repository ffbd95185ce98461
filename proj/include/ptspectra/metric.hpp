#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "ptspectra/linalg.hpp"

namespace ptspectra {

/// Positive definiteness threshold on the smallest metric eigenvalue.
inline constexpr double kPdTol = 1e-10;

enum class MetricProvenance { recurrent, spectral };
std::string_view to_string(MetricProvenance p);

struct MetricCandidate {
  Matrix theta;
  double residual = 0.0;            // max |h^H theta - theta h|
  std::vector<double> eigenvalues;  // ascending
  bool positive_definite = false;
  MetricProvenance provenance = MetricProvenance::recurrent;
  std::vector<double> parameters;   // first row (recurrent) or kappa^2 (spectral)
};

struct RecurrentOptions {
  /// Allow complex Hessenberg input (Hermitian theta). Only the final residual
  /// check vouches for the result.
  bool experimental_complex = false;
};

/// Recurrent metric construction from a free first row. h must be upper
/// Hessenberg with a nonzero first subdiagonal (true for the maximally
/// asymmetric family). Equation (i, j), i < j, of h^H theta = theta h is
/// solved for theta(i+1, j) in row-major order. Real input runs in exact
/// rational arithmetic and is rounded once at the end.
MetricCandidate metric_recurrent(const Matrix& h, std::span<const double> first_row,
                                 const RecurrentOptions& options = {});

/// Exact variant; throws InconsistentSystem unless h^T theta = theta h holds exactly.
RationalMatrix metric_recurrent_exact(const RationalMatrix& h, std::span<const Rational> first_row);

/// theta = sum_j kappa_j^2 |Psi_j><Psi_j| over unit-norm eigenvectors of h^H.
/// Needs a real, simple spectrum.
MetricCandidate metric_spectral(const Matrix& h, int M, std::span<const double> kappa_sq);

/// max |h^H theta - theta h|
double quasi_hermiticity_residual(const Matrix& h, const Matrix& theta);

/// Scale used by the residual invariant: max(1, ||h||_F ||theta||_F).
double residual_scale(const Matrix& h, const Matrix& theta);

struct Positivity {
  bool positive_definite = false;
  std::vector<double> eigenvalues;
};

Positivity positivity_check(const Matrix& theta);

/// Hermitian square root of the metric, theta = omega^H omega = omega^2.
struct DysonMap {
  Matrix omega;
  Matrix omega_inverse;

  /// omega h omega^{-1}; Hermitian whenever h^H theta = theta h.
  Matrix hermitian_image(const Matrix& h) const;
};

DysonMap dyson_map(const Matrix& theta);

/// max |lambda^H theta - theta lambda|; zero iff lambda is an admissible observable.
double observable_check(const Matrix& lambda, const Matrix& theta);

enum class BasisDirection {
  to_reduced,    // U theta U^H
  from_reduced,  // U^H theta U
};

/// Moves a metric between the lattice basis and the Chebyshev-rotated basis.
Matrix metric_basis_map(const Matrix& theta, int M, BasisDirection direction);

/// Coordinates of theta in the spectral family, from the linear system
/// sum_j |<psi_k|Psi_j>|^2 kappa_j^2 = <psi_k|theta|psi_k>. Negative entries
/// mean theta is indefinite.
struct SpectralCoordinates {
  std::vector<double> kappa_sq;
  double reconstruction_error = 0.0;  // max |theta - sum kappa^2 Psi Psi^H|
};

SpectralCoordinates spectral_coordinates(const Matrix& h, int M, const Matrix& theta);

}  // namespace ptspectra
