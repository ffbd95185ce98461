#pragma once

#include <string_view>
#include <vector>

#include "ptspectra/chebyshev.hpp"
#include "ptspectra/linalg.hpp"
#include "ptspectra/model.hpp"

namespace ptspectra {

enum class Family { z0, z1 };
enum class Reality { all_real, complex_pairs, degenerate };

std::string_view to_string(Family f);
std::string_view to_string(Reality r);

/// Partitioned form of a lattice Hamiltonian in the Chebyshev basis: poles d
/// on the diagonal, alpha/beta the rotated couplings, u the central element.
struct ReducedModel {
  int M = 1;
  double u = 0.0;
  CVector alpha;
  CVector beta;
  std::vector<double> d;  // ascending, d[k] = -d[M-1-k]
  bool degenerate_d = false;
};

ReducedModel reduced_model(const BasisTransform& tb);
ReducedModel reduced_model(const Matrix& h, int M);

/// [[diag(d), alpha, 0], [beta^H, u, alpha^H], [0, beta, diag(d)]]
Matrix reduced_hamiltonian(const ReducedModel& rm);

/// Pole residues c_i = conj(beta_i) alpha_i + conj(alpha_i) beta_i = 2 Re(conj(alpha_i) beta_i).
std::vector<double> residues(const ReducedModel& rm);

/// Large-energy coefficient G = sum_i c_i of R(eps) ~ G / eps.
double asymptotic_coefficient(const ReducedModel& rm);

/// Energies, family tags and vectors. Vectors are unit norm. In the partial
/// results of z0_states / z1_states the vectors live in the reduced basis;
/// full_spectrum and left_eigensystem return them in the original basis.
struct SpectrumResult {
  CVector energies;
  std::vector<Family> family;
  std::vector<CVector> right_vectors;
  std::vector<CVector> left_vectors;
  Reality reality = Reality::all_real;
  bool reduced_path = false;
};

/// M parameter-independent states at eps = d_j, middle component zero, with
/// (x_j, y_j) fixed by the middle-row constraint conj(beta_j) x_j + conj(alpha_j) y_j = 0.
SpectrumResult z0_states(const ReducedModel& rm);

/// R(eps) = sum_i c_i / (eps - d_i).
double secular_R(const ReducedModel& rm, double eps);

struct SecularRoots {
  std::vector<double> roots;  // ascending
  bool complete = false;      // roots.size() == M + 1
};

/// Real solutions of eps = u + R(eps) by sign-change scanning between poles
/// and bisection. Fewer than M+1 roots means some z=1 energies left the real
/// axis (or sit on a pole); the dense solver is then authoritative.
SecularRoots secular_roots(const ReducedModel& rm);

/// One normalized (x, 1, y) state per root, x = alpha / (eps - d), y = beta / (eps - d).
SpectrumResult z1_states(const ReducedModel& rm, const std::vector<double>& roots);

/// Complete right eigensystem of a lattice Hamiltonian of dimension 2M+1.
/// Uses the reduced (secular) path when every energy is real and simple,
/// otherwise the dense eigensolver with families tagged by proximity to d.
SpectrumResult full_spectrum(const Matrix& h, int M);

/// As full_spectrum, plus left_vectors[j]: eigenvector of h^H for conj(energies[j]).
/// On the reduced path these come from the alpha <-> beta interchange.
SpectrumResult left_eigensystem(const Matrix& h, int M);

/// Tolerance for calling an eigenvalue real: 1e-8 * max(1, scale).
double imaginary_tolerance(double scale);

/// Classifies a numerically computed spectrum. Conjugate pairs whose split is
/// at the level of eigensolver noise around a defective eigenvalue (within
/// 1e-6 * max(1, scale) of each other, with a real mean) count as real;
/// a real spectrum with a gap <= 1e-8 * max(1, scale) is `degenerate`.
Reality classify_spectrum(const CVector& energies, double scale);

}  // namespace ptspectra
