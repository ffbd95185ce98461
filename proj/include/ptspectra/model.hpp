#pragma once

#include <string_view>
#include <vector>

#include "ptspectra/linalg.hpp"

namespace ptspectra {

/// `general` and `ma` are parameterized by (M, u, w, v); the named presets by
/// (q, r, s) and expand to one of the two families:
///   hami5  -> general(M=2, u=0, w=(r, -1+s),    v=(-1-s, -r))
///   hami7  -> general(M=3, u=0, w=(q, r, -1+s), v=(-1-s, -r, -q))
///   hami27 -> ma(M=3, u=0, w=(q, r, -1+s))
///   dim5   -> ma(M=2, u=0, w=(r, -1+s))
enum class Preset { general, ma, hami5, hami7, hami27, dim5 };

std::string_view to_string(Preset p);
Preset parse_preset(std::string_view name);
bool is_named_preset(Preset p);

struct HamiltonianSpec {
  Preset preset = Preset::general;
  int M = 1;
  double u = 0.0;
  CVector w;  // w_1 .. w_M, upper part of the middle column
  CVector v;  // v_1 .. v_M, lower part of the middle column
  double q = 0.0;
  double r = 0.0;
  double s = 0.0;

  int dimension() const { return 2 * M + 1; }
};

/// Rewrites a named preset as the `general` or `ma` spec it stands for, with
/// (M, u, w, v) filled in. `general` and `ma` specs are returned unchanged
/// (for `ma`, v is filled with (-1, 0, ..., 0)).
HamiltonianSpec expand_preset(const HamiltonianSpec& spec);

/// Antidiagonal parity matrix of size n.
Matrix parity_matrix(int n);

/// N = 2M+1 lattice Hamiltonian: two -1 tridiagonal corner blocks, w and v in
/// the middle column, (v_M*, ..., v_1*, u, w_M*, ..., w_1*) as the middle row.
Matrix build_general(const HamiltonianSpec& spec);

/// Maximally asymmetric member: v = (-1, 0, ..., 0), w real. Output is real.
Matrix build_ma(const HamiltonianSpec& spec);

/// One of hami5, hami7, hami27, dim5 with (q, r, s) substituted.
Matrix build_preset(Preset name, double q, double r, double s);

/// Dispatches on spec.preset.
Matrix build(const HamiltonianSpec& spec);

/// Same matrix in exact rational arithmetic; every double converts exactly.
/// Requires real couplings.
RationalMatrix build_exact(const HamiltonianSpec& spec);

/// True iff max |P h - h^H P| <= 1e-12.
bool check_pt_symmetry(const Matrix& h);

/// Result of rotating the corner blocks onto the Chebyshev eigenbasis:
/// reduced = U h U^H = [[diag(d), alpha, 0], [beta^H, u, alpha^H], [0, beta, diag(d)]]
/// with U = blockdiag(U_D P, 1, U_D).
struct BasisTransform {
  Matrix reduced;
  Matrix unitary;
  CVector alpha;  // U_D P w
  CVector beta;   // U_D v
  std::vector<double> d;
  double u = 0.0;
};

/// U = blockdiag(U_D P, 1, U_D) for dimension 2M+1.
Matrix basis_unitary(int M);

/// h must be a partitioned lattice Hamiltonian of dimension 2M+1.
BasisTransform transform_basis(const Matrix& h, int M);

}  // namespace ptspectra
