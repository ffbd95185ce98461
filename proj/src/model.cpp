#include "ptspectra/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptspectra/chebyshev.hpp"

namespace ptspectra {

namespace {

template <class T>
DenseMatrix<T> lattice(int M, const T& u, const std::vector<T>& w, const std::vector<T>& v) {
  const auto m = static_cast<std::size_t>(M);
  const std::size_t n = 2 * m + 1;
  DenseMatrix<T> h(n, n);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    h(i, i + 1) = h(i + 1, i) = T(-1);
    h(m + 1 + i, m + 2 + i) = h(m + 2 + i, m + 1 + i) = T(-1);
  }
  for (std::size_t j = 0; j < m; ++j) {
    h(j, m) = w[j];
    h(m + 1 + j, m) = v[j];
    h(m, m - 1 - j) = conj_of(v[j]);
    h(m, m + 1 + j) = conj_of(w[m - 1 - j]);
  }
  h(m, m) = u;
  return h;
}

void check_lengths(const HamiltonianSpec& spec, bool need_v) {
  if (spec.M < 1) throw Error(ErrorCode::DimensionMismatch, "M must be >= 1");
  const auto m = static_cast<std::size_t>(spec.M);
  if (spec.w.size() != m) {
    throw Error(ErrorCode::DimensionMismatch,
                "w has " + std::to_string(spec.w.size()) + " entries, M = " + std::to_string(spec.M));
  }
  if (need_v && spec.v.size() != m) {
    throw Error(ErrorCode::DimensionMismatch,
                "v has " + std::to_string(spec.v.size()) + " entries, M = " + std::to_string(spec.M));
  }
}

CVector ma_v(int M) {
  CVector v(static_cast<std::size_t>(M), Complex(0.0));
  v[0] = -1.0;
  return v;
}

Rational exact(double x) {
  // cpp_rational construction from a double is exact (binary fraction).
  return Rational(x);
}

std::vector<Rational> exact_real(const CVector& xs) {
  std::vector<Rational> out;
  out.reserve(xs.size());
  for (const auto& z : xs) {
    if (z.imag() != 0.0) throw Error(ErrorCode::NonRealCouplings, "exact build needs real couplings");
    out.push_back(exact(z.real()));
  }
  return out;
}

}  // namespace

std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::general: return "general";
    case Preset::ma: return "ma";
    case Preset::hami5: return "hami5";
    case Preset::hami7: return "hami7";
    case Preset::hami27: return "hami27";
    case Preset::dim5: return "dim5";
  }
  return "general";
}

Preset parse_preset(std::string_view name) {
  for (Preset p : {Preset::general, Preset::ma, Preset::hami5, Preset::hami7, Preset::hami27,
                   Preset::dim5}) {
    if (to_string(p) == name) return p;
  }
  throw Error(ErrorCode::UnknownPreset, std::string(name));
}

bool is_named_preset(Preset p) { return p != Preset::general && p != Preset::ma; }

HamiltonianSpec expand_preset(const HamiltonianSpec& spec) {
  HamiltonianSpec out = spec;
  const double q = spec.q;
  const double r = spec.r;
  const double s = spec.s;
  switch (spec.preset) {
    case Preset::general:
      return out;
    case Preset::ma:
      out.v = ma_v(spec.M);
      return out;
    case Preset::hami5:
      out.preset = Preset::general;
      out.M = 2;
      out.u = 0.0;
      out.w = {r, -1.0 + s};
      out.v = {-1.0 - s, -r};
      return out;
    case Preset::hami7:
      out.preset = Preset::general;
      out.M = 3;
      out.u = 0.0;
      out.w = {q, r, -1.0 + s};
      out.v = {-1.0 - s, -r, -q};
      return out;
    case Preset::hami27:
      out.preset = Preset::ma;
      out.M = 3;
      out.u = 0.0;
      out.w = {q, r, -1.0 + s};
      out.v = ma_v(3);
      return out;
    case Preset::dim5:
      out.preset = Preset::ma;
      out.M = 2;
      out.u = 0.0;
      out.w = {r, -1.0 + s};
      out.v = ma_v(2);
      return out;
  }
  throw Error(ErrorCode::UnknownPreset, "unhandled preset");
}

Matrix parity_matrix(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "parity_matrix needs n >= 1");
  const auto m = static_cast<std::size_t>(n);
  Matrix p(m, m);
  for (std::size_t i = 0; i < m; ++i) p(i, m - 1 - i) = 1.0;
  return p;
}

Matrix build_general(const HamiltonianSpec& spec) {
  if (spec.preset != Preset::general) {
    throw Error(ErrorCode::InvalidArgument, "build_general expects preset 'general'");
  }
  check_lengths(spec, true);
  return lattice<Complex>(spec.M, Complex(spec.u), spec.w, spec.v);
}

Matrix build_ma(const HamiltonianSpec& spec) {
  if (spec.preset != Preset::ma) throw Error(ErrorCode::InvalidArgument, "build_ma expects preset 'ma'");
  check_lengths(spec, false);
  for (const auto& z : spec.w) {
    if (z.imag() != 0.0) throw Error(ErrorCode::NonRealCouplings, "ma couplings w must be real");
  }
  if (!spec.v.empty() && spec.v != ma_v(spec.M)) {
    throw Error(ErrorCode::InvalidArgument, "ma model fixes v = (-1, 0, ..., 0)");
  }
  return lattice<Complex>(spec.M, Complex(spec.u), spec.w, ma_v(spec.M));
}

Matrix build_preset(Preset name, double q, double r, double s) {
  if (!is_named_preset(name)) {
    throw Error(ErrorCode::UnknownPreset, std::string(to_string(name)) + " is not a named preset");
  }
  HamiltonianSpec spec;
  spec.preset = name;
  spec.q = q;
  spec.r = r;
  spec.s = s;
  return build(spec);
}

Matrix build(const HamiltonianSpec& spec) {
  const HamiltonianSpec full = expand_preset(spec);
  return full.preset == Preset::ma ? build_ma(full) : build_general(full);
}

RationalMatrix build_exact(const HamiltonianSpec& spec) {
  HamiltonianSpec full = expand_preset(spec);
  check_lengths(full, true);
  return lattice<Rational>(full.M, exact(full.u), exact_real(full.w), exact_real(full.v));
}

bool check_pt_symmetry(const Matrix& h) {
  if (!h.is_square()) return false;
  const std::size_t n = h.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Complex ph = h(n - 1 - i, j);
      const Complex hp = std::conj(h(n - 1 - j, i));
      if (std::abs(ph - hp) > 1e-12) return false;
    }
  }
  return true;
}

Matrix basis_unitary(int M) {
  const ChebyshevBasis cheb = chebyshev_eig(M);
  const auto m = static_cast<std::size_t>(M);
  Matrix u(2 * m + 1, 2 * m + 1);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      u(k, j) = cheb.u_d(k, m - 1 - j);           // U_D P
      u(m + 1 + k, m + 1 + j) = cheb.u_d(k, j);  // U_D
    }
  }
  u(m, m) = 1.0;
  return u;
}

BasisTransform transform_basis(const Matrix& h, int M) {
  if (M < 1 || !h.is_square() || h.rows() != static_cast<std::size_t>(2 * M + 1)) {
    throw Error(ErrorCode::DimensionMismatch, "expected a square matrix of dimension 2M+1");
  }
  const auto m = static_cast<std::size_t>(M);
  const std::size_t n = 2 * m + 1;
  // Corner blocks must be the -1 tridiagonal, off-corner blocks zero.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == m || j == m) continue;
      const bool same_block = (i < m) == (j < m);
      const bool neighbours = same_block && (i + 1 == j || j + 1 == i);
      const Complex expected = neighbours ? Complex(-1.0) : Complex(0.0);
      if (std::abs(h(i, j) - expected) > 1e-12) {
        throw Error(ErrorCode::InvalidArgument, "matrix is not a partitioned lattice Hamiltonian");
      }
    }
  }

  const ChebyshevBasis cheb = chebyshev_eig(M);
  BasisTransform out;
  out.d = cheb.d;
  out.u = h(m, m).real();
  out.unitary = basis_unitary(M);
  out.reduced = out.unitary * h * adjoint(out.unitary);

  out.alpha.assign(m, Complex(0.0));
  out.beta.assign(m, Complex(0.0));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      out.alpha[k] += cheb.u_d(k, j) * h(m - 1 - j, m);
      out.beta[k] += cheb.u_d(k, j) * h(m + 1 + j, m);
    }
  }
  return out;
}

}  // namespace ptspectra
