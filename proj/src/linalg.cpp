#include "ptspectra/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ptspectra {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const Matrix& m, const char* what) {
  if (!m.is_square()) {
    throw Error(ErrorCode::NonSquare, std::string(what) + ": " + std::to_string(m.rows()) + "x" +
                                          std::to_string(m.cols()));
  }
}

// Rotation G = [c s; -conj(s) c] with G [x; y] = [r; 0].
struct Givens {
  double c;
  Complex s;
};

Givens make_givens(Complex x, Complex y) {
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  if (ay == 0.0) return {1.0, 0.0};
  if (ax == 0.0) return {0.0, 1.0};
  const double nrm = std::hypot(ax, ay);
  return {ax / nrm, (x / ax) * std::conj(y) / nrm};
}

void rotate_rows(Matrix& a, std::size_t k, std::size_t col_begin, const Givens& g) {
  for (std::size_t j = col_begin; j < a.cols(); ++j) {
    const Complex p = a(k, j);
    const Complex q = a(k + 1, j);
    a(k, j) = g.c * p + g.s * q;
    a(k + 1, j) = -std::conj(g.s) * p + g.c * q;
  }
}

// Right-multiplies columns k, k+1 of rows [0, row_end) by G^H.
void rotate_cols(Matrix& a, std::size_t k, std::size_t row_end, const Givens& g) {
  for (std::size_t i = 0; i < row_end; ++i) {
    const Complex p = a(i, k);
    const Complex q = a(i, k + 1);
    a(i, k) = g.c * p + std::conj(g.s) * q;
    a(i, k + 1) = -g.s * p + g.c * q;
  }
}

// Householder reduction A = Q H Q^H with H upper Hessenberg.
void reduce_to_hessenberg(Matrix& h, Matrix& q) {
  const std::size_t n = h.rows();
  if (n < 3) return;
  CVector v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t r = k + 1; r < n; ++r) xnorm = std::hypot(xnorm, std::abs(h(r, k)));
    if (xnorm == 0.0) continue;
    const Complex x0 = h(k + 1, k);
    const Complex phase = std::abs(x0) == 0.0 ? Complex(1.0) : x0 / std::abs(x0);
    const Complex alpha = -phase * xnorm;
    std::fill(v.begin(), v.end(), Complex(0.0));
    for (std::size_t r = k + 1; r < n; ++r) v[r] = h(r, k);
    v[k + 1] -= alpha;
    double vnorm = 0.0;
    for (std::size_t r = k + 1; r < n; ++r) vnorm = std::hypot(vnorm, std::abs(v[r]));
    if (vnorm == 0.0) continue;
    for (std::size_t r = k + 1; r < n; ++r) v[r] /= vnorm;

    for (std::size_t j = k; j < n; ++j) {
      Complex dot = 0.0;
      for (std::size_t r = k + 1; r < n; ++r) dot += std::conj(v[r]) * h(r, j);
      for (std::size_t r = k + 1; r < n; ++r) h(r, j) -= 2.0 * v[r] * dot;
    }
    for (std::size_t i = 0; i < n; ++i) {
      Complex dot = 0.0;
      for (std::size_t c = k + 1; c < n; ++c) dot += h(i, c) * v[c];
      for (std::size_t c = k + 1; c < n; ++c) h(i, c) -= 2.0 * dot * std::conj(v[c]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      Complex dot = 0.0;
      for (std::size_t c = k + 1; c < n; ++c) dot += q(i, c) * v[c];
      for (std::size_t c = k + 1; c < n; ++c) q(i, c) -= 2.0 * dot * std::conj(v[c]);
    }
    h(k + 1, k) = alpha;
    for (std::size_t r = k + 2; r < n; ++r) h(r, k) = 0.0;
  }
}

Complex wilkinson_shift(const Matrix& h, std::size_t hi) {
  const Complex a = h(hi - 1, hi - 1);
  const Complex b = h(hi - 1, hi);
  const Complex c = h(hi, hi - 1);
  const Complex d = h(hi, hi);
  const Complex half_tr = 0.5 * (a + d);
  const Complex disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  const Complex mu1 = half_tr + disc;
  const Complex mu2 = half_tr - disc;
  return std::abs(mu1 - d) <= std::abs(mu2 - d) ? mu1 : mu2;
}

// Shifted QR iteration on an upper Hessenberg matrix, driving it to upper
// triangular form while accumulating the unitary factor into z.
void hessenberg_qr(Matrix& h, Matrix& z) {
  const std::size_t n = h.rows();
  if (n < 2) return;
  const double scale = std::max(frobenius_norm(h), std::numeric_limits<double>::min());
  const std::size_t max_iterations = 100 * n;
  std::size_t total = 0;
  std::size_t since_deflation = 0;
  std::size_t hi = n - 1;

  while (hi > 0) {
    std::size_t lo = hi;
    while (lo > 0) {
      double s = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
      if (s == 0.0) s = scale;
      if (std::abs(h(lo, lo - 1)) <= kEps * s) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      --hi;
      since_deflation = 0;
      continue;
    }
    if (++total > max_iterations) {
      throw Error(ErrorCode::IterationLimitExceeded,
                  "QR iteration did not converge in " + std::to_string(max_iterations) + " sweeps");
    }
    ++since_deflation;

    Complex mu;
    if (since_deflation % 10 == 0) {
      // exceptional shift to break cycles
      const double kick = std::abs(h(hi, hi - 1).real()) +
                          (hi >= 2 ? std::abs(h(hi - 1, hi - 2).real()) : 0.0);
      mu = h(hi, hi) + Complex(0.75 * kick, 0.4375 * kick);
    } else {
      mu = wilkinson_shift(h, hi);
    }

    Complex x = h(lo, lo) - mu;
    Complex y = h(lo + 1, lo);
    for (std::size_t k = lo; k < hi; ++k) {
      if (k > lo) {
        x = h(k, k - 1);
        y = h(k + 1, k - 1);
      }
      const Givens g = make_givens(x, y);
      rotate_rows(h, k, k > lo ? k - 1 : lo, g);
      if (k > lo) h(k + 1, k - 1) = 0.0;
      rotate_cols(h, k, std::min(k + 3, hi + 1), g);
      rotate_cols(z, k, n, g);
    }
  }
}

// Eigenvectors of the upper triangular Schur factor, mapped back through z.
std::vector<CVector> schur_eigenvectors(const Matrix& t, const Matrix& z) {
  const std::size_t n = t.rows();
  const double small = kEps * std::max(frobenius_norm(t), std::numeric_limits<double>::min());
  std::vector<CVector> vectors;
  vectors.reserve(n);
  CVector x(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex lambda = t(k, k);
    std::fill(x.begin(), x.end(), Complex(0.0));
    x[k] = 1.0;
    for (std::size_t ii = k; ii-- > 0;) {
      Complex sum = 0.0;
      for (std::size_t j = ii + 1; j <= k; ++j) sum += t(ii, j) * x[j];
      Complex den = t(ii, ii) - lambda;
      if (std::abs(den) < small) den = small;
      x[ii] = -sum / den;
      if (std::abs(x[ii]) > 1e150) {
        for (std::size_t j = ii; j <= k; ++j) x[j] *= 1e-150;
      }
    }
    CVector v(n, Complex(0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= k; ++j) v[i] += z(i, j) * x[j];
    }
    const double nv = norm2(v);
    for (auto& e : v) e /= nv;
    vectors.push_back(std::move(v));
  }
  return vectors;
}

}  // namespace

std::vector<std::size_t> eigenvalue_order(const CVector& values, double scale) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return values[a].real() < values[b].real();
  });
  const double tie = 1e-9 * std::max(1.0, scale);
  std::size_t start = 0;
  while (start < idx.size()) {
    std::size_t end = start + 1;
    while (end < idx.size() && values[idx[end]].real() - values[idx[end - 1]].real() <= tie) ++end;
    std::stable_sort(idx.begin() + static_cast<std::ptrdiff_t>(start),
                     idx.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return values[a].imag() < values[b].imag(); });
    start = end;
  }
  return idx;
}

namespace {

double eigen_residual(const Matrix& m, const CVector& values, const std::vector<CVector>& vectors) {
  double worst = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    CVector r = m * std::span<const Complex>(vectors[j]);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= values[j] * vectors[j][i];
    worst = std::max(worst, norm2(r));
  }
  return worst;
}

struct JacobiRotation {
  Complex pp, pq, qp, qq;
};

// Unitary J acting on coordinates (p, q) such that J^H A J has a zero (p, q)
// entry, for the 2x2 Hermitian block [[app, apq], [conj(apq), aqq]].
JacobiRotation jacobi_rotation(double app, double aqq, Complex apq) {
  const double g = std::abs(apq);
  const Complex e = apq / g;
  const double theta = (aqq - app) / (2.0 * g);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  return {c, s, -s * std::conj(e), c * std::conj(e)};
}

void apply_right(Matrix& a, std::size_t p, std::size_t q, const JacobiRotation& j) {
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * j.pp + akq * j.qp;
    a(k, q) = akp * j.pq + akq * j.qq;
  }
}

void apply_left_adjoint(Matrix& a, std::size_t p, std::size_t q, const JacobiRotation& j) {
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(j.pp) * apk + std::conj(j.qp) * aqk;
    a(q, k) = std::conj(j.pq) * apk + std::conj(j.qq) * aqk;
  }
}

template <class T>
Polynomial<T> faddeev_leverrier(const DenseMatrix<T>& a) {
  const std::size_t n = a.rows();
  Polynomial<T> poly;
  poly.coefficients.assign(n + 1, T(0));
  poly.coefficients[n] = T(1);
  DenseMatrix<T> mk(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    mk = a * mk;
    for (std::size_t i = 0; i < n; ++i) mk(i, i) += poly.coefficients[n - k + 1];
    const DenseMatrix<T> amk = a * mk;
    T trace(0);
    for (std::size_t i = 0; i < n; ++i) trace += amk(i, i);
    poly.coefficients[n - k] = -trace / T(static_cast<int>(k));
  }
  return poly;
}

}  // namespace

CVector operator*(const Matrix& a, std::span<const Complex> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::ShapeMismatch, "matrix-vector product");
  CVector y(a.rows(), Complex(0.0));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  }
  return y;
}

Matrix real_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.begin()->size();
  Matrix out(n, m);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != m) throw Error(ErrorCode::ShapeMismatch, "ragged initializer list");
    std::size_t j = 0;
    for (double x : row) out(i, j++) = Complex(x, 0.0);
    ++i;
  }
  return out;
}

Matrix diagonal(std::span<const double> values) {
  Matrix d(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) d(i, i) = values[i];
  return d;
}

Matrix to_complex(const RationalMatrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).convert_to<double>();
  }
  return out;
}

double frobenius_norm(const Matrix& m) {
  double acc = 0.0;
  for (const auto& x : m.entries()) acc += std::norm(x);
  return std::sqrt(acc);
}

double max_abs(const Matrix& m) {
  double acc = 0.0;
  for (const auto& x : m.entries()) acc = std::max(acc, std::abs(x));
  return acc;
}

double norm2(std::span<const Complex> v) {
  double acc = 0.0;
  for (const auto& x : v) acc += std::norm(x);
  return std::sqrt(acc);
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "inner product");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

bool is_hermitian(const Matrix& m, double tol) {
  if (!m.is_square()) return false;
  const double bound = tol * std::max(1.0, max_abs(m));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > bound) return false;
    }
  }
  return true;
}

bool is_real(const Matrix& m) {
  return std::all_of(m.entries().begin(), m.entries().end(),
                     [](const Complex& z) { return z.imag() == 0.0; });
}

EigenDecomposition eig_general(const Matrix& m) {
  require_square(m, "eig_general");
  const std::size_t n = m.rows();
  EigenDecomposition out;
  if (n == 0) return out;

  Matrix t = m;
  Matrix z = Matrix::identity(n);
  reduce_to_hessenberg(t, z);
  hessenberg_qr(t, z);

  CVector values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = t(i, i);
  std::vector<CVector> vectors = schur_eigenvectors(t, z);

  const auto order = eigenvalue_order(values, frobenius_norm(m));
  out.eigenvalues.reserve(n);
  out.right_vectors.reserve(n);
  for (std::size_t k : order) {
    out.eigenvalues.push_back(values[k]);
    out.right_vectors.push_back(std::move(vectors[k]));
  }
  out.residual = eigen_residual(m, out.eigenvalues, out.right_vectors);
  return out;
}

EigenDecomposition eig_symmetric(const Matrix& m) {
  require_square(m, "eig_symmetric");
  if (!is_hermitian(m, 1e-12)) throw Error(ErrorCode::NotHermitian, "eig_symmetric input");
  const std::size_t n = m.rows();
  Matrix a = m;
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = a(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = avg;
      a(j, i) = std::conj(avg);
    }
  }
  Matrix v = Matrix::identity(n);
  const double fro = frobenius_norm(a);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    }
    if (std::sqrt(off) <= 0.5 * kEps * fro || off == 0.0) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double g = std::abs(a(p, q));
        if (g == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        if (std::abs(app) + 100.0 * g == std::abs(app) && std::abs(aqq) + 100.0 * g == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const JacobiRotation j = jacobi_rotation(app, aqq, a(p, q));
        apply_right(a, p, q, j);
        apply_left_adjoint(a, p, q, j);
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        apply_right(v, p, q, j);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  EigenDecomposition out;
  for (std::size_t k : order) {
    out.eigenvalues.emplace_back(a(k, k).real(), 0.0);
    out.right_vectors.push_back(v.column(k));
  }
  out.residual = eigen_residual(m, out.eigenvalues, out.right_vectors);
  return out;
}

std::vector<double> symmetric_eigenvalues(const Matrix& m) {
  const auto eig = eig_symmetric(m);
  std::vector<double> out;
  out.reserve(eig.eigenvalues.size());
  for (const auto& z : eig.eigenvalues) out.push_back(z.real());
  return out;
}

double multiset_distance(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  struct Pair {
    double dist;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) pairs.push_back({std::abs(a[i] - b[j]), i, j});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.dist < y.dist; });
  std::vector<char> used_a(a.size()), used_b(b.size());
  double worst = 0.0;
  for (const Pair& p : pairs) {
    if (used_a[p.i] || used_b[p.j]) continue;
    used_a[p.i] = used_b[p.j] = 1;
    worst = std::max(worst, p.dist);
  }
  return worst;
}

Polynomial<Complex> char_poly(const Matrix& m) {
  require_square(m, "char_poly");
  return faddeev_leverrier(m);
}

Polynomial<Rational> char_poly(const RationalMatrix& m) {
  if (!m.is_square()) throw Error(ErrorCode::NonSquare, "char_poly");
  return faddeev_leverrier(m);
}

CVector solve_linear(const Matrix& a, std::span<const Complex> b) {
  require_square(a, "solve_linear");
  const std::size_t n = a.rows();
  if (b.size() != n) throw Error(ErrorCode::ShapeMismatch, "solve_linear right-hand side");
  Matrix lu = a;
  CVector x(b.begin(), b.end());
  const double pivot_floor = 1e-13 * frobenius_norm(a);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    }
    if (std::abs(lu(piv, k)) <= pivot_floor || lu(piv, k) == Complex(0.0)) {
      throw Error(ErrorCode::Singular, "pivot below threshold at column " + std::to_string(k));
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      std::swap(x[k], x[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = lu(i, k) / lu(k, k);
      if (f == Complex(0.0)) continue;
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
      x[i] -= f * x[k];
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    Complex acc = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= lu(ii, j) * x[j];
    x[ii] = acc / lu(ii, ii);
  }
  return x;
}

Matrix sqrt_psd(const Matrix& m) {
  require_square(m, "sqrt_psd");
  const auto eig = eig_symmetric(m);
  const std::size_t n = m.rows();
  if (n > 0 && eig.eigenvalues.front().real() <= 1e-12) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "minimum eigenvalue " + std::to_string(eig.eigenvalues.front().real()));
  }
  Matrix s(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double root = std::sqrt(eig.eigenvalues[k].real());
    const CVector& v = eig.right_vectors[k];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) s(i, j) += root * v[i] * std::conj(v[j]);
    }
  }
  return s;
}

SingularSystem singular_values(const Matrix& m) {
  const std::size_t n = m.cols();
  Matrix u = m;
  Matrix v = Matrix::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        Complex gamma = 0.0;
        for (std::size_t i = 0; i < u.rows(); ++i) {
          alpha += std::norm(u(i, p));
          beta += std::norm(u(i, q));
          gamma += std::conj(u(i, p)) * u(i, q);
        }
        if (std::abs(gamma) <= kEps * std::sqrt(alpha * beta) || std::abs(gamma) == 0.0) continue;
        rotated = true;
        const JacobiRotation j = jacobi_rotation(alpha, beta, gamma);
        apply_right(u, p, q, j);
        apply_right(v, p, q, j);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t k = 0; k < n; ++k) sigma[k] = norm2(u.column(k));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });
  SingularSystem out;
  out.right_vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values.push_back(sigma[order[k]]);
    for (std::size_t i = 0; i < n; ++i) out.right_vectors(i, k) = v(i, order[k]);
  }
  return out;
}

std::size_t numerical_rank(const Matrix& m, double threshold) {
  const auto sv = singular_values(m);
  return static_cast<std::size_t>(
      std::count_if(sv.values.begin(), sv.values.end(), [&](double s) { return s > threshold; }));
}

}  // namespace ptspectra
