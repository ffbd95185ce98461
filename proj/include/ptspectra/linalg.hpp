#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "ptspectra/error.hpp"

namespace ptspectra {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;
using Rational = boost::multiprecision::cpp_rational;

/// Relative residual bound for eigenpairs: ||Hv - lv|| <= kEigTol * max(1, ||H||_F).
inline constexpr double kEigTol = 1e-10;

// Conjugation that is the identity for real scalar types.
inline Complex conj_of(const Complex& z) { return std::conj(z); }
inline double conj_of(double x) { return x; }
inline Rational conj_of(const Rational& x) { return x; }

/// Dense row-major matrix. Used with Complex for numerics and with Rational
/// for the exact paths (characteristic polynomials, recurrent metrics).
template <class T>
class DenseMatrix {
 public:
  using value_type = T;

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

  DenseMatrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) {
        throw Error(ErrorCode::ShapeMismatch, "ragged initializer list");
      }
      entries_.insert(entries_.end(), row.begin(), row.end());
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  std::span<const T> entries() const noexcept { return entries_; }
  std::span<T> entries() noexcept { return entries_; }

  std::vector<T> column(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> entries_;
};

using Matrix = DenseMatrix<Complex>;
using RationalMatrix = DenseMatrix<Rational>;

template <class T>
DenseMatrix<T> operator*(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::ShapeMismatch, "matrix product");
  DenseMatrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T& aik = a(i, k);
      if (aik == T(0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

template <class T>
DenseMatrix<T> operator+(DenseMatrix<T> a, const DenseMatrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "matrix sum");
  }
  for (std::size_t k = 0; k < a.entries().size(); ++k) a.entries()[k] += b.entries()[k];
  return a;
}

template <class T>
DenseMatrix<T> operator-(DenseMatrix<T> a, const DenseMatrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "matrix difference");
  }
  for (std::size_t k = 0; k < a.entries().size(); ++k) a.entries()[k] -= b.entries()[k];
  return a;
}

template <class T>
DenseMatrix<T> operator*(const T& s, DenseMatrix<T> a) {
  for (auto& x : a.entries()) x *= s;
  return a;
}

template <class T>
DenseMatrix<T> adjoint(const DenseMatrix<T>& a) {
  DenseMatrix<T> t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = conj_of(a(i, j));
  }
  return t;
}

CVector operator*(const Matrix& a, std::span<const Complex> x);

/// Builds a complex matrix whose imaginary parts are exactly zero.
Matrix real_matrix(std::initializer_list<std::initializer_list<double>> rows);
Matrix diagonal(std::span<const double> values);
Matrix to_complex(const RationalMatrix& m);

double frobenius_norm(const Matrix& m);
/// Largest entry magnitude.
double max_abs(const Matrix& m);
double norm2(std::span<const Complex> v);
/// <a|b> with the first argument conjugated.
Complex inner(std::span<const Complex> a, std::span<const Complex> b);
bool is_hermitian(const Matrix& m, double tol = 1e-12);
bool is_real(const Matrix& m);

struct EigenDecomposition {
  CVector eigenvalues;                  // ascending by (real, imag)
  std::vector<CVector> right_vectors;   // unit Euclidean norm, aligned with eigenvalues
  double residual = 0.0;                // max_j ||H v_j - l_j v_j||_2
};

/// All eigenpairs of a square complex matrix: Householder reduction to
/// Hessenberg form, shifted QR to complex Schur form, back-substitution for
/// the eigenvectors.
EigenDecomposition eig_general(const Matrix& m);

/// Cyclic Jacobi for Hermitian input; eigenvalues real and ascending,
/// eigenvectors orthonormal.
EigenDecomposition eig_symmetric(const Matrix& m);

/// Permutation ordering values by real part, ties (within 1e-9 * max(1, scale))
/// broken by imaginary part.
std::vector<std::size_t> eigenvalue_order(const CVector& values, double scale);

/// Largest distance in a greedy nearest-neighbour pairing of two equally
/// sized eigenvalue lists; infinity when the sizes differ.
double multiset_distance(const CVector& a, const CVector& b);

/// Real parts of eig_symmetric eigenvalues.
std::vector<double> symmetric_eigenvalues(const Matrix& m);

template <class T>
struct Polynomial {
  std::vector<T> coefficients;  // coefficients[k] multiplies x^k

  std::size_t degree() const { return coefficients.empty() ? 0 : coefficients.size() - 1; }

  T operator()(const T& x) const {
    T acc(0);
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
};

/// det(xI - m) via the Faddeev-LeVerrier recursion. The Rational overload is
/// exact.
Polynomial<Complex> char_poly(const Matrix& m);
Polynomial<Rational> char_poly(const RationalMatrix& m);

/// Gaussian elimination with partial pivoting.
CVector solve_linear(const Matrix& a, std::span<const Complex> b);

/// Principal square root of a Hermitian positive definite matrix.
Matrix sqrt_psd(const Matrix& m);

struct SingularSystem {
  std::vector<double> values;  // descending
  Matrix right_vectors;        // column k pairs with values[k]
};

/// One-sided (Hestenes) Jacobi SVD. Small singular values are resolved to
/// roughly machine precision relative to ||m||, unlike eigenvalues of m^H m.
SingularSystem singular_values(const Matrix& m);

std::size_t numerical_rank(const Matrix& m, double threshold);

}  // namespace ptspectra
