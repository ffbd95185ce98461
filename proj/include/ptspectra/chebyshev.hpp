#pragma once

#include <vector>

#include "ptspectra/linalg.hpp"

namespace ptspectra {

/// Closed-form eigensystem of the M x M tridiagonal Toeplitz block with zero
/// diagonal and -1 off the diagonal.
struct ChebyshevBasis {
  std::vector<double> d;  // d[k] = -2 cos((k+1) pi / (M+1)), ascending
  Matrix u_d;             // unitary, row k is the eigenvector for d[k]; u_d D u_d^H = diag(d)
};

ChebyshevBasis chebyshev_eig(int M);

}  // namespace ptspectra
