#include "ptspectra/chebyshev.hpp"

#include <cmath>
#include <numbers>

namespace ptspectra {

ChebyshevBasis chebyshev_eig(int M) {
  if (M < 1) throw Error(ErrorCode::InvalidArgument, "chebyshev_eig needs M >= 1");
  const auto m = static_cast<std::size_t>(M);
  const double step = std::numbers::pi / static_cast<double>(M + 1);
  const double amp = std::sqrt(2.0 / static_cast<double>(M + 1));
  ChebyshevBasis out;
  out.d.resize(m);
  out.u_d = Matrix(m, m);
  for (std::size_t k = 0; k < m; ++k) {
    out.d[k] = -2.0 * std::cos(static_cast<double>(k + 1) * step);
    for (std::size_t j = 0; j < m; ++j) {
      out.u_d(k, j) = amp * std::sin(static_cast<double>((k + 1) * (j + 1)) * step);
    }
  }
  // Exact reflection symmetry d[k] = -d[M-1-k]; cos leaves ~1e-16 behind.
  for (std::size_t k = 0; k < m / 2; ++k) out.d[m - 1 - k] = -out.d[k];
  if (m % 2 == 1) out.d[m / 2] = 0.0;
  return out;
}

}  // namespace ptspectra
