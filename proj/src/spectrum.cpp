#include "ptspectra/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace ptspectra {

namespace {

// Energies closer than this to a pole, or to each other, leave the reduced path.
constexpr double kDegeneracyTol = 1e-10;
constexpr int kSamplesPerInterval = 64;

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

double secular_f(const ReducedModel& rm, const std::vector<double>& c, double eps) {
  double r = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) r += c[i] / (eps - rm.d[i]);
  return eps - rm.u - r;
}

double bisect_root(const ReducedModel& rm, const std::vector<double>& c, double lo, double hi,
                   int sign_lo) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = secular_f(rm, c, mid);
    const int sm = sign_of(fm);
    if (sm == 0) return mid;
    if (sm == sign_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CVector apply_adjoint(const Matrix& u, const CVector& phi) {
  CVector psi(u.cols(), Complex(0.0));
  for (std::size_t i = 0; i < u.rows(); ++i) {
    for (std::size_t j = 0; j < u.cols(); ++j) psi[j] += std::conj(u(i, j)) * phi[i];
  }
  return psi;
}

ReducedModel swapped(const ReducedModel& rm) {
  ReducedModel out = rm;
  std::swap(out.alpha, out.beta);
  return out;
}

// Sorted union of both families in the original basis, or nothing when the
// reduced description does not yield 2M+1 simple real energies.
std::optional<SpectrumResult> reduced_eigensystem(const ReducedModel& rm, const Matrix& unitary,
                                                  const SecularRoots& roots) {
  if (!roots.complete || rm.degenerate_d) return std::nullopt;
  SpectrumResult z0;
  SpectrumResult z1;
  try {
    z0 = z0_states(rm);
    z1 = z1_states(rm, roots.roots);
  } catch (const Error&) {
    return std::nullopt;
  }
  CVector energies = z0.energies;
  energies.insert(energies.end(), z1.energies.begin(), z1.energies.end());
  std::vector<Family> family = z0.family;
  family.insert(family.end(), z1.family.begin(), z1.family.end());
  std::vector<CVector> vectors = z0.right_vectors;
  vectors.insert(vectors.end(), z1.right_vectors.begin(), z1.right_vectors.end());

  const auto order = eigenvalue_order(energies, 0.0);
  SpectrumResult out;
  out.reduced_path = true;
  out.reality = Reality::all_real;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t j = order[k];
    if (k > 0 && std::abs(energies[j] - out.energies.back()) <= kDegeneracyTol) return std::nullopt;
    out.energies.push_back(energies[j]);
    out.family.push_back(family[j]);
    out.right_vectors.push_back(apply_adjoint(unitary, vectors[j]));
  }
  return out;
}

std::vector<Family> tag_families(const CVector& energies, const std::vector<double>& d) {
  std::vector<Family> family(energies.size(), Family::z1);
  for (double pole : d) {
    std::size_t best = energies.size();
    double best_dist = 1e-8;
    for (std::size_t i = 0; i < energies.size(); ++i) {
      if (family[i] == Family::z0) continue;
      const double dist = std::abs(energies[i] - pole);
      if (dist <= best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    if (best < energies.size()) family[best] = Family::z0;
  }
  return family;
}

SpectrumResult dense_spectrum(const Matrix& h, const std::vector<double>& d) {
  const auto eig = eig_general(h);
  SpectrumResult out;
  out.energies = eig.eigenvalues;
  out.right_vectors = eig.right_vectors;
  out.family = tag_families(out.energies, d);
  out.reality = classify_spectrum(out.energies, frobenius_norm(h));
  out.reduced_path = false;
  return out;
}

}  // namespace

std::string_view to_string(Family f) { return f == Family::z0 ? "z0" : "z1"; }

std::string_view to_string(Reality r) {
  switch (r) {
    case Reality::all_real: return "all_real";
    case Reality::complex_pairs: return "complex_pairs";
    case Reality::degenerate: return "degenerate";
  }
  return "all_real";
}

ReducedModel reduced_model(const BasisTransform& tb) {
  ReducedModel rm;
  rm.M = static_cast<int>(tb.d.size());
  rm.u = tb.u;
  rm.alpha = tb.alpha;
  rm.beta = tb.beta;
  rm.d = tb.d;
  for (std::size_t k = 1; k < rm.d.size(); ++k) {
    if (!(rm.d[k] > rm.d[k - 1])) rm.degenerate_d = true;
  }
  return rm;
}

ReducedModel reduced_model(const Matrix& h, int M) { return reduced_model(transform_basis(h, M)); }

Matrix reduced_hamiltonian(const ReducedModel& rm) {
  const auto m = static_cast<std::size_t>(rm.M);
  Matrix h(2 * m + 1, 2 * m + 1);
  for (std::size_t k = 0; k < m; ++k) {
    h(k, k) = rm.d[k];
    h(m + 1 + k, m + 1 + k) = rm.d[k];
    h(k, m) = rm.alpha[k];
    h(m, k) = std::conj(rm.beta[k]);
    h(m, m + 1 + k) = std::conj(rm.alpha[k]);
    h(m + 1 + k, m) = rm.beta[k];
  }
  h(m, m) = rm.u;
  return h;
}

std::vector<double> residues(const ReducedModel& rm) {
  std::vector<double> c(rm.d.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = 2.0 * (std::conj(rm.alpha[i]) * rm.beta[i]).real();
  }
  return c;
}

double asymptotic_coefficient(const ReducedModel& rm) {
  double g = 0.0;
  for (double c : residues(rm)) g += c;
  return g;
}

SpectrumResult z0_states(const ReducedModel& rm) {
  if (rm.degenerate_d) throw Error(ErrorCode::DegenerateD, "poles are not simple");
  const auto m = static_cast<std::size_t>(rm.M);
  double scale = 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    scale = std::max({scale, std::abs(rm.alpha[j]), std::abs(rm.beta[j])});
  }
  SpectrumResult out;
  for (std::size_t j = 0; j < m; ++j) {
    // conj(beta_j) x + conj(alpha_j) y = 0  =>  (x, y) ~ (conj(alpha_j), -conj(beta_j))
    const Complex x = std::conj(rm.alpha[j]);
    const Complex y = -std::conj(rm.beta[j]);
    const double nrm = std::hypot(std::abs(x), std::abs(y));
    if (nrm <= 1e-12 * scale) {
      throw Error(ErrorCode::DegenerateD,
                  "alpha_" + std::to_string(j + 1) + " = beta_" + std::to_string(j + 1) +
                      " = 0 leaves the z=0 state at d_" + std::to_string(j + 1) + " ambiguous");
    }
    CVector psi(2 * m + 1, Complex(0.0));
    psi[j] = x / nrm;
    psi[m + 1 + j] = y / nrm;
    out.energies.emplace_back(rm.d[j], 0.0);
    out.family.push_back(Family::z0);
    out.right_vectors.push_back(std::move(psi));
  }
  out.reality = Reality::all_real;
  out.reduced_path = true;
  return out;
}

double secular_R(const ReducedModel& rm, double eps) {
  Complex acc = 0.0;
  double magnitude = 0.0;
  for (std::size_t i = 0; i < rm.d.size(); ++i) {
    if (std::abs(eps - rm.d[i]) <= 1e-13) {
      throw Error(ErrorCode::AtPole, "eps = " + std::to_string(eps) + " is a pole of R");
    }
    const Complex term =
        (std::conj(rm.beta[i]) * rm.alpha[i] + std::conj(rm.alpha[i]) * rm.beta[i]) / (eps - rm.d[i]);
    acc += term;
    magnitude += std::abs(term);
  }
  if (std::abs(acc.imag()) > 1e-12 * std::max(1.0, magnitude)) {
    throw Error(ErrorCode::ResidualCheckFailed, "secular function picked up an imaginary part");
  }
  return acc.real();
}

SecularRoots secular_roots(const ReducedModel& rm) {
  const std::vector<double> c = residues(rm);
  double dmax = 0.0;
  double csum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    dmax = std::max(dmax, std::abs(rm.d[i]));
    csum += std::abs(c[i]);
  }
  // Outside |eps| > bound: |R| <= csum / (|eps| - dmax) < sqrt(csum), so no root.
  const double bound = dmax + std::abs(rm.u) + std::sqrt(csum) + 1.0;

  std::vector<double> edges;
  edges.push_back(-bound);
  edges.insert(edges.end(), rm.d.begin(), rm.d.end());
  edges.push_back(bound);

  SecularRoots out;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double a = edges[k];
    const double b = edges[k + 1];
    if (!(b > a)) continue;
    const bool left_is_pole = k > 0;
    const bool right_is_pole = k + 1 < edges.size() - 1;

    // (point, sign); pole endpoints contribute the sign of the one-sided limit.
    std::vector<std::pair<double, int>> samples;
    if (left_is_pole) {
      const double ci = c[k - 1];
      if (ci != 0.0) samples.emplace_back(a, -sign_of(ci));
    } else {
      samples.emplace_back(a, sign_of(secular_f(rm, c, a)));
    }
    for (int i = 1; i <= kSamplesPerInterval; ++i) {
      const double x = a + (b - a) * static_cast<double>(i) / (kSamplesPerInterval + 1);
      samples.emplace_back(x, sign_of(secular_f(rm, c, x)));
    }
    if (right_is_pole) {
      const double ci = c[k];
      if (ci != 0.0) samples.emplace_back(b, sign_of(ci));
    } else {
      samples.emplace_back(b, sign_of(secular_f(rm, c, b)));
    }

    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
      const auto [x0, s0] = samples[i];
      const auto [x1, s1] = samples[i + 1];
      if (s0 == 0) {
        // exact hit on an interior sample (pole endpoints never carry sign 0)
        out.roots.push_back(x0);
        continue;
      }
      if (s1 != 0 && s1 != s0) out.roots.push_back(bisect_root(rm, c, x0, x1, s0));
    }
    if (!samples.empty() && samples.back().second == 0 && !right_is_pole) {
      out.roots.push_back(samples.back().first);
    }
  }
  std::sort(out.roots.begin(), out.roots.end());
  out.roots.erase(std::unique(out.roots.begin(), out.roots.end()), out.roots.end());
  out.complete = out.roots.size() == static_cast<std::size_t>(rm.M + 1);
  return out;
}

SpectrumResult z1_states(const ReducedModel& rm, const std::vector<double>& roots) {
  const auto m = static_cast<std::size_t>(rm.M);
  const Matrix h = reduced_hamiltonian(rm);
  const double tol = 1e-9 * std::max(1.0, frobenius_norm(h));
  SpectrumResult out;
  for (double eps : roots) {
    for (double pole : rm.d) {
      if (std::abs(eps - pole) <= kDegeneracyTol) {
        throw Error(ErrorCode::RootAtPole, "root " + std::to_string(eps) + " coincides with a pole");
      }
    }
    CVector psi(2 * m + 1, Complex(0.0));
    for (std::size_t i = 0; i < m; ++i) {
      psi[i] = rm.alpha[i] / (eps - rm.d[i]);
      psi[m + 1 + i] = rm.beta[i] / (eps - rm.d[i]);
    }
    psi[m] = 1.0;
    const double nrm = norm2(psi);
    for (auto& x : psi) x /= nrm;

    CVector r = h * std::span<const Complex>(psi);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= eps * psi[i];
    if (norm2(r) > tol) {
      throw Error(ErrorCode::ResidualCheckFailed,
                  "z=1 state at " + std::to_string(eps) + " has residual " + std::to_string(norm2(r)));
    }
    out.energies.emplace_back(eps, 0.0);
    out.family.push_back(Family::z1);
    out.right_vectors.push_back(std::move(psi));
  }
  out.reality = Reality::all_real;
  out.reduced_path = true;
  return out;
}

SpectrumResult full_spectrum(const Matrix& h, int M) {
  const BasisTransform tb = transform_basis(h, M);
  const ReducedModel rm = reduced_model(tb);
  const SecularRoots roots = secular_roots(rm);
  if (auto reduced = reduced_eigensystem(rm, tb.unitary, roots)) return *std::move(reduced);
  return dense_spectrum(h, tb.d);
}

SpectrumResult left_eigensystem(const Matrix& h, int M) {
  const BasisTransform tb = transform_basis(h, M);
  const ReducedModel rm = reduced_model(tb);
  const SecularRoots roots = secular_roots(rm);
  auto right = reduced_eigensystem(rm, tb.unitary, roots);
  if (right) {
    // R is symmetric under alpha <-> beta, so the roots carry over unchanged.
    auto left = reduced_eigensystem(swapped(rm), tb.unitary, roots);
    if (left && left->energies == right->energies) {
      right->left_vectors = std::move(left->right_vectors);
      return *std::move(right);
    }
  }

  SpectrumResult out = dense_spectrum(h, tb.d);
  const auto adj = eig_general(adjoint(h));
  std::vector<bool> used(adj.eigenvalues.size(), false);
  for (const auto& e : out.energies) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < adj.eigenvalues.size(); ++i) {
      if (used[i]) continue;
      const double dist = std::abs(adj.eigenvalues[i] - std::conj(e));
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    used[best] = true;
    out.left_vectors.push_back(adj.right_vectors[best]);
  }
  return out;
}

double imaginary_tolerance(double scale) { return 1e-8 * std::max(1.0, scale); }

Reality classify_spectrum(const CVector& energies, double scale) {
  const double tol_im = imaginary_tolerance(scale);
  const double cluster = 1e-6 * std::max(1.0, scale);
  const double gap_tol = 1e-8 * std::max(1.0, scale);
  const std::size_t n = energies.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(energies[i].imag()) <= tol_im) continue;
    if (std::abs(energies[i].imag()) > cluster) return Reality::complex_pairs;
    Complex sum = energies[i];
    std::size_t members = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && std::abs(energies[j] - energies[i]) <= 2.0 * cluster) {
        sum += energies[j];
        ++members;
      }
    }
    if (members < 2 || std::abs((sum / static_cast<double>(members)).imag()) > tol_im) {
      return Reality::complex_pairs;
    }
  }
  std::vector<double> re;
  re.reserve(n);
  for (const auto& e : energies) re.push_back(e.real());
  std::sort(re.begin(), re.end());
  for (std::size_t i = 1; i < re.size(); ++i) {
    if (re[i] - re[i - 1] <= gap_tol) return Reality::degenerate;
  }
  return Reality::all_real;
}

}  // namespace ptspectra
