#include "ptspectra/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "ptspectra/metric.hpp"

namespace ptspectra {

namespace {

constexpr double kBoundaryTol = 1e-10;
constexpr int kMaxBisections = 60;
constexpr double kCollisionTol = 1e-7;
constexpr double kNearTol = 1e-6;
constexpr double kRankTol = 1e-8;
constexpr double kPositivityTol = 1e-8;

// Runs fn(0..n-1) on the worker pool. Results are written by index, so the
// output order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn fn) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double scale_of(const Matrix& h) { return frobenius_norm(h); }

bool real_flag(const Matrix& h) {
  return classify_spectrum(eig_general(h).eigenvalues, scale_of(h)) != Reality::complex_pairs;
}

// sign with zero counted as positive, so an exact zero on a grid point yields
// a single change next to it.
bool nonnegative(double x) { return x >= 0.0; }

int half_size(const HamiltonianSpec& tmpl) { return expand_preset(tmpl).M; }

double residue_at(const HamiltonianSpec& tmpl, ScanParam param, double value, std::size_t j) {
  return residues(reduced_model(build(with_param(tmpl, param, value)), half_size(tmpl)))[j];
}

double bisect_residue(const HamiltonianSpec& tmpl, ScanParam param, std::size_t j, double lo, double hi) {
  const bool lo_sign = nonnegative(residue_at(tmpl, param, lo, j));
  for (int it = 0; it < kMaxBisections && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (nonnegative(residue_at(tmpl, param, mid, j)) == lo_sign) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Smallest distance between two eigenvalues in a small window around target.
double collision_gap(const CVector& energies, double target, double window) {
  std::vector<Complex> near;
  for (const auto& e : energies) {
    if (std::abs(e - target) <= window) near.push_back(e);
  }
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < near.size(); ++a) {
    for (std::size_t b = a + 1; b < near.size(); ++b) gap = std::min(gap, std::abs(near[a] - near[b]));
  }
  return gap;
}

struct Crossing {
  double value;
  EPCertificate certificate;
};

std::vector<Crossing> interior_crossings(const HamiltonianSpec& tmpl, ScanParam param,
                                         const std::vector<double>& grid, std::size_t first,
                                         std::size_t last) {
  const int half = half_size(tmpl);
  const auto m = static_cast<std::size_t>(half);
  std::vector<std::vector<double>> c(last - first + 1);
  for (std::size_t k = first; k <= last; ++k) {
    c[k - first] = residues(reduced_model(build(with_param(tmpl, param, grid[k])), half));
  }
  const std::vector<double> d = chebyshev_eig(half).d;

  std::vector<Crossing> out;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = first; k < last; ++k) {
      if (nonnegative(c[k - first][j]) == nonnegative(c[k + 1 - first][j])) continue;
      const double value = bisect_residue(tmpl, param, j, grid[k], grid[k + 1]);
      const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Crossing& x) {
        return std::abs(x.value - value) <= 1e-8;
      });
      if (duplicate) continue;

      const Matrix h = build(with_param(tmpl, param, value));
      const double window = kNearTol * std::max(1.0, scale_of(h));
      if (collision_gap(eig_general(h).eigenvalues, d[j], window) >= kCollisionTol) continue;
      try {
        EPCertificate cert = certify_interior_ep(h, d[j]);
        if (cert.jordan_block_size < 2) continue;
        cert.param_value = value;
        out.push_back({value, std::move(cert)});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotDegenerate) throw;
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) { return a.value < b.value; });
  return out;
}

bool positive_at(const Matrix& h, std::span<const double> base, std::span<const double> direction, double xi,
                 std::vector<double>* eigenvalues = nullptr) {
  std::vector<double> row(base.size());
  for (std::size_t k = 0; k < row.size(); ++k) row[k] = base[k] + xi * direction[k];
  const MetricCandidate m = metric_recurrent(h, row);
  if (eigenvalues != nullptr) *eigenvalues = m.eigenvalues;
  return m.positive_definite;
}

double bisect_positivity(const Matrix& h, std::span<const double> base, std::span<const double> direction,
                         double inside, double outside) {
  for (int it = 0; it < 200 && std::abs(outside - inside) > kPositivityTol; ++it) {
    const double mid = 0.5 * (inside + outside);
    if (positive_at(h, base, direction, mid)) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return 0.5 * (inside + outside);
}

}  // namespace

std::string_view to_string(ScanParam p) {
  switch (p) {
    case ScanParam::q: return "q";
    case ScanParam::r: return "r";
    case ScanParam::s: return "s";
    case ScanParam::u: return "u";
  }
  return "?";
}

ScanParam parse_scan_param(std::string_view name) {
  for (ScanParam p : {ScanParam::q, ScanParam::r, ScanParam::s, ScanParam::u}) {
    if (name == to_string(p)) return p;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scan parameter '" + std::string(name) + "' (q, r, s or u)");
}

std::string_view to_string(BoundaryType t) {
  return t == BoundaryType::reality_boundary ? "reality_boundary" : "interior_crossing";
}

HamiltonianSpec with_param(const HamiltonianSpec& tmpl, ScanParam param, double value) {
  HamiltonianSpec out = tmpl;
  if (param == ScanParam::u) {
    if (is_named_preset(tmpl.preset)) {
      throw Error(ErrorCode::InvalidArgument, "named presets fix u = 0");
    }
    out.u = value;
    return out;
  }
  if (!is_named_preset(tmpl.preset)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("parameter ") + std::string(to_string(param)) + " needs a named preset");
  }
  switch (param) {
    case ScanParam::q: out.q = value; break;
    case ScanParam::r: out.r = value; break;
    case ScanParam::s: out.s = value; break;
    case ScanParam::u: break;
  }
  return out;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points");
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "grid needs lo < hi");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + i * (hi - lo) / (n - 1);
  g.back() = hi;
  return g;
}

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PTSPECTRA_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

SweepResult sweep_spectrum(const HamiltonianSpec& tmpl, ScanParam param, double lo, double hi, int n_points) {
  SweepResult out;
  out.param = param;
  out.grid = linear_grid(lo, hi, n_points);
  const std::size_t n = out.grid.size();
  out.energies.resize(n);
  out.reality.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const Matrix h = build(with_param(tmpl, param, out.grid[i]));
    out.energies[i] = eig_general(h).eigenvalues;
    out.reality[i] = classify_spectrum(out.energies[i], scale_of(h));
  });
  out.all_real.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.all_real[i] = out.reality[i] != Reality::complex_pairs;
  return out;
}

bool is_all_real(const HamiltonianSpec& tmpl, ScanParam param, double value) {
  return real_flag(build(with_param(tmpl, param, value)));
}

double locate_reality_boundary(const HamiltonianSpec& tmpl, ScanParam param, double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  const bool lo_real = is_all_real(tmpl, param, lo);
  if (lo_real == is_all_real(tmpl, param, hi)) {
    throw Error(ErrorCode::NoSignChange, "reality flag agrees at both ends of the bracket");
  }
  for (int it = 0; it < kMaxBisections && hi - lo > kBoundaryTol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (is_all_real(tmpl, param, mid) == lo_real) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double s_ep_closed_form() {
  const double r33 = std::sqrt(33.0);
  const double f = std::cbrt(5.0 + r33);
  const double num = 2.0 * std::sqrt(6.0 * f * f - 15.0 * f - f * r33 + 21.0 + 5.0 * r33) - 2.0 * std::sqrt(2.0) * f;
  const double den = 4.0 * std::sqrt(f * (f * f - 2.0));
  return num / den;
}

EPCertificate certify_interior_ep(const Matrix& h, Complex eps) {
  if (!h.is_square()) throw Error(ErrorCode::NonSquare, "h must be square");
  const std::size_t n = h.rows();
  const double norm = frobenius_norm(h);
  const double window = kNearTol * std::max(1.0, norm);

  CVector values = eig_general(h).eigenvalues;
  std::sort(values.begin(), values.end(),
            [&](const Complex& a, const Complex& b) { return std::abs(a - eps) < std::abs(b - eps); });
  if (n < 2 || std::abs(values[1] - eps) > window || std::abs(values[0] - values[1]) > window) {
    throw Error(ErrorCode::NotDegenerate, "no eigenvalue pair within tolerance of the requested energy");
  }

  EPCertificate out;
  out.degenerate_eigenvalue = 0.5 * (values[0] + values[1]);
  const Matrix shifted = h - eps * Matrix::identity(n);
  Matrix power = shifted;
  double threshold = kRankTol * norm;
  std::size_t previous = n;
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t rank = numerical_rank(power, threshold);
    out.ranks.push_back(rank);
    if (rank == previous) break;
    previous = rank;
    power = power * shifted;
    threshold *= norm;
  }
  out.geometric_multiplicity = static_cast<int>(n - out.ranks.front());
  // Largest Jordan block = number of powers at which the rank still drops.
  out.jordan_block_size = 0;
  std::size_t before = n;
  for (std::size_t r : out.ranks) {
    if (r < before) ++out.jordan_block_size;
    before = r;
  }

  const SingularSystem svd = singular_values(shifted);
  CVector v = svd.right_vectors.column(n - 1);
  std::size_t big = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (std::abs(v[k]) > std::abs(v[big])) big = k;
  }
  const Complex phase = std::abs(v[big]) > 0.0 ? std::conj(v[big]) / std::abs(v[big]) : Complex(1.0);
  const double len = norm2(v);
  for (auto& x : v) x *= phase / len;
  out.null_vector = std::move(v);
  return out;
}

DomainReport domain_report(const HamiltonianSpec& tmpl, ScanParam param, double lo, double hi, int n_points) {
  const SweepResult sweep = sweep_spectrum(tmpl, param, lo, hi, n_points);
  DomainReport report;
  report.param = param;
  report.window = {lo, hi};
  report.n_points = n_points;

  const std::vector<double>& g = sweep.grid;
  const std::size_t n = g.size();
  std::size_t i = 0;
  while (i < n) {
    if (!sweep.all_real[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && sweep.all_real[j + 1]) ++j;

    Interval run{g[i], g[j]};
    if (i > 0) {
      run.lo = locate_reality_boundary(tmpl, param, g[i - 1], g[i]);
      report.boundaries.push_back({run.lo, BoundaryType::reality_boundary});
    }
    const bool closed_right = j + 1 < n;
    if (closed_right) run.hi = locate_reality_boundary(tmpl, param, g[j], g[j + 1]);

    double start = run.lo;
    for (Crossing& x : interior_crossings(tmpl, param, g, i, j)) {
      if (x.value <= start || x.value >= run.hi) continue;
      report.intervals.push_back({start, x.value});
      report.boundaries.push_back({x.value, BoundaryType::interior_crossing});
      report.certificates.push_back(std::move(x.certificate));
      start = x.value;
    }
    report.intervals.push_back({start, run.hi});
    if (closed_right) report.boundaries.push_back({run.hi, BoundaryType::reality_boundary});
    i = j + 1;
  }

  for (std::size_t k = 1; k < report.intervals.size(); ++k) {
    if (report.intervals[k - 1].hi < report.intervals[k].lo) {
      report.gaps.push_back({report.intervals[k - 1].hi, report.intervals[k].lo});
    }
  }
  return report;
}

PositivityScan metric_positivity_interval(const Matrix& h, std::span<const double> base,
                                          std::span<const double> direction, double seed, double lo,
                                          double hi, int n_points) {
  if (base.size() != direction.size()) {
    throw Error(ErrorCode::DimensionMismatch, "base and direction rows differ in length");
  }
  if (seed < lo || seed > hi) throw Error(ErrorCode::InvalidArgument, "seed outside the scan window");
  if (!positive_at(h, base, direction, seed)) {
    throw Error(ErrorCode::SeedNotPositive, "metric is not positive definite at the seed");
  }

  PositivityScan out;
  out.grid = linear_grid(lo, hi, n_points);
  const std::size_t n = out.grid.size();
  out.eigencurves.resize(n);
  std::vector<char> positive(n);
  parallel_for(n, [&](std::size_t k) {
    positive[k] = positive_at(h, base, direction, out.grid[k], &out.eigencurves[k]) ? 1 : 0;
  });

  // Walk outwards from the seed to the first non-positive grid point.
  const auto above = static_cast<std::size_t>(std::upper_bound(out.grid.begin(), out.grid.end(), seed) - out.grid.begin());
  out.interval = {lo, hi};
  double inside = seed;
  for (std::size_t k = above; k-- > 0;) {
    if (!positive[k]) {
      out.interval.lo = bisect_positivity(h, base, direction, inside, out.grid[k]);
      out.lower_bounded = true;
      break;
    }
    inside = out.grid[k];
  }
  inside = seed;
  for (std::size_t k = above; k < n; ++k) {
    if (!positive[k]) {
      out.interval.hi = bisect_positivity(h, base, direction, inside, out.grid[k]);
      out.upper_bounded = true;
      break;
    }
    inside = out.grid[k];
  }
  return out;
}

}  // namespace ptspectra
