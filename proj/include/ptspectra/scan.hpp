#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ptspectra/linalg.hpp"
#include "ptspectra/model.hpp"
#include "ptspectra/spectrum.hpp"

namespace ptspectra {

enum class ScanParam { q, r, s, u };

std::string_view to_string(ScanParam p);
ScanParam parse_scan_param(std::string_view name);

/// Copy of the template with one parameter replaced. q, r and s need a named
/// preset; u is available for every spec.
HamiltonianSpec with_param(const HamiltonianSpec& tmpl, ScanParam param, double value);

/// lo + i (hi - lo) / (n - 1), i = 0..n-1.
std::vector<double> linear_grid(double lo, double hi, int n);

/// Worker count for grid sweeps: hardware concurrency capped by
/// PTSPECTRA_THREADS when set (minimum 1).
unsigned worker_count();

struct SweepResult {
  ScanParam param = ScanParam::s;
  std::vector<double> grid;
  std::vector<CVector> energies;      // eig_general order at each grid point
  std::vector<Reality> reality;       // classify_spectrum at each grid point
  std::vector<bool> all_real;         // reality != complex_pairs

  std::size_t dimension() const { return energies.empty() ? 0 : energies.front().size(); }
};

SweepResult sweep_spectrum(const HamiltonianSpec& tmpl, ScanParam param, double lo, double hi, int n_points);

/// All-real predicate at one parameter value (EP points count as real).
bool is_all_real(const HamiltonianSpec& tmpl, ScanParam param, double value);

/// Bisection on the all-real predicate until |hi - lo| <= 1e-10 (at most 60
/// halvings); returns the midpoint of the final bracket.
double locate_reality_boundary(const HamiltonianSpec& tmpl, ScanParam param, double lo, double hi);

/// Closed-form outer EP of hami5 at r = 1/2, with f = cbrt(5 + sqrt(33)).
double s_ep_closed_form();

struct EPCertificate {
  double param_value = 0.0;
  Complex degenerate_eigenvalue;
  int geometric_multiplicity = 0;
  int jordan_block_size = 0;
  std::vector<std::size_t> ranks;  // rank((h - eps)^k), k = 1, 2, ...
  CVector null_vector;             // unit norm, largest entry real positive
};

/// Rank test for a defective eigenvalue near eps. rank((h - eps I)^k) uses the
/// singular value threshold 1e-8 ||h||_F^k. Throws NotDegenerate unless two
/// eigenvalues of h lie within 1e-6 max(1, ||h||_F) of eps and of each other.
EPCertificate certify_interior_ep(const Matrix& h, Complex eps);

enum class BoundaryType { reality_boundary, interior_crossing };
std::string_view to_string(BoundaryType t);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Boundary {
  double value = 0.0;
  BoundaryType type = BoundaryType::reality_boundary;
};

struct DomainReport {
  ScanParam param = ScanParam::s;
  Interval window;
  int n_points = 0;
  std::vector<Interval> intervals;        // open, ascending, disjoint
  std::vector<Boundary> boundaries;       // ascending
  std::vector<Interval> gaps;             // between non-adjacent intervals
  std::vector<EPCertificate> certificates;  // one per interior crossing
};

/// Physical domains of a one-parameter family inside [lo, hi]. Grid runs of
/// real spectra are bounded by bisected reality boundaries (or the window
/// edge) and split at interior crossings. A crossing is where a z=1 branch
/// passes through a pole d_j, i.e. where the residue c_j changes sign; it is
/// kept only if the two eigenvalues collide within 1e-7 and certify_interior_ep
/// finds a Jordan block.
DomainReport domain_report(const HamiltonianSpec& tmpl, ScanParam param, double lo, double hi, int n_points);

struct PositivityScan {
  Interval interval;          // maximal open interval around the seed with theta > 0
  bool lower_bounded = false;  // false when positivity persists to the window edge
  bool upper_bounded = false;
  std::vector<double> grid;
  std::vector<std::vector<double>> eigencurves;  // ascending metric eigenvalues per grid point
};

/// Recurrent metric with first row base + xi * direction, scanned over xi.
/// Endpoints of the positivity interval around `seed` are bisected to 1e-8.
PositivityScan metric_positivity_interval(const Matrix& h, std::span<const double> base,
                                          std::span<const double> direction, double seed, double lo,
                                          double hi, int n_points);

}  // namespace ptspectra
