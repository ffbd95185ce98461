#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptspectra/model.hpp"
#include "ptspectra/scan.hpp"

namespace ptspectra::cli {

/// One or more offending fields; run() maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Flag values exactly as given on the command line.
struct RawConfig {
  std::string command;  // e.g. "spectrum", "ep certify", "metric positivity"
  std::optional<std::string> spec_file;
  std::optional<std::string> preset, M, u, w, v, q, r, s;
  std::optional<std::string> param, lo, hi, n;
  std::optional<std::string> first_row, kappa_sq, xi_seed, eps;
  std::optional<std::string> format, out, seed;
  bool vectors = false;
  bool experimental_complex = false;
};

// text is the plain pass/fail table printed by verify.
enum class Format { json, csv, text };

struct RunConfig {
  std::string command;
  std::optional<HamiltonianSpec> model;
  ScanParam param = ScanParam::s;
  double lo = 0.0;
  double hi = 0.0;
  int n_points = 0;
  std::vector<double> first_row;      // recurrent / dyson; base row for positivity
  std::vector<double> xi_direction;   // positivity: first_row(xi) = first_row + xi * xi_direction
  std::vector<double> kappa_sq;
  double xi_seed = 0.0;
  Complex eps;
  Format format = Format::json;
  std::optional<std::string> out;
  std::uint64_t seed = 1;
  bool vectors = false;
  bool experimental_complex = false;
};

/// Scalars: decimal or p/q. Complex: "a", "bi", "a+bi", "a-bi".
double parse_real(const std::string& text);
Complex parse_complex(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
CVector parse_complex_list(const std::string& text);

/// Normalizes and checks every field; collects all problems before throwing.
RunConfig validate_config(const RawConfig& raw);

/// Full command line (without the program name). Exit codes: 0 success,
/// 2 invalid input, 1 numerical failure (error name on `err`).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct VerifyRow {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Reference-value table behind the `verify` command.
std::vector<VerifyRow> verify_suite(std::uint64_t seed);

}  // namespace ptspectra::cli
