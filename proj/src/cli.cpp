#include "ptspectra/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "ptspectra/metric.hpp"
#include "ptspectra/serialize.hpp"
#include "ptspectra/spectrum.hpp"

namespace ptspectra::cli {

namespace {

const std::vector<std::string> kCommands = {
    "build",         "spectrum",         "sweep",           "domains",          "ep locate",
    "ep closed-form", "ep certify",      "metric recurrent", "metric spectral", "metric positivity",
    "metric dyson",  "verify"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(text);
  while (std::getline(in, cell, sep)) out.push_back(trim(cell));
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double parse_decimal(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) {
    throw std::invalid_argument("'" + std::string(s) + "' is not a number");
  }
  return x;
}

int parse_int(const std::string& text) {
  int x = 0;
  const std::string s = trim(text);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("'" + text + "' is not an integer");
  }
  return x;
}

// Entry of a first-row template: c, xi, -xi or c*xi.
std::pair<double, double> parse_affine(const std::string& text) {
  const std::string s = trim(text);
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "xi") == 0) {
    std::string coef = trim(s.substr(0, s.size() - 2));
    if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
    if (coef.empty() || coef == "+") return {0.0, 1.0};
    if (coef == "-") return {0.0, -1.0};
    return {0.0, parse_real(coef)};
  }
  return {parse_real(s), 0.0};
}

bool verify_failed(const std::string& text, Format format) {
  switch (format) {
    case Format::json: {
      const Json rows = Json::parse(text);
      return std::any_of(rows.begin(), rows.end(), [](const Json& r) { return !r["pass"].get<bool>(); });
    }
    case Format::csv:
      return text.find("\nfalse,") != std::string::npos;
    case Format::text:
      break;
  }
  return text.find("FAIL") != std::string::npos;
}

bool is_model_free(const std::string& command) { return command == "ep closed-form" || command == "verify"; }

std::string what_of(const std::exception& e) { return e.what(); }

HamiltonianSpec validate_model(const RawConfig& raw, std::vector<std::string>& problems) {
  const bool any_flag = raw.preset || raw.M || raw.u || raw.w || raw.v || raw.q || raw.r || raw.s;
  HamiltonianSpec spec;
  auto real_field = [&](const std::optional<std::string>& text, const char* name, double& target) {
    if (!text) return;
    try {
      target = parse_real(*text);
    } catch (const std::exception& e) {
      problems.push_back(std::string(name) + ": " + what_of(e));
    }
  };

  if (raw.spec_file) {
    if (any_flag) problems.emplace_back("--spec: cannot be combined with --preset/--M/--u/--w/--v/--q/--r/--s");
    std::ifstream in(*raw.spec_file);
    if (!in) {
      problems.push_back("--spec: cannot read '" + *raw.spec_file + "'");
      return spec;
    }
    try {
      spec = spec_from_json(Json::parse(in));
    } catch (const std::exception& e) {
      problems.push_back("--spec: " + what_of(e));
      return spec;
    }
  } else {
    if (!raw.preset && !raw.M && !raw.w && !raw.v) {
      problems.emplace_back(
          "model: give --preset <hami5|hami7|hami27|dim5|ma|general> or an explicit --M with --w and --v "
          "(or --spec <file>)");
      return spec;
    }
    if (raw.preset) {
      try {
        spec.preset = parse_preset(trim(*raw.preset));
      } catch (const Error&) {
        problems.push_back("--preset: unknown '" + *raw.preset + "' (general, ma, hami5, hami7, hami27, dim5)");
        return spec;
      }
    } else {
      spec.preset = Preset::general;
    }
    if (is_named_preset(spec.preset)) {
      for (const auto& [flag, given] : {std::pair{"--M", raw.M.has_value()}, std::pair{"--u", raw.u.has_value()},
                                        std::pair{"--w", raw.w.has_value()}, std::pair{"--v", raw.v.has_value()}}) {
        if (given) problems.push_back(std::string(flag) + ": not used by preset " + std::string(to_string(spec.preset)));
      }
      if (raw.q && (spec.preset == Preset::hami5 || spec.preset == Preset::dim5)) {
        problems.push_back("--q: not used by preset " + std::string(to_string(spec.preset)));
      }
      real_field(raw.q, "--q", spec.q);
      real_field(raw.r, "--r", spec.r);
      real_field(raw.s, "--s", spec.s);
    } else {
      for (const auto& [flag, given] : {std::pair{"--q", raw.q.has_value()}, std::pair{"--r", raw.r.has_value()},
                                        std::pair{"--s", raw.s.has_value()}}) {
        if (given) problems.push_back(std::string(flag) + ": only used by named presets");
      }
      if (!raw.M) {
        problems.emplace_back("--M: required for explicit models");
      } else {
        try {
          spec.M = parse_int(*raw.M);
          if (spec.M < 1) problems.emplace_back("--M: must be >= 1");
        } catch (const std::exception& e) {
          problems.push_back("--M: " + what_of(e));
        }
      }
      real_field(raw.u, "--u", spec.u);
      if (!raw.w) problems.emplace_back("--w: required for explicit models");
      if (!raw.v && spec.preset == Preset::general) problems.emplace_back("--v: required for the general model");
      try {
        if (raw.w) spec.w = parse_complex_list(*raw.w);
      } catch (const std::exception& e) {
        problems.push_back("--w: " + what_of(e));
      }
      try {
        if (raw.v) spec.v = parse_complex_list(*raw.v);
      } catch (const std::exception& e) {
        problems.push_back("--v: " + what_of(e));
      }
    }
  }
  if (!problems.empty()) return spec;

  if (!is_named_preset(spec.preset)) {
    const auto m = static_cast<std::size_t>(std::max(spec.M, 0));
    if (spec.M < 1) problems.emplace_back("M: must be >= 1");
    if (spec.w.size() != m) problems.push_back(fmt::format("w: has {} entries, M = {}", spec.w.size(), spec.M));
    const bool v_optional = spec.preset == Preset::ma && spec.v.empty();
    if (!v_optional && spec.v.size() != m) {
      problems.push_back(fmt::format("v: has {} entries, M = {}", spec.v.size(), spec.M));
    }
  }
  if (!problems.empty()) return spec;
  try {
    (void)build(spec);
  } catch (const Error& e) {
    problems.push_back(std::string("model: ") + e.what());
  }
  return spec;
}

Format default_format(const std::string& command) { return command == "sweep" ? Format::csv : Format::json; }

void write_output(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (!cfg.out) {
    out << text;
    return;
  }
  std::ofstream file(*cfg.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write '" + *cfg.out + "'");
  file << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

RationalMatrix reference_ssp(const Rational& xi) {
  const Rational h(1, 2);
  const Rational q(1, 4);
  const Rational one(1);
  const Rational zero(0);
  return RationalMatrix{{one, zero, xi, zero, zero},
                        {zero, one + xi, -h, xi, -h * xi},
                        {xi, -h, one + xi, -h - h * xi, q + xi},
                        {zero, xi, -h - h * xi, Rational(5, 4) + xi, -one - h * xi},
                        {zero, -h * xi, q + xi, -one - h * xi, Rational(5, 4) + q * xi}};
}

HamiltonianSpec preset_spec(Preset p, double q, double r, double s) {
  HamiltonianSpec spec;
  spec.preset = p;
  spec.q = q;
  spec.r = r;
  spec.s = s;
  return spec;
}

std::string run_command(const RunConfig& cfg) {
  const std::string& c = cfg.command;
  const bool csv = cfg.format == Format::csv;

  if (c == "build") {
    const Matrix h = build(*cfg.model);
    if (csv) return matrix_to_csv(h);
    Json j;
    j["spec"] = spec_to_json(expand_preset(*cfg.model));
    j["dimension"] = h.rows();
    j["pt_symmetric"] = check_pt_symmetry(h);
    j["matrix"] = matrix_to_json(h);
    return dump(j);
  }
  if (c == "spectrum") {
    const HamiltonianSpec full = expand_preset(*cfg.model);
    const Matrix h = build(full);
    const SpectrumResult r = cfg.vectors ? left_eigensystem(h, full.M) : full_spectrum(h, full.M);
    return csv ? spectrum_to_csv(r) : dump(spectrum_to_json(r, cfg.vectors));
  }
  if (c == "sweep") {
    const SweepResult s = sweep_spectrum(*cfg.model, cfg.param, cfg.lo, cfg.hi, cfg.n_points);
    return csv ? sweep_to_csv(s) : dump(sweep_to_json(s));
  }
  if (c == "domains") {
    Json j = domain_report_to_json(domain_report(*cfg.model, cfg.param, cfg.lo, cfg.hi, cfg.n_points));
    j["spec"] = spec_to_json(*cfg.model);
    return dump(j);
  }
  if (c == "ep locate") {
    Json j;
    j["param"] = std::string(to_string(cfg.param));
    j["bracket"] = Json::array({cfg.lo, cfg.hi});
    j["boundary"] = locate_reality_boundary(*cfg.model, cfg.param, cfg.lo, cfg.hi);
    return dump(j);
  }
  if (c == "ep closed-form") {
    Json j;
    j["s_ep"] = s_ep_closed_form();
    return dump(j);
  }
  if (c == "ep certify") {
    EPCertificate cert = certify_interior_ep(build(*cfg.model), cfg.eps);
    // Named presets are scanned in s, the families in u.
    cert.param_value = is_named_preset(cfg.model->preset) ? cfg.model->s : cfg.model->u;
    return dump(certificate_to_json(cert));
  }
  if (c == "verify") {
    const std::vector<VerifyRow> rows = verify_suite(cfg.seed);
    if (cfg.format == Format::json) {
      Json j = Json::array();
      for (const auto& r : rows) j.push_back(Json{{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
      return dump(j);
    }
    std::string text;
    if (cfg.format == Format::csv) {
      const auto quoted = [](std::string f) {
        for (std::size_t at = f.find('"'); at != std::string::npos; at = f.find('"', at + 2)) f.insert(at, 1, '"');
        return "\"" + f + "\"";
      };
      text = "pass,name,detail\n";
      for (const auto& r : rows) text += fmt::format("{},{},{}\n", r.pass, quoted(r.name), quoted(r.detail));
      return text;
    }
    for (const auto& r : rows) text += fmt::format("{:<4}  {:<44}  {}\n", r.pass ? "PASS" : "FAIL", r.name, r.detail);
    return text;
  }
  const HamiltonianSpec full = expand_preset(*cfg.model);
  const Matrix h = build(full);
  if (c == "metric recurrent") {
    RecurrentOptions options;
    options.experimental_complex = cfg.experimental_complex;
    return dump(metric_to_json(metric_recurrent(h, cfg.first_row, options)));
  }
  if (c == "metric spectral") return dump(metric_to_json(metric_spectral(h, full.M, cfg.kappa_sq)));
  if (c == "metric positivity") {
    const PositivityScan p =
        metric_positivity_interval(h, cfg.first_row, cfg.xi_direction, cfg.xi_seed, cfg.lo, cfg.hi, cfg.n_points);
    return csv ? positivity_to_csv(p) : dump(positivity_to_json(p));
  }
  if (c == "metric dyson") {
    MetricCandidate m;
    if (!cfg.first_row.empty()) {
      RecurrentOptions options;
      options.experimental_complex = cfg.experimental_complex;
      m = metric_recurrent(h, cfg.first_row, options);
    } else {
      m = metric_spectral(h, full.M, cfg.kappa_sq);
    }
    const DysonMap d = dyson_map(m.theta);
    const Matrix image = d.hermitian_image(h);
    Json j;
    j["metric"] = metric_to_json(m);
    j["omega"] = matrix_to_json(d.omega);
    j["hermitian_image"] = matrix_to_json(image);
    j["hermiticity_deviation"] = max_abs(image - adjoint(image));
    j["eigenvalues_h"] = vector_to_json(eig_general(h).eigenvalues);
    j["eigenvalues_image"] = vector_to_json(eig_general(image).eigenvalues);
    return dump(j);
  }
  throw Error(ErrorCode::InvalidArgument, "unhandled command " + c);
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::runtime_error(problems.empty() ? "invalid configuration" : problems.front()),
      problems_(std::move(problems)) {}

double parse_real(const std::string& text) {
  const std::string s = trim(text);
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_decimal(s);
  const double num = parse_decimal(trim(s.substr(0, slash)));
  const double den = parse_decimal(trim(s.substr(slash + 1)));
  if (den == 0.0) throw std::invalid_argument("'" + s + "' divides by zero");
  return num / den;
}

Complex parse_complex(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty value");
  if (s.back() != 'i') return {parse_real(s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not a leading sign or an exponent sign.
  std::size_t split_at = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split_at = k;
      break;
    }
  }
  auto imag_part = [](const std::string& t) {
    const std::string u = trim(t);
    if (u.empty() || u == "+") return 1.0;
    if (u == "-") return -1.0;
    return parse_real(u);
  };
  if (split_at == std::string::npos) return {0.0, imag_part(body)};
  return {parse_real(body.substr(0, split_at)), imag_part(body.substr(split_at))};
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& cell : split(text, ',')) out.push_back(parse_real(cell));
  return out;
}

CVector parse_complex_list(const std::string& text) {
  CVector out;
  for (const auto& cell : split(text, ',')) out.push_back(parse_complex(cell));
  return out;
}

RunConfig validate_config(const RawConfig& raw) {
  std::vector<std::string> problems;
  RunConfig cfg;
  cfg.command = raw.command;
  cfg.vectors = raw.vectors;
  cfg.experimental_complex = raw.experimental_complex;
  if (std::find(kCommands.begin(), kCommands.end(), raw.command) == kCommands.end()) {
    throw ValidationError({"command: unknown '" + raw.command + "'"});
  }
  const std::string& c = raw.command;

  std::size_t dimension = 0;
  if (!is_model_free(c)) {
    cfg.model = validate_model(raw, problems);
    if (problems.empty()) dimension = static_cast<std::size_t>(expand_preset(*cfg.model).dimension());
  }

  auto real_or = [&](const std::optional<std::string>& text, const char* name, double fallback, bool required) {
    if (!text) {
      if (required) problems.push_back(std::string(name) + ": required by '" + c + "'");
      return fallback;
    }
    try {
      return parse_real(*text);
    } catch (const std::exception& e) {
      problems.push_back(std::string(name) + ": " + what_of(e));
      return fallback;
    }
  };

  const bool scanning = c == "sweep" || c == "domains" || c == "ep locate";
  if (scanning) {
    try {
      cfg.param = parse_scan_param(trim(raw.param.value_or("s")));
      if (cfg.model && problems.empty()) (void)with_param(*cfg.model, cfg.param, 0.0);
    } catch (const Error& e) {
      problems.push_back(std::string("--param: ") + e.what());
    }
  }
  const bool ranged = scanning || c == "metric positivity";
  if (ranged) {
    const bool bracket = c == "ep locate";
    const double lo0 = c == "metric positivity" ? -1.0 : -1.2;
    const double hi0 = c == "metric positivity" ? 2.0 : 1.2;
    cfg.lo = real_or(raw.lo, "--lo", lo0, bracket);
    cfg.hi = real_or(raw.hi, "--hi", hi0, bracket);
    if (!bracket && !(cfg.lo < cfg.hi)) problems.emplace_back("--lo/--hi: need lo < hi");
    if (bracket && cfg.lo == cfg.hi) problems.emplace_back("--lo/--hi: bracket has zero width");
    if (!bracket) {
      cfg.n_points = c == "metric positivity" ? 301 : 481;
      if (raw.n) {
        try {
          cfg.n_points = parse_int(*raw.n);
          if (cfg.n_points < 2) problems.emplace_back("--n: need at least 2 grid points");
        } catch (const std::exception& e) {
          problems.push_back("--n: " + what_of(e));
        }
      }
    }
  }

  if (c == "metric recurrent" || c == "metric dyson" || c == "metric positivity") {
    if (raw.first_row) {
      try {
        for (const auto& cell : split(*raw.first_row, ',')) {
          const auto [a, b] = c == "metric positivity" ? parse_affine(cell) : std::pair{parse_real(cell), 0.0};
          cfg.first_row.push_back(a);
          cfg.xi_direction.push_back(b);
        }
        if (dimension != 0 && cfg.first_row.size() != dimension) {
          problems.push_back(fmt::format("--first-row: has {} entries, expected {}", cfg.first_row.size(), dimension));
        }
      } catch (const std::exception& e) {
        problems.push_back("--first-row: " + what_of(e));
      }
    } else if (c != "metric dyson") {
      problems.push_back("--first-row: required by '" + c + "'");
    }
    if (c != "metric positivity") cfg.xi_direction.clear();
  }
  if (c == "metric positivity") {
    cfg.xi_seed = real_or(raw.xi_seed, "--xi-seed", 0.0, false);
    if (cfg.xi_seed < cfg.lo || cfg.xi_seed > cfg.hi) problems.emplace_back("--xi-seed: outside [--lo, --hi]");
  }
  if (c == "metric spectral" || c == "metric dyson") {
    if (raw.kappa_sq) {
      try {
        cfg.kappa_sq = parse_real_list(*raw.kappa_sq);
        if (dimension != 0 && cfg.kappa_sq.size() != dimension) {
          problems.push_back(fmt::format("--kappa-sq: has {} entries, expected {}", cfg.kappa_sq.size(), dimension));
        }
        if (std::any_of(cfg.kappa_sq.begin(), cfg.kappa_sq.end(), [](double k) { return !(k > 0.0); })) {
          problems.emplace_back("--kappa-sq: entries must be positive");
        }
      } catch (const std::exception& e) {
        problems.push_back("--kappa-sq: " + what_of(e));
      }
    } else {
      cfg.kappa_sq.assign(dimension, 1.0);
    }
  }
  if (c == "ep certify") {
    if (!raw.eps) {
      problems.emplace_back("--eps: required by 'ep certify'");
    } else {
      try {
        cfg.eps = parse_complex(*raw.eps);
      } catch (const std::exception& e) {
        problems.push_back("--eps: " + what_of(e));
      }
    }
  }

  cfg.format = default_format(c);
  if (raw.format) {
    const std::string f = trim(*raw.format);
    if (f == "json") {
      cfg.format = Format::json;
    } else if (f == "csv") {
      cfg.format = Format::csv;
    } else {
      problems.push_back("--format: expected json or csv, got '" + f + "'");
    }
  } else if (c == "verify") {
    cfg.format = Format::text;
  }
  cfg.out = raw.out;
  if (raw.seed) {
    try {
      const std::string s = trim(*raw.seed);
      std::uint64_t seed = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument("'" + s + "' is not a non-negative integer");
      }
      cfg.seed = seed;
    } catch (const std::exception& e) {
      problems.push_back("--seed: " + what_of(e));
    }
  }

  if (!problems.empty()) throw ValidationError(std::move(problems));
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"PT-symmetric lattice Hamiltonians: spectra, metrics and exceptional points", "ptspectra"};
  app.require_subcommand(1);
  RawConfig raw;

  auto opt = [](CLI::App* sub, const std::string& name, std::optional<std::string>& target, const std::string& help) {
    sub->add_option_function<std::string>(name, [&target](const std::string& v) { target = v; }, help);
  };
  auto model_opts = [&](CLI::App* sub) {
    opt(sub, "--spec", raw.spec_file, "model spec JSON file");
    opt(sub, "--preset", raw.preset, "general, ma, hami5, hami7, hami27 or dim5");
    opt(sub, "--M", raw.M, "half-dimension (N = 2M+1)");
    opt(sub, "--u", raw.u, "central diagonal element");
    opt(sub, "--w", raw.w, "upper couplings w_1..w_M, comma separated (a, a+bi, p/q)");
    opt(sub, "--v", raw.v, "lower couplings v_1..v_M");
    opt(sub, "--q", raw.q, "preset parameter q");
    opt(sub, "--r", raw.r, "preset parameter r");
    opt(sub, "--s", raw.s, "preset parameter s");
  };
  auto output_opts = [&](CLI::App* sub) {
    opt(sub, "--format", raw.format, "json or csv");
    opt(sub, "--out", raw.out, "write to this file instead of stdout");
  };
  auto range_opts = [&](CLI::App* sub) {
    opt(sub, "--lo", raw.lo, "range start");
    opt(sub, "--hi", raw.hi, "range end");
    opt(sub, "--n", raw.n, "grid points");
  };

  std::vector<std::pair<CLI::App*, std::string>> leaves;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, const std::string& tag) {
    CLI::App* sub = parent->add_subcommand(name, help);
    leaves.emplace_back(sub, tag);
    return sub;
  };

  CLI::App* s_build = leaf(&app, "build", "print the Hamiltonian matrix", "build");
  model_opts(s_build);
  output_opts(s_build);

  CLI::App* s_spec = leaf(&app, "spectrum", "energies, families and reality class", "spectrum");
  model_opts(s_spec);
  output_opts(s_spec);
  s_spec->add_flag("--vectors", raw.vectors, "include right and left eigenvectors");

  for (const auto& [name, help] : {std::pair{"sweep", "eigenvalues along a parameter grid"},
                                   std::pair{"domains", "physical domains, EP boundaries and gaps"}}) {
    CLI::App* sub = leaf(&app, name, help, name);
    model_opts(sub);
    output_opts(sub);
    range_opts(sub);
    opt(sub, "--param", raw.param, "q, r, s or u");
  }

  CLI::App* s_ep = app.add_subcommand("ep", "exceptional points");
  s_ep->require_subcommand(1);
  CLI::App* s_locate = leaf(s_ep, "locate", "bisect a reality boundary inside [--lo, --hi]", "ep locate");
  model_opts(s_locate);
  output_opts(s_locate);
  opt(s_locate, "--lo", raw.lo, "bracket start");
  opt(s_locate, "--hi", raw.hi, "bracket end");
  opt(s_locate, "--param", raw.param, "q, r, s or u");
  CLI::App* s_closed = leaf(s_ep, "closed-form", "outer EP of hami5 at r = 1/2", "ep closed-form");
  output_opts(s_closed);
  CLI::App* s_cert = leaf(s_ep, "certify", "Jordan-block certificate at energy --eps", "ep certify");
  model_opts(s_cert);
  output_opts(s_cert);
  opt(s_cert, "--eps", raw.eps, "degenerate energy (a or a+bi)");

  CLI::App* s_metric = app.add_subcommand("metric", "Hermitizing metrics");
  s_metric->require_subcommand(1);
  CLI::App* s_rec = leaf(s_metric, "recurrent", "metric from a free first row", "metric recurrent");
  CLI::App* s_spc = leaf(s_metric, "spectral", "metric from left eigenvectors", "metric spectral");
  CLI::App* s_pos = leaf(s_metric, "positivity", "positivity interval in xi", "metric positivity");
  CLI::App* s_dys = leaf(s_metric, "dyson", "Dyson map and Hermitian image", "metric dyson");
  for (CLI::App* sub : {s_rec, s_spc, s_pos, s_dys}) {
    model_opts(sub);
    output_opts(sub);
  }
  for (CLI::App* sub : {s_rec, s_dys}) {
    opt(sub, "--first-row", raw.first_row, "first metric row, comma separated");
    sub->add_flag("--experimental-complex", raw.experimental_complex, "allow complex h in the recurrence");
  }
  opt(s_pos, "--first-row", raw.first_row, "first-row template in xi, e.g. 1,0,xi,0,0");
  opt(s_pos, "--xi-seed", raw.xi_seed, "xi inside the interval (default 0)");
  range_opts(s_pos);
  for (CLI::App* sub : {s_spc, s_dys}) opt(sub, "--kappa-sq", raw.kappa_sq, "positive weights (default all ones)");

  CLI::App* s_verify = leaf(&app, "verify", "reference-value table", "verify");
  output_opts(s_verify);
  opt(s_verify, "--seed", raw.seed, "seed for the randomized checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }
  for (const auto& [sub, tag] : leaves) {
    if (sub->parsed()) raw.command = tag;
  }

  RunConfig cfg;
  try {
    cfg = validate_config(raw);
  } catch (const ValidationError& e) {
    for (const auto& p : e.problems()) err << "error: " << p << "\n";
    return 2;
  }

  try {
    const std::string text = run_command(cfg);
    write_output(cfg, text, out);
    if (cfg.command == "verify" && verify_failed(text, cfg.format)) return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

std::vector<VerifyRow> verify_suite(std::uint64_t seed) {
  std::vector<VerifyRow> rows;
  auto check = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    try {
      auto [ok, detail] = fn();
      rows.push_back({name, ok, std::move(detail)});
    } catch (const std::exception& e) {
      rows.push_back({name, false, e.what()});
    }
  };
  const double s_ep_reference = 0.5242106130;

  check("char_poly hami5 r=1/2, s in {0, 1/4, 1/2}", [] {
    for (const Rational& s : {Rational(0), Rational(1, 4), Rational(1, 2)}) {
      const Polynomial<Rational> p =
          char_poly(build_exact(preset_spec(Preset::hami5, 0.0, 0.5, static_cast<double>(s))));
      const std::vector<Rational> want = {2 * s, Rational(5, 2) - 2 * s * s, -2 * s, 2 * s * s - Rational(7, 2),
                                          Rational(0), Rational(1)};
      if (p.coefficients != want) return std::pair{false, "mismatch at s = " + s.str()};
    }
    return std::pair{true, std::string("exact")};
  });
  check("closed-form outer EP", [&] {
    const double v = s_ep_closed_form();
    return std::pair{std::abs(v - s_ep_reference) <= 1e-9, format_number(v)};
  });
  check("bisected reality boundaries +/-", [] {
    const HamiltonianSpec t = preset_spec(Preset::hami5, 0.0, 0.5, 0.0);
    const double hi = locate_reality_boundary(t, ScanParam::s, 0.4, 0.7);
    const double lo = locate_reality_boundary(t, ScanParam::s, -0.7, -0.4);
    const double ref = s_ep_closed_form();
    return std::pair{std::abs(hi - ref) <= 1e-6 && std::abs(lo + ref) <= 1e-6,
                     fmt::format("{:.12f}, {:.12f}", lo, hi)};
  });
  check("interior EPs at s = +/-1/2", [] {
    std::string detail;
    bool ok = true;
    for (const double s : {0.5, -0.5}) {
      const EPCertificate c = certify_interior_ep(build_preset(Preset::hami5, 0.0, 0.5, s), s > 0 ? -1.0 : 1.0);
      ok = ok && c.geometric_multiplicity == 1 && c.jordan_block_size == 2;
      detail += fmt::format("s={}: g={} J={}  ", s, c.geometric_multiplicity, c.jordan_block_size);
    }
    return std::pair{ok, detail};
  });
  check("domains hami5 r=1/2 [-0.8, 0.8]", [] {
    const DomainReport r = domain_report(preset_spec(Preset::hami5, 0.0, 0.5, 0.0), ScanParam::s, -0.8, 0.8, 161);
    const double e = s_ep_closed_form();
    const std::vector<double> want = {-e, -0.5, -0.5, 0.5, 0.5, e};
    bool ok = r.intervals.size() == 3;
    for (std::size_t k = 0; ok && k < 3; ++k) {
      ok = std::abs(r.intervals[k].lo - want[2 * k]) <= 1e-6 && std::abs(r.intervals[k].hi - want[2 * k + 1]) <= 1e-6;
    }
    return std::pair{ok, fmt::format("{} intervals", r.intervals.size())};
  });
  check("domains hami27 r=1/2 q=-1/15 [-1.2, 1.2]", [] {
    const DomainReport r =
        domain_report(preset_spec(Preset::hami27, -1.0 / 15.0, 0.5, 0.0), ScanParam::s, -1.2, 1.2, 481);
    return std::pair{r.intervals.size() == 3, fmt::format("{} intervals", r.intervals.size())};
  });
  check("domains hami27 r=1/2 q=1/100 [-1.2, 1.2]", [] {
    const DomainReport r = domain_report(preset_spec(Preset::hami27, 0.01, 0.5, 0.0), ScanParam::s, -1.2, 1.2, 481);
    const bool ok = r.intervals.size() == 4 && r.gaps.size() == 1 && r.intervals[0].hi == r.intervals[1].lo &&
                    r.intervals[2].hi == r.intervals[3].lo && r.intervals[1].hi < r.intervals[2].lo;
    return std::pair{ok, fmt::format("{} intervals, {} gaps", r.intervals.size(), r.gaps.size())};
  });
  check("recurrent metric dim5 xi in {0, 1/4, -1/4}", [] {
    const RationalMatrix h = build_exact(preset_spec(Preset::dim5, 0.0, 0.5, 0.0));
    for (const Rational& xi : {Rational(0), Rational(1, 4), Rational(-1, 4)}) {
      const std::vector<Rational> row = {1, 0, xi, 0, 0};
      if (!(metric_recurrent_exact(h, row) == reference_ssp(xi))) return std::pair{false, "mismatch at " + xi.str()};
    }
    return std::pair{true, std::string("exact")};
  });
  check("metric eigenvalues at xi = 0", [] {
    const std::vector<double> want = {0.1704659382, 0.4862291155, 1.0, 1.374374593, 2.468930353};
    const std::vector<double> row = {1, 0, 0, 0, 0};
    const std::vector<double> got = metric_recurrent(build_preset(Preset::dim5, 0.0, 0.5, 0.0), row).eigenvalues;
    double worst = 0.0;
    for (std::size_t k = 0; k < want.size(); ++k) worst = std::max(worst, std::abs(got[k] - want[k]));
    return std::pair{worst <= 1e-8, fmt::format("max deviation {:.3g}", worst)};
  });
  check("metric secular quintic at xi = 0", [] {
    const RationalMatrix h = build_exact(preset_spec(Preset::dim5, 0.0, 0.5, 0.0));
    const std::vector<Rational> row = {1, 0, 0, 0, 0};
    const Polynomial<Rational> p = char_poly(metric_recurrent_exact(h, row));
    const std::vector<Rational> want = {Rational(-9, 32), Rational(181, 64), Rational(-547, 64), Rational(21, 2),
                                        Rational(-11, 2), Rational(1)};
    return std::pair{p.coefficients == want, std::string(p.coefficients == want ? "exact" : "mismatch")};
  });
  check(fmt::format("reduced vs dense spectra (seed {})", seed), [seed] {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    int tested = 0;
    double worst = 0.0;
    for (int attempt = 0; attempt < 2000 && tested < 20; ++attempt) {
      HamiltonianSpec spec;
      spec.M = 1 + static_cast<int>(rng() % 4);
      spec.u = uni(rng);
      for (int k = 0; k < spec.M; ++k) {
        spec.w.emplace_back(uni(rng), uni(rng));
        spec.v.emplace_back(uni(rng), uni(rng));
      }
      const Matrix h = build_general(spec);
      const SpectrumResult r = full_spectrum(h, spec.M);
      if (!r.reduced_path) continue;
      ++tested;
      worst = std::max(worst, multiset_distance(r.energies, eig_general(h).eigenvalues));
    }
    return std::pair{tested == 20 && worst <= 1e-8, fmt::format("{} specs, max deviation {:.3g}", tested, worst)};
  });
  return rows;
}

}  // namespace ptspectra::cli
