#include "ptspectra/serialize.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <string_view>

namespace ptspectra {

namespace {

const std::array<std::string_view, 8> kSpecKeys = {"preset", "M", "u", "w", "v", "q", "r", "s"};

[[noreturn]] void bad_field(std::string_view field, std::string_view what) {
  throw Error(ErrorCode::InvalidArgument, "field '" + std::string(field) + "': " + std::string(what));
}

double number_field(const Json& j, std::string_view field) {
  if (!j.is_number()) bad_field(field, "expected a number");
  return j.get<double>();
}

Complex complex_field(const Json& j, std::string_view field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    bad_field(field, "expected [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

CVector complex_list(const Json& j, std::string_view field) {
  if (!j.is_array()) bad_field(field, "expected a list of [re, im] pairs");
  CVector out;
  for (const auto& x : j) out.push_back(complex_field(x, field));
  return out;
}

std::string csv_join(const std::vector<std::string>& cells) {
  return fmt::format("{}\n", fmt::join(cells, ","));
}

}  // namespace

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json vector_to_json(const CVector& v) {
  Json out = Json::array();
  for (const auto& z : v) out.push_back(complex_to_json(z));
  return out;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

Json real_matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).real());
    out.push_back(std::move(row));
  }
  return out;
}

Json spec_to_json(const HamiltonianSpec& spec) {
  Json j;
  j["preset"] = std::string(to_string(spec.preset));
  j["M"] = spec.M;
  j["u"] = spec.u;
  j["w"] = vector_to_json(spec.w);
  j["v"] = vector_to_json(spec.v);
  j["q"] = spec.q;
  j["r"] = spec.r;
  j["s"] = spec.s;
  return j;
}

HamiltonianSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "model spec must be a JSON object");
  for (const auto& item : j.items()) {
    if (std::find(kSpecKeys.begin(), kSpecKeys.end(), item.key()) == kSpecKeys.end()) {
      bad_field(item.key(), "unknown field");
    }
  }
  HamiltonianSpec spec;
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) bad_field("preset", "expected a string");
    spec.preset = parse_preset(j["preset"].get<std::string>());
  }
  if (j.contains("M")) {
    if (!j["M"].is_number_integer()) bad_field("M", "expected an integer");
    spec.M = j["M"].get<int>();
  }
  if (j.contains("u")) spec.u = number_field(j["u"], "u");
  if (j.contains("w")) spec.w = complex_list(j["w"], "w");
  if (j.contains("v")) spec.v = complex_list(j["v"], "v");
  if (j.contains("q")) spec.q = number_field(j["q"], "q");
  if (j.contains("r")) spec.r = number_field(j["r"], "r");
  if (j.contains("s")) spec.s = number_field(j["s"], "s");
  return spec;
}

Json spectrum_to_json(const SpectrumResult& r, bool include_vectors) {
  Json j;
  j["energies"] = vector_to_json(r.energies);
  Json family = Json::array();
  for (Family f : r.family) family.push_back(std::string(to_string(f)));
  j["family"] = std::move(family);
  j["reality"] = std::string(to_string(r.reality));
  if (include_vectors) {
    Json right = Json::array();
    for (const auto& v : r.right_vectors) right.push_back(vector_to_json(v));
    j["right_vectors"] = std::move(right);
    if (!r.left_vectors.empty()) {
      Json left = Json::array();
      for (const auto& v : r.left_vectors) left.push_back(vector_to_json(v));
      j["left_vectors"] = std::move(left);
    }
  }
  return j;
}

Json metric_to_json(const MetricCandidate& m) {
  Json j;
  j["theta"] = is_real(m.theta) ? real_matrix_to_json(m.theta) : matrix_to_json(m.theta);
  j["residual"] = m.residual;
  j["eigenvalues"] = m.eigenvalues;
  j["positive_definite"] = m.positive_definite;
  Json prov;
  prov["kind"] = std::string(to_string(m.provenance));
  prov[m.provenance == MetricProvenance::recurrent ? "first_row" : "kappa_sq"] = m.parameters;
  j["provenance"] = std::move(prov);
  return j;
}

Json certificate_to_json(const EPCertificate& c) {
  Json j;
  j["param_value"] = c.param_value;
  j["degenerate_eigenvalue"] = complex_to_json(c.degenerate_eigenvalue);
  j["geometric_multiplicity"] = c.geometric_multiplicity;
  j["jordan_block_size"] = c.jordan_block_size;
  j["ranks"] = c.ranks;
  j["null_vector"] = vector_to_json(c.null_vector);
  return j;
}

Json domain_report_to_json(const DomainReport& r) {
  auto interval = [](const Interval& iv) { return Json::array({iv.lo, iv.hi}); };
  Json j;
  j["param"] = std::string(to_string(r.param));
  j["window"] = interval(r.window);
  j["n_points"] = r.n_points;
  Json intervals = Json::array();
  for (const auto& iv : r.intervals) intervals.push_back(interval(iv));
  j["intervals"] = std::move(intervals);
  Json boundaries = Json::array();
  for (const auto& b : r.boundaries) {
    boundaries.push_back(Json{{"value", b.value}, {"type", std::string(to_string(b.type))}});
  }
  j["boundaries"] = std::move(boundaries);
  Json gaps = Json::array();
  for (const auto& iv : r.gaps) gaps.push_back(interval(iv));
  j["gaps"] = std::move(gaps);
  Json certs = Json::array();
  for (const auto& c : r.certificates) certs.push_back(certificate_to_json(c));
  j["certificates"] = std::move(certs);
  return j;
}

Json positivity_to_json(const PositivityScan& p) {
  Json j;
  j["interval"] = Json::array({p.interval.lo, p.interval.hi});
  j["lower_bounded"] = p.lower_bounded;
  j["upper_bounded"] = p.upper_bounded;
  j["grid"] = p.grid;
  j["eigencurves"] = p.eigencurves;
  return j;
}

Json sweep_to_json(const SweepResult& s) {
  Json j;
  j["param"] = std::string(to_string(s.param));
  j["grid"] = s.grid;
  Json energies = Json::array();
  for (const auto& e : s.energies) energies.push_back(vector_to_json(e));
  j["energies"] = std::move(energies);
  Json reality = Json::array();
  for (Reality r : s.reality) reality.push_back(std::string(to_string(r)));
  j["reality"] = std::move(reality);
  return j;
}

std::string sweep_to_csv(const SweepResult& s) {
  std::vector<std::string> header{std::string(to_string(s.param))};
  for (std::size_t k = 0; k < s.dimension(); ++k) {
    header.push_back(fmt::format("re_{}", k));
    header.push_back(fmt::format("im_{}", k));
  }
  header.emplace_back("reality");
  std::string out = csv_join(header);
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    std::vector<std::string> row{format_number(s.grid[i])};
    for (const auto& z : s.energies[i]) {
      row.push_back(format_number(z.real()));
      row.push_back(format_number(z.imag()));
    }
    row.emplace_back(to_string(s.reality[i]));
    out += csv_join(row);
  }
  return out;
}

std::string positivity_to_csv(const PositivityScan& p) {
  const std::size_t n = p.eigencurves.empty() ? 0 : p.eigencurves.front().size();
  std::vector<std::string> header{"xi"};
  for (std::size_t k = 0; k < n; ++k) header.push_back(fmt::format("theta_{}", k));
  header.emplace_back("positive");
  std::string out = csv_join(header);
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    std::vector<std::string> row{format_number(p.grid[i])};
    for (double t : p.eigencurves[i]) row.push_back(format_number(t));
    const bool positive = !p.eigencurves[i].empty() && p.eigencurves[i].front() > kPdTol;
    row.emplace_back(positive ? "true" : "false");
    out += csv_join(row);
  }
  return out;
}

std::string spectrum_to_csv(const SpectrumResult& r) {
  std::string out = "index,re,im,family\n";
  for (std::size_t k = 0; k < r.energies.size(); ++k) {
    out += csv_join({std::to_string(k), format_number(r.energies[k].real()), format_number(r.energies[k].imag()),
                     std::string(to_string(r.family[k]))});
  }
  return out;
}

std::string matrix_to_csv(const Matrix& m) {
  std::vector<std::string> header;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    header.push_back(fmt::format("re_{}", j));
    header.push_back(fmt::format("im_{}", j));
  }
  std::string out = csv_join(header);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      row.push_back(format_number(m(i, j).real()));
      row.push_back(format_number(m(i, j).imag()));
    }
    out += csv_join(row);
  }
  return out;
}

}  // namespace ptspectra
