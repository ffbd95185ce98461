#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <string>

#include "ptspectra/serialize.hpp"
#include "test_support.hpp"

using namespace ptspectra;
using namespace ptspectra::testing;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::size_t count_of(const std::string& line, char c) { return static_cast<std::size_t>(std::count(line.begin(), line.end(), c)); }

}  // namespace

TEST(Numbers, SeventeenDigits) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Json, ComplexPairs) {
  EXPECT_EQ(complex_to_json(Complex(1.5, -2.0)).dump(), "[1.5,-2.0]");
  const Json m = matrix_to_json(real_matrix({{1, 2}, {3, 4}}));
  EXPECT_EQ(m[1][0].dump(), "[3.0,0.0]");
  EXPECT_EQ(real_matrix_to_json(real_matrix({{1, 2}, {3, 4}})).dump(), "[[1.0,2.0],[3.0,4.0]]");
}

TEST(Json, SpecRoundTrip) {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 20; ++trial) {
    const HamiltonianSpec spec = random_general_spec(rng, 1 + trial % 5);
    const HamiltonianSpec back = spec_from_json(Json::parse(spec_to_json(spec).dump()));
    EXPECT_EQ(back.preset, spec.preset);
    EXPECT_EQ(back.M, spec.M);
    EXPECT_EQ(back.u, spec.u);
    EXPECT_EQ(back.w, spec.w);
    EXPECT_EQ(back.v, spec.v);
    EXPECT_EQ(build(back), build(spec));
  }
  const HamiltonianSpec named = spec_from_json(Json::parse(R"({"preset": "hami27", "q": -0.0625, "r": 0.5, "s": 0.25})"));
  EXPECT_EQ(named.preset, Preset::hami27);
  EXPECT_EQ(named.q, -0.0625);
  EXPECT_EQ(build(named), build_preset(Preset::hami27, -0.0625, 0.5, 0.25));
}

TEST(Json, SpecRejectsBadInput) {
  EXPECT_EQ(error_code([] { (void)spec_from_json(Json::parse(R"({"preset": "hami5", "t": 1})")); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(error_code([] { (void)spec_from_json(Json::parse(R"({"M": 1.5})")); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_code([] { (void)spec_from_json(Json::parse(R"({"w": [[1, 2, 3]]})")); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(error_code([] { (void)spec_from_json(Json::parse(R"({"preset": "hami6"})")); }),
            ErrorCode::UnknownPreset);
  EXPECT_EQ(error_code([] { (void)spec_from_json(Json::parse("[1, 2]")); }), ErrorCode::InvalidArgument);
  try {
    (void)spec_from_json(Json::parse(R"({"s": "half"})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("s"), std::string::npos);
  }
}

TEST(Json, SpectrumLayout) {
  const SpectrumResult r = left_eigensystem(build_preset(Preset::hami5, 0.0, 0.5, 0.0), 2);
  const Json j = spectrum_to_json(r, false);
  EXPECT_EQ(j["energies"].size(), 5u);
  EXPECT_EQ(j["energies"][0].size(), 2u);
  EXPECT_EQ(j["family"][1], "z0");
  EXPECT_EQ(j["reality"], "all_real");
  EXPECT_FALSE(j.contains("right_vectors"));
  const Json v = spectrum_to_json(r, true);
  EXPECT_EQ(v["right_vectors"].size(), 5u);
  EXPECT_EQ(v["left_vectors"].size(), 5u);
}

TEST(Json, MetricLayout) {
  const Matrix h = build_preset(Preset::dim5, 0.0, 0.5, 0.0);
  const Json j = metric_to_json(metric_recurrent(h, std::vector<double>{1, 0, 0.1, 0, 0}));
  for (const char* key : {"theta", "residual", "eigenvalues", "positive_definite", "provenance"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["theta"][1][2].get<double>(), -0.5);
  EXPECT_EQ(j["provenance"]["kind"], "recurrent");
  EXPECT_EQ(j["provenance"]["first_row"][2].get<double>(), 0.1);
  const Json s = metric_to_json(metric_spectral(build_preset(Preset::hami5, 0, 0.5, 0.3), 2, std::vector<double>(5, 1.0)));
  EXPECT_EQ(s["provenance"]["kind"], "spectral");
  EXPECT_EQ(s["provenance"]["kappa_sq"].size(), 5u);
}

TEST(Json, ReportLayout) {
  const HamiltonianSpec tmpl = preset(Preset::hami5, 0.0, 0.5, 0.0);
  const Json d = domain_report_to_json(domain_report(tmpl, ScanParam::s, -0.8, 0.8, 161));
  EXPECT_EQ(d["intervals"].size(), 3u);
  EXPECT_EQ(d["boundaries"].size(), 4u);
  EXPECT_EQ(d["boundaries"][1]["type"], "interior_crossing");
  const Json c = certificate_to_json(certify_interior_ep(build_preset(Preset::hami5, 0, 0.5, 0.5), -1.0));
  EXPECT_EQ(c["geometric_multiplicity"], 1);
  EXPECT_EQ(c["jordan_block_size"], 2);
}

TEST(Csv, SweepRows) {
  const SweepResult r = sweep_spectrum(preset(Preset::hami5, 0.0, 0.5, 0.0), ScanParam::s, -0.8, 0.8, 17);
  const auto lines = lines_of(sweep_to_csv(r));
  ASSERT_EQ(lines.size(), 18u);
  EXPECT_EQ(lines[0].rfind("s,", 0), 0u);
  EXPECT_NE(lines[0].find("re_0,im_0"), std::string::npos);
  for (const auto& line : lines) EXPECT_EQ(count_of(line, ','), 11u) << line;
  EXPECT_EQ(lines[1].rfind("-0.80000000000000004,", 0), 0u);
  EXPECT_NE(lines[1].find("complex_pairs"), std::string::npos);
  EXPECT_NE(lines[9].find("all_real"), std::string::npos);
}

TEST(Csv, MatrixAndPositivity) {
  const auto m = lines_of(matrix_to_csv(real_matrix({{1, 0.5}, {0.25, 2}})));
  ASSERT_GE(m.size(), 2u);
  const Matrix h = build_preset(Preset::dim5, 0.0, 0.5, 0.0);
  const PositivityScan p = metric_positivity_interval(h, std::vector<double>{1, 0, 0, 0, 0},
                                                      std::vector<double>{0, 0, 1, 0, 0}, 0.0, -1.0, 2.0, 31);
  const auto rows = lines_of(positivity_to_csv(p));
  EXPECT_EQ(rows.size(), 32u);
  EXPECT_EQ(count_of(rows[0], ','), count_of(rows[1], ','));
}
