#pragma once

#include <string>

#include <json.hpp>

#include "ptspectra/metric.hpp"
#include "ptspectra/model.hpp"
#include "ptspectra/scan.hpp"
#include "ptspectra/spectrum.hpp"

namespace ptspectra {

using Json = nlohmann::ordered_json;

/// Fixed 17-significant-digit rendering used in every CSV cell.
std::string format_number(double x);

Json complex_to_json(Complex z);
Json vector_to_json(const CVector& v);
/// Rows of [re, im] pairs.
Json matrix_to_json(const Matrix& m);
/// Rows of plain numbers; imaginary parts must vanish.
Json real_matrix_to_json(const Matrix& m);

/// {"preset", "M", "u", "w", "v", "q", "r", "s"}; w and v as [re, im] pairs.
Json spec_to_json(const HamiltonianSpec& spec);
/// Inverse of spec_to_json. Unknown keys, wrong types and malformed pairs
/// throw InvalidArgument naming the field. Missing keys keep their defaults.
HamiltonianSpec spec_from_json(const Json& j);

Json spectrum_to_json(const SpectrumResult& r, bool include_vectors);
Json metric_to_json(const MetricCandidate& m);
Json certificate_to_json(const EPCertificate& c);
Json domain_report_to_json(const DomainReport& r);
Json positivity_to_json(const PositivityScan& p);
Json sweep_to_json(const SweepResult& s);

/// Header "<param>,re_0,im_0,...,re_{N-1},im_{N-1},reality", one row per grid point.
std::string sweep_to_csv(const SweepResult& s);
/// Header "xi,theta_0,...,theta_{N-1},positive".
std::string positivity_to_csv(const PositivityScan& p);
/// Header "index,re,im,family".
std::string spectrum_to_csv(const SpectrumResult& r);
/// One row per matrix row, re/im pairs per entry.
std::string matrix_to_csv(const Matrix& m);

}  // namespace ptspectra
