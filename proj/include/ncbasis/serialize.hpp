#pragma once

#include <string>

#include <json.hpp>

#include "ncbasis/normlab.hpp"

namespace ncbasis {

using nlohmann::json;

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double x);

/// Accepts a decimal literal or an exact fraction "num/den"; returns alpha
/// and writes the separately rounded 1-alpha, which matters because
/// 1.0 - nearest(1/3) differs from nearest(2/3) by one ulp.
double parse_alpha(const std::string& text, double* one_minus_alpha);

/// {"dim": n, "data": [[re, im], ...]} row-major; entries may be numbers or
/// strings (hex-float accepted), output is decimal at full precision.
json matrix_to_json(const Mat& x);
Mat matrix_from_json(const json& j);

json weight_to_json(const Weight& w);
Weight weight_from_json(const json& j);

/// {"side", "alpha", "level", "quads": [[4 matrices] per level]}; elements
/// are regenerated on load, never trusted from disk.
json haar_to_json(const HaarSystem& sys);
HaarSystem haar_from_json(const json& j);

/// Columns k, k/2^nu, mass.
std::string measure_to_csv(const MeasureTable& table);

/// Columns alpha, level, p, side, m, estimate, bound, method, samples, seed,
/// pass. A non-null config is embedded in a leading "# config" line so a run
/// can be reproduced from its own report.
std::string report_to_csv(const NormReport& report, const json* config = nullptr);
json report_to_json(const NormReport& report, const json* config = nullptr);

}  // namespace ncbasis
