#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "me2f/scoring.hpp"
#include "me2f/warning.hpp"

namespace me2f::report {

/// Display rounding: 3 decimals for scores, 2 for percentages.
double round_places(double value, int places);

/// Structured report document. Scores appear rounded under `vds`/`wds`/`sas`
/// and at full precision under `raw`; absent scores are null.
nlohmann::json to_json(const scoring::FragilityReport& report);

/// Inverse of to_json (reads the `raw` values). Throws kParseError.
scoring::FragilityReport from_json(const nlohmann::json& doc);

nlohmann::json warnings_to_json(const warning::WarningOutcome& outcome);

std::string render_json(const nlohmann::json& doc);

/// Plain-text summary table; absent scores render as an em dash.
std::string render_table(const scoring::FragilityReport& report);

struct Chart {
  std::string svg;
  std::string data_csv;
};

/// Descending bar chart of one score; nullopt when no token has that score.
std::optional<Chart> render_chart(const scoring::FragilityReport& report, warning::Metric metric);

}  // namespace me2f::report
