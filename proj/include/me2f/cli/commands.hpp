#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "me2f/domain.hpp"
#include "me2f/error.hpp"
#include "me2f/scoring.hpp"
#include "me2f/warning.hpp"

namespace me2f::cli {

enum class OutputFormat { kJson, kTable, kChart };

/// Accepts json|structured-text, table|tabular-text, chart|svg, comma separated.
std::set<OutputFormat> parse_formats(std::string_view list);

struct RunConfig {
  std::filesystem::path universe;
  FrameworkParams params;
  warning::WarningSettings warning;
  std::filesystem::path out_dir = ".";
  std::set<OutputFormat> formats{OutputFormat::kJson, OutputFormat::kTable};
  std::optional<std::filesystem::path> history;
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::filesystem::path> provider_config;
};

/// Universe manifest (JSON). Relative paths resolve against the manifest's
/// directory:
///
///   {
///     "volatility_summary": "vol.csv",        // pre-aggregated rows
///     "fgi_summary": "fgi.csv",
///     "tokens": [
///       {"id": "X", "role": "hosted", "base": "ETH", "bars": "x.csv",
///        "holders": "x_holders.csv", "holders_as_of": "2025-03-01",
///        "exclude_addresses": ["0x..."], "sentiment": "x_fgi.csv"}
///     ]
///   }
///
/// Throws kConfigError (naming the file) for structural problems and
/// kEmptyUniverse when no token is declared.
std::vector<scoring::TokenInput> load_universe(const std::filesystem::path& manifest, const FrameworkParams& params);

inline constexpr std::string_view kHistoryHeader = "date,token,metric,value";

std::vector<warning::ScoreSeries> load_score_history_csv(const std::filesystem::path& path);

/// Each report contributes one point per present score, dated at the end of
/// the report window. Throws kParseError for reports without a window.
std::vector<warning::ScoreSeries> history_from_reports(const std::vector<scoring::FragilityReport>& reports);

/// Merges histories; identical duplicates collapse, conflicting ones throw.
std::vector<warning::ScoreSeries> merge_histories(const std::vector<warning::ScoreSeries>& a,
                                                  const std::vector<warning::ScoreSeries>& b);

scoring::FragilityReport load_report(const std::filesystem::path& path);

/// Scores the universe and writes report.json / report.txt / charts per the
/// configured formats. Returns the report.
scoring::FragilityReport cmd_score(const RunConfig& config);

/// Evaluates early-warning flags over the history and writes flags.json.
/// Throws kWindowTooShort when no series fills a window.
warning::WarningOutcome cmd_warn(const std::vector<warning::ScoreSeries>& history,
                                 const warning::WarningSettings& settings, const std::filesystem::path& out_dir);

/// Writes <metric>.svg plus <metric>.csv for every score present in the
/// report; returns the list of written files. Missing report: kMissingReport.
std::vector<std::filesystem::path> cmd_plot(const std::filesystem::path& report_path,
                                            const std::filesystem::path& out_dir, std::ostream& notices);

/// 2 config error, 3 data error, 4 internal error.
int exit_code_for(ErrorCode code);

/// Full command-line entry point; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace me2f::cli
