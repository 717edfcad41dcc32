#include "me2f/cli/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "me2f/ingest/csv.hpp"
#include "me2f/ingest/remote.hpp"
#include "me2f/report.hpp"

namespace me2f::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::set<OutputFormat> parse_formats(std::string_view list) {
  std::set<OutputFormat> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const std::string_view item = list.substr(0, comma);
    if (item == "json" || item == "structured-text") {
      out.insert(OutputFormat::kJson);
    } else if (item == "table" || item == "tabular-text") {
      out.insert(OutputFormat::kTable);
    } else if (item == "chart" || item == "svg") {
      out.insert(OutputFormat::kChart);
    } else {
      throw Error(ErrorCode::kConfigError, fmt::format("unknown output format '{}'", item));
    }
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) {
    throw Error(ErrorCode::kConfigError, "no output format selected");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Score history

namespace {

using SeriesKey = std::pair<TokenId, warning::Metric>;
using PointMap = std::map<SeriesKey, std::map<Date, double>>;

void add_point(PointMap& points, const SeriesKey& key, Date date, double value, std::string_view origin) {
  auto [it, inserted] = points[key].emplace(date, value);
  if (!inserted && it->second != value) {
    throw Error(ErrorCode::kMalformedRow,
                fmt::format("{}: conflicting {} values for {} on {}", origin, warning::to_string(key.second),
                            key.first, date.iso()));
  }
}

std::vector<warning::ScoreSeries> to_series(const PointMap& points) {
  std::vector<warning::ScoreSeries> out;
  for (const auto& [key, by_date] : points) {
    warning::ScoreSeries s{key.first, key.second, {}};
    for (const auto& [date, value] : by_date) s.points.push_back({date, value});
    out.push_back(std::move(s));
  }
  return out;
}

void write_text(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, fmt::format("cannot write '{}'", path.string()));
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  }
}

}  // namespace

std::vector<warning::ScoreSeries> load_score_history_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, fmt::format("cannot open history '{}'", path.string()));
  }
  const std::string origin = path.string();
  std::string line;
  int number = 0;
  bool header = false;
  PointMap points;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kHistoryHeader) {
        throw Error(ErrorCode::kSchemaMismatch,
                    fmt::format("{}: header '{}' does not match '{}'", origin, line, kHistoryHeader));
      }
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (cells.size() != 4) {
      throw Error(ErrorCode::kMalformedRow, fmt::format("{}:{}: expected 4 columns", origin, number));
    }
    auto metric = warning::parse_metric(cells[2]);
    if (!metric) {
      throw Error(ErrorCode::kMalformedRow, fmt::format("{}:{}: column 'metric': '{}'", origin, number, cells[2]));
    }
    double value = 0;
    std::size_t used = 0;
    try {
      value = std::stod(cells[3], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cells[3].size() || used == 0 || !(value >= 0)) {
      throw Error(ErrorCode::kMalformedRow,
                  fmt::format("{}:{}: column 'value': '{}' is not a non-negative number", origin, number, cells[3]));
    }
    Date date;
    try {
      date = Date::parse(cells[0]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedRow, fmt::format("{}:{}: column 'date': {}", origin, number, e.what()));
    }
    add_point(points, {cells[1], *metric}, date, value, origin);
  }
  if (!header) {
    throw Error(ErrorCode::kEmptyFile, fmt::format("{}: file is empty", origin));
  }
  return to_series(points);
}

std::vector<warning::ScoreSeries> history_from_reports(const std::vector<scoring::FragilityReport>& reports) {
  PointMap points;
  for (const auto& r : reports) {
    if (!r.window) {
      throw Error(ErrorCode::kParseError, "report has no data window, so its scores cannot be dated");
    }
    const Date date = r.window->last;
    for (const auto& t : r.tokens) {
      if (t.vds) add_point(points, {t.id, warning::Metric::kVds}, date, *t.vds, "reports");
      if (t.wds) add_point(points, {t.id, warning::Metric::kWds}, date, *t.wds, "reports");
      if (t.sas) add_point(points, {t.id, warning::Metric::kSas}, date, *t.sas, "reports");
    }
  }
  return to_series(points);
}

std::vector<warning::ScoreSeries> merge_histories(const std::vector<warning::ScoreSeries>& a,
                                                  const std::vector<warning::ScoreSeries>& b) {
  PointMap points;
  for (const auto* src : {&a, &b}) {
    for (const auto& s : *src) {
      for (const auto& p : s.points) add_point(points, {s.token_id, s.metric}, p.date, p.value, "history");
    }
  }
  return to_series(points);
}

// ---------------------------------------------------------------------------
// Commands

namespace {

void write_charts(const scoring::FragilityReport& report, const fs::path& out_dir, std::ostream& notices,
                  std::vector<fs::path>& written) {
  for (auto metric : {warning::Metric::kVds, warning::Metric::kWds, warning::Metric::kSas}) {
    const std::string name(warning::to_string(metric));
    auto chart = report::render_chart(report, metric);
    if (!chart) {
      notices << fmt::format("notice: no token has a {} score; {} chart skipped\n", name, name);
      continue;
    }
    std::string stem = name;
    std::transform(stem.begin(), stem.end(), stem.begin(), [](unsigned char c) { return std::tolower(c); });
    write_text(out_dir / (stem + ".svg"), chart->svg);
    write_text(out_dir / (stem + ".csv"), chart->data_csv);
    written.push_back(out_dir / (stem + ".svg"));
    written.push_back(out_dir / (stem + ".csv"));
  }
}

}  // namespace

scoring::FragilityReport cmd_score(const RunConfig& config) {
  config.params.validate();
  auto inputs = load_universe(config.universe, config.params);
  auto ctx = scoring::build_context(inputs, config.params);
  auto report = scoring::score_universe(ctx);

  if (config.history) {
    auto history = load_score_history_csv(*config.history);
    if (report.window) history = merge_histories(history, history_from_reports({report}));
    auto outcome = warning::evaluate(history, config.warning);
    report.flags = std::move(outcome.flags);
    report.joint_events = std::move(outcome.joint_events);
    report.buckets = std::move(outcome.buckets);
  }

  ensure_dir(config.out_dir);
  if (config.formats.contains(OutputFormat::kJson)) {
    write_text(config.out_dir / "report.json", report::render_json(report::to_json(report)));
  }
  if (config.formats.contains(OutputFormat::kTable)) {
    write_text(config.out_dir / "report.txt", report::render_table(report));
  }
  if (config.formats.contains(OutputFormat::kChart)) {
    std::vector<fs::path> written;
    write_charts(report, config.out_dir, std::cerr, written);
  }
  return report;
}

warning::WarningOutcome cmd_warn(const std::vector<warning::ScoreSeries>& history,
                                 const warning::WarningSettings& settings, const fs::path& out_dir) {
  settings.validate();
  const bool any_full = std::any_of(history.begin(), history.end(), [&](const warning::ScoreSeries& s) {
    return s.points.size() >= static_cast<std::size_t>(settings.window_days);
  });
  if (!any_full) {
    throw Error(ErrorCode::kWindowTooShort,
                fmt::format("no score series has the {} points a full window needs", settings.window_days));
  }
  auto outcome = warning::evaluate(history, settings);

  json doc = report::warnings_to_json(outcome);
  doc["settings"] = {{"window", settings.window_days}, {"threshold", settings.threshold}, {"x_days", settings.x_days}};
  ensure_dir(out_dir);
  write_text(out_dir / "flags.json", report::render_json(doc));
  return outcome;
}

std::vector<fs::path> cmd_plot(const fs::path& report_path, const fs::path& out_dir, std::ostream& notices) {
  if (!fs::exists(report_path)) {
    throw Error(ErrorCode::kMissingReport, fmt::format("report '{}' does not exist", report_path.string()));
  }
  const auto report = load_report(report_path);
  ensure_dir(out_dir);
  std::vector<fs::path> written;
  write_charts(report, out_dir, notices, written);
  return written;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kInvalidParams:
    case ErrorCode::kEmptyUniverse:
    case ErrorCode::kMissingBaseChain:
    case ErrorCode::kUnknownToken:
      return 2;
    default:
      return 3;
  }
}

// ---------------------------------------------------------------------------
// Command line

namespace {

void add_param_flags(CLI::App& cmd, FrameworkParams& params) {
  cmd.add_option("--alpha", params.alpha, "Weight of normalized average volatility")->capture_default_str();
  cmd.add_option("--beta", params.beta, "Base-chain spillover gain")->capture_default_str();
  cmd.add_option("--gamma", params.gamma, "Scale down-weighting")->capture_default_str();
  cmd.add_option("--delta", params.delta, "Shock exponent")->capture_default_str();
  cmd.add_option("--n", params.n, "Top-holder count")->capture_default_str();
  cmd.add_option("--scale-unit", params.scale_unit, "USD divisor for volume and market cap")->capture_default_str();
}

void add_warning_flags(CLI::App& cmd, warning::WarningSettings& w) {
  cmd.add_option("--window", w.window_days, "Trailing window length (observations)")->capture_default_str();
  cmd.add_option("--threshold", w.threshold, "Percentile threshold in (0,1)")->capture_default_str();
  cmd.add_option("--x-days", w.x_days, "Joint-spike distance in days")->capture_default_str();
}

std::optional<fs::path> default_cache_dir() {
  if (const char* env = std::getenv("ME2F_CACHE_DIR"); env != nullptr && *env != '\0') return fs::path(env);
  return std::nullopt;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fragility scoring for crypto-asset universes", "me2f"};
  app.require_subcommand(1);

  RunConfig config;
  std::string formats = "json,table";
  std::string history_path;
  std::string cache_dir;
  std::string provider_config;

  auto* score = app.add_subcommand("score", "Score a token universe and write the report");
  score->add_option("--universe", config.universe, "Universe manifest (JSON)")->required();
  add_param_flags(*score, config.params);
  add_warning_flags(*score, config.warning);
  score->add_option("--history", history_path, "Score history CSV; adds early-warning flags to the report");
  score->add_option("--out", config.out_dir, "Output directory")->capture_default_str();
  score->add_option("--format", formats, "Comma list of json, table, chart")->capture_default_str();
  score->add_option("--cache-dir", cache_dir, "Response cache directory");
  score->add_option("--provider-config", provider_config, "Provider configuration (JSON)");

  std::vector<std::string> warn_reports;
  fs::path warn_out = ".";
  auto* warn = app.add_subcommand("warn", "Raise early-warning flags over a score history");
  warn->add_option("--history", history_path, "Score history CSV (date,token,metric,value)");
  warn->add_option("--report", warn_reports, "Report documents used as dated observations");
  add_warning_flags(*warn, config.warning);
  warn->add_option("--out", warn_out, "Output directory")->capture_default_str();

  std::string plot_report;
  fs::path plot_out = ".";
  auto* plot = app.add_subcommand("plot", "Render bar charts from a report");
  plot->add_option("--report", plot_report, "Report document")->required();
  plot->add_option("--out", plot_out, "Output directory")->capture_default_str();

  std::string ingest_provider;
  std::string ingest_token;
  std::string ingest_symbol;
  std::string ingest_from;
  std::string ingest_to;
  fs::path ingest_out = ".";
  bool allow_gaps = false;
  auto* ingest_cmd = app.add_subcommand("ingest", "Fetch daily bars from a configured provider");
  ingest_cmd->add_option("--provider-config", provider_config, "Provider configuration (JSON)")->required();
  ingest_cmd->add_option("--provider", ingest_provider, "Provider name (defaults to the first configured)");
  ingest_cmd->add_option("--token", ingest_token, "Token id used for output naming")->required();
  ingest_cmd->add_option("--symbol", ingest_symbol, "Provider-side identifier (defaults to --token)");
  ingest_cmd->add_option("--from", ingest_from, "First day, YYYY-MM-DD")->required();
  ingest_cmd->add_option("--to", ingest_to, "Last day, YYYY-MM-DD")->required();
  ingest_cmd->add_option("--cache-dir", cache_dir, "Response cache directory (default $ME2F_CACHE_DIR)");
  ingest_cmd->add_option("--out", ingest_out, "Output directory")->capture_default_str();
  ingest_cmd->add_flag("--allow-gaps", allow_gaps, "Write a series with missing days instead of failing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!cache_dir.empty()) config.cache_dir = fs::path(cache_dir);
    else config.cache_dir = default_cache_dir();
    if (!provider_config.empty()) config.provider_config = fs::path(provider_config);

    if (score->parsed()) {
      config.formats = parse_formats(formats);
      if (!history_path.empty()) config.history = fs::path(history_path);
      config.warning.validate();
      auto report = cmd_score(config);
      out << fmt::format("{} token(s) scored; output in {}\n", report.tokens.size(), config.out_dir.string());
      return 0;
    }
    if (warn->parsed()) {
      if (history_path.empty() && warn_reports.empty()) {
        err << "error: warn needs --history and/or --report\n";
        return 2;
      }
      std::vector<warning::ScoreSeries> history;
      if (!history_path.empty()) history = load_score_history_csv(history_path);
      if (!warn_reports.empty()) {
        std::vector<scoring::FragilityReport> reports;
        for (const auto& p : warn_reports) reports.push_back(load_report(p));
        history = merge_histories(history, history_from_reports(reports));
      }
      auto outcome = cmd_warn(history, config.warning, warn_out);
      out << fmt::format("{} flag(s), {} joint event(s) written to {}\n", outcome.flags.size(),
                         outcome.joint_events.size(), (warn_out / "flags.json").string());
      return 0;
    }
    if (plot->parsed()) {
      for (const auto& f : cmd_plot(plot_report, plot_out, err)) out << f.string() << "\n";
      return 0;
    }
    if (ingest_cmd->parsed()) {
      auto providers = ingest::load_provider_config(*config.provider_config);
      auto it = ingest_provider.empty()
                    ? providers.begin()
                    : std::find_if(providers.begin(), providers.end(),
                                   [&](const auto& p) { return p.name == ingest_provider; });
      if (it == providers.end()) {
        throw Error(ErrorCode::kConfigError, fmt::format("provider '{}' is not configured", ingest_provider));
      }
      ingest::HttplibTransport transport;
      ingest::SystemClock clock;
      ingest::MarketDataClient client(*it, transport, clock, config.cache_dir);
      const DateRange range{Date::parse(ingest_from), Date::parse(ingest_to)};
      if (range.last < range.first) {
        throw Error(ErrorCode::kConfigError, "--to precedes --from");
      }
      TokenSeries series;
      try {
        series = client.fetch_daily(ingest_symbol.empty() ? ingest_token : ingest_symbol, range);
      } catch (const ingest::PartialRangeError& e) {
        if (!allow_gaps) throw;
        err << "warning: " << e.what() << "\n";
        series = e.partial();
      }
      series.token_id = ingest_token;
      ensure_dir(ingest_out);
      const auto target = ingest_out / (ingest_token + "_bars.csv");
      write_text(target, ingest::format_bars_csv(series));
      out << fmt::format("{} bar(s) written to {} ({} request(s))\n", series.bars.size(), target.string(),
                         client.network_calls());
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 4;
}

}  // namespace me2f::cli
