#include "me2f/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "me2f/error.hpp"

namespace me2f::report {

using nlohmann::json;
using scoring::FragilityReport;
using scoring::TokenReport;

double round_places(double value, int places) {
  const double scale = std::pow(10.0, places);
  return std::round(value * scale) / scale;
}

namespace {

json opt(const std::optional<double>& v, int places = -1) {
  if (!v) return nullptr;
  return places < 0 ? *v : round_places(*v, places);
}

json range_json(const std::optional<DateRange>& r) {
  if (!r) return nullptr;
  return {{"start", r->first.iso()}, {"end", r->last.iso()}};
}

std::optional<DateRange> range_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return DateRange{Date::parse(j.at("start").get<std::string>()), Date::parse(j.at("end").get<std::string>())};
}

std::optional<double> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

json volatility_json(const volatility::VolatilityAggregate& a) {
  return {{"avg_vol", a.avg_vol},
          {"max_vol", a.max_vol},
          {"avg_vol_pct", round_places(a.avg_vol * 100, 2)},
          {"max_vol_pct", round_places(a.max_vol * 100, 2)},
          {"max_volume", a.max_volume},
          {"max_mcap", a.max_mcap},
          {"window", range_json(a.window)}};
}

json breakdown_json(const volatility::VdsBreakdown& b) {
  return {{"v_a", b.normalized.v_a},      {"v_m", b.normalized.v_m}, {"composite", b.composite},
          {"scale", b.scale},             {"resilience", b.resilience}, {"phi", b.phi},
          {"spillover", b.spillover}};
}

json concentration_json(const whale::ConcentrationResult& c) {
  return {{"c", c.c}, {"h", c.h}, {"n_internal", c.n_internal}};
}

json fgi_json(const sentiment::FgiIndicators& f) {
  return {{"f_bar", f.f_bar},
          {"f_max", f.f_max},
          {"f_min", f.f_min},
          {"r_f", f.r_f},
          {"q_g", f.q_g},
          {"q_f", f.q_f},
          {"q_g_pct", round_places(f.q_g * 100, 2)},
          {"q_f_pct", round_places(f.q_f * 100, 2)},
          {"delta_f_max", f.delta_f_max},
          {"delta_p_max", f.delta_p_max},
          {"delta_p_max_pct", round_places(f.delta_p_max * 100, 2)},
          {"window", range_json(f.window)}};
}

json flags_json(const std::vector<warning::WarningFlag>& flags) {
  json out = json::array();
  for (const auto& f : flags) {
    out.push_back({{"token", f.token_id},
                   {"metric", warning::to_string(f.metric)},
                   {"date", f.date.iso()},
                   {"value", f.value},
                   {"window_percentile", f.window_percentile}});
  }
  return out;
}

json events_json(const std::vector<warning::JointEvent>& events) {
  json out = json::array();
  for (const auto& e : events) {
    out.push_back({{"token", e.token_id},
                   {"date", e.date.iso()},
                   {"metrics", {warning::to_string(e.first), warning::to_string(e.second)}}});
  }
  return out;
}

json buckets_json(const std::vector<warning::BucketAssignment>& buckets) {
  json out = json::array();
  for (const auto& b : buckets) {
    json active = json::array();
    for (auto m : b.active) active.push_back(warning::to_string(m));
    out.push_back({{"token", b.token_id},
                   {"date", b.date.iso()},
                   {"bucket", warning::to_string(b.bucket)},
                   {"active", active}});
  }
  return out;
}

warning::Metric metric_from(const json& j) {
  auto m = warning::parse_metric(j.get<std::string>());
  if (!m) throw Error(ErrorCode::kParseError, fmt::format("unknown metric '{}'", j.get<std::string>()));
  return *m;
}

std::optional<double> score_of(const TokenReport& t, warning::Metric metric) {
  switch (metric) {
    case warning::Metric::kVds: return t.vds;
    case warning::Metric::kWds: return t.wds;
    case warning::Metric::kSas: return t.sas;
  }
  return std::nullopt;
}

}  // namespace

json to_json(const FragilityReport& report) {
  json doc;
  const auto& p = report.params;
  doc["params"] = {{"alpha", p.alpha}, {"beta", p.beta},   {"gamma", p.gamma},
                   {"delta", p.delta}, {"n", p.n},         {"scale_unit", p.scale_unit}};
  doc["window"] = range_json(report.window);
  json tokens = json::array();
  for (const TokenReport& t : report.tokens) {
    json inputs;
    inputs["volatility"] = t.volatility ? volatility_json(*t.volatility) : json(nullptr);
    inputs["vds_breakdown"] = t.vds_breakdown ? breakdown_json(*t.vds_breakdown) : json(nullptr);
    inputs["concentration"] = t.concentration ? concentration_json(*t.concentration) : json(nullptr);
    inputs["fgi"] = t.fgi ? fgi_json(*t.fgi) : json(nullptr);
    inputs["instability"] = opt(t.instability);
    inputs["shock"] = opt(t.shock);
    tokens.push_back({{"id", t.id},
                      {"role", t.role.is_standalone() ? "standalone" : "hosted"},
                      {"base", t.role.base() ? json(*t.role.base()) : json(nullptr)},
                      {"vds", opt(t.vds, 3)},
                      {"wds", opt(t.wds, 3)},
                      {"sas", opt(t.sas, 3)},
                      {"raw", {{"vds", opt(t.vds)}, {"wds", opt(t.wds)}, {"sas", opt(t.sas)}}},
                      {"inputs", inputs},
                      {"window", range_json(t.window)},
                      {"warnings", t.warnings}});
  }
  doc["tokens"] = tokens;
  doc["flags"] = flags_json(report.flags);
  doc["joint_events"] = events_json(report.joint_events);
  doc["buckets"] = buckets_json(report.buckets);
  return doc;
}

FragilityReport from_json(const json& doc) {
  try {
    FragilityReport report;
    const json& p = doc.at("params");
    report.params = {p.at("alpha").get<double>(), p.at("beta").get<double>(), p.at("gamma").get<double>(),
                     p.at("delta").get<double>(), p.at("n").get<int>(),       p.at("scale_unit").get<double>()};
    report.window = range_from(doc.at("window"));
    for (const json& t : doc.at("tokens")) {
      TokenReport tr;
      tr.id = t.at("id").get<std::string>();
      tr.role = t.at("base").is_null() ? ChainRole::standalone() : ChainRole::hosted_on(t["base"].get<std::string>());
      const json& raw = t.at("raw");
      tr.vds = opt_from(raw, "vds");
      tr.wds = opt_from(raw, "wds");
      tr.sas = opt_from(raw, "sas");
      const json& in = t.at("inputs");
      if (const json& v = in.at("volatility"); !v.is_null()) {
        tr.volatility = volatility::VolatilityAggregate{tr.id,
                                                        v.at("avg_vol").get<double>(),
                                                        v.at("max_vol").get<double>(),
                                                        v.at("max_volume").get<double>(),
                                                        v.at("max_mcap").get<double>(),
                                                        range_from(v.at("window"))};
      }
      if (const json& b = in.at("vds_breakdown"); !b.is_null()) {
        volatility::VdsBreakdown br;
        br.normalized = {tr.id, b.at("v_a").get<double>(), b.at("v_m").get<double>()};
        br.composite = b.at("composite").get<double>();
        br.scale = b.at("scale").get<double>();
        br.resilience = b.at("resilience").get<double>();
        br.phi = b.at("phi").get<double>();
        br.spillover = b.at("spillover").get<double>();
        br.vds = tr.vds.value_or(0.0);
        tr.vds_breakdown = br;
      }
      if (const json& c = in.at("concentration"); !c.is_null()) {
        tr.concentration = whale::ConcentrationResult{tr.id, c.at("c").get<double>(), c.at("h").get<double>(),
                                                      c.at("n_internal").get<double>(), tr.wds.value_or(0.0)};
      }
      if (const json& f = in.at("fgi"); !f.is_null()) {
        sentiment::FgiIndicators ind;
        ind.token_id = tr.id;
        ind.f_bar = f.at("f_bar").get<double>();
        ind.f_max = f.at("f_max").get<double>();
        ind.f_min = f.at("f_min").get<double>();
        ind.r_f = f.at("r_f").get<double>();
        ind.q_g = f.at("q_g").get<double>();
        ind.q_f = f.at("q_f").get<double>();
        ind.delta_f_max = f.at("delta_f_max").get<double>();
        ind.delta_p_max = f.at("delta_p_max").get<double>();
        ind.window = range_from(f.at("window"));
        tr.fgi = ind;
      }
      tr.instability = opt_from(in, "instability");
      tr.shock = opt_from(in, "shock");
      tr.window = range_from(t.at("window"));
      tr.warnings = t.at("warnings").get<std::vector<std::string>>();
      report.tokens.push_back(std::move(tr));
    }
    for (const json& f : doc.at("flags")) {
      report.flags.push_back({f.at("token").get<std::string>(), metric_from(f.at("metric")),
                              Date::parse(f.at("date").get<std::string>()), f.at("value").get<double>(),
                              f.at("window_percentile").get<double>()});
    }
    for (const json& e : doc.at("joint_events")) {
      const json& m = e.at("metrics");
      report.joint_events.push_back({e.at("token").get<std::string>(), Date::parse(e.at("date").get<std::string>()),
                                     metric_from(m.at(0)), metric_from(m.at(1))});
    }
    for (const json& b : doc.at("buckets")) {
      auto bucket = warning::parse_bucket(b.at("bucket").get<std::string>());
      if (!bucket) throw Error(ErrorCode::kParseError, "unknown action bucket");
      std::vector<warning::Metric> active;
      for (const json& m : b.at("active")) active.push_back(metric_from(m));
      report.buckets.push_back({b.at("token").get<std::string>(), Date::parse(b.at("date").get<std::string>()),
                                *bucket, std::move(active)});
    }
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, fmt::format("report document: {}", e.what()));
  }
}

json warnings_to_json(const warning::WarningOutcome& outcome) {
  return {{"flags", flags_json(outcome.flags)},
          {"joint_events", events_json(outcome.joint_events)},
          {"buckets", buckets_json(outcome.buckets)}};
}

std::string render_json(const json& doc) { return doc.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Text table

namespace {

constexpr std::string_view kAbsent = "—";

std::size_t display_width(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

std::string pad(std::string_view s, std::size_t width, bool right) {
  const std::size_t w = display_width(s);
  const std::string fill(w < width ? width - w : 0, ' ');
  return right ? fill + std::string(s) : std::string(s) + fill;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string cell(const std::optional<double>& v, int places) {
  if (!v) return std::string(kAbsent);
  return fmt::format("{:.{}f}", round_places(*v, places), places);
}

void append_table(std::string& out, const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    widths[c] = display_width(header[c]);
    for (const auto& r : rows) widths[c] = std::max(widths[c], display_width(r[c]));
  }
  auto line = [&](const std::vector<std::string>& r) {
    std::string l;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c > 0) l += "  ";
      l += pad(r[c], widths[c], c > 0);
    }
    while (!l.empty() && l.back() == ' ') l.pop_back();
    out += l + "\n";
  };
  line(header);
  std::size_t total = 0;
  for (auto w : widths) total += w;
  out += std::string(total + 2 * (widths.size() - 1), '-') + "\n";
  for (const auto& r : rows) line(r);
}

}  // namespace

std::string render_table(const FragilityReport& report) {
  std::string out = "Fragility measurement summary\n\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : report.tokens) {
    rows.push_back({t.id, cell(t.vds, 3), cell(t.wds, 3), cell(t.sas, 3)});
  }
  append_table(out, {"Token", "VDS", "WDS", "SAS"}, rows);

  rows.clear();
  for (const auto& t : report.tokens) {
    if (!t.volatility) continue;
    const auto& v = *t.volatility;
    rows.push_back({t.id, cell(v.avg_vol * 100, 2), cell(v.max_vol * 100, 2), cell(v.max_volume, 2),
                    cell(v.max_mcap, 2), t.role.base().value_or(std::string(kAbsent))});
  }
  if (!rows.empty()) {
    out += "\nVolatility and market inputs (scale unit " + fmt::format("{:g}", report.params.scale_unit) + " USD)\n\n";
    append_table(out, {"Token", "Avg vol %", "Max vol %", "Max volume", "Max mcap", "Base"}, rows);
  }

  rows.clear();
  for (const auto& t : report.tokens) {
    if (!t.fgi) continue;
    const auto& f = *t.fgi;
    rows.push_back({t.id, cell(f.f_bar, 2), cell(f.f_max, 2), cell(f.f_min, 2), cell(f.r_f, 2),
                    cell(f.q_g * 100, 2), cell(f.q_f * 100, 2), cell(f.delta_f_max, 2), cell(f.delta_p_max * 100, 2)});
  }
  if (!rows.empty()) {
    out += "\nSentiment inputs\n\n";
    append_table(out, {"Token", "F avg", "F max", "F min", "R_F", "Q_g %", "Q_f %", "dF max", "dP max %"}, rows);
  }

  bool any_warning = false;
  for (const auto& t : report.tokens) {
    for (const auto& w : t.warnings) {
      if (!any_warning) out += "\nWarnings\n\n";
      any_warning = true;
      out += fmt::format("  {}: {}\n", t.id, w);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG chart

std::optional<Chart> render_chart(const FragilityReport& report, warning::Metric metric) {
  std::vector<std::pair<std::string, double>> bars;
  for (const auto& t : report.tokens) {
    if (auto v = score_of(t, metric)) bars.emplace_back(t.id, *v);
  }
  if (bars.empty()) return std::nullopt;
  std::stable_sort(bars.begin(), bars.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  const std::string name(warning::to_string(metric));
  constexpr int kLeft = 60;
  constexpr int kTop = 40;
  constexpr int kPlotHeight = 300;
  constexpr int kSlot = 56;
  constexpr int kBarWidth = 32;
  const int plot_width = kSlot * static_cast<int>(bars.size());
  const int width = kLeft + plot_width + 20;
  const int height = kTop + kPlotHeight + 70;

  const double top_value = std::max(0.1, std::ceil(round_places(bars.front().second, 3) * 10.0) / 10.0);
  auto y_of = [&](double v) { return kTop + kPlotHeight - v / top_value * kPlotHeight; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"DejaVu Sans, sans-serif\" font-size=\"11\">\n",
      width, height);
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", width, height);
  svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{} across tokens</text>\n",
                     width / 2, name);

  const int ticks = static_cast<int>(std::lround(top_value * 10));
  for (int i = 0; i <= ticks; ++i) {
    const double v = i / 10.0;
    const double y = y_of(v);
    svg += fmt::format("<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"#d9d9d9\" "
                       "stroke-dasharray=\"3,3\"/>\n",
                       kLeft, y, kLeft + plot_width, y);
    svg += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.1f}</text>\n", kLeft - 6, y + 4, v);
  }
  svg += fmt::format("<text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{}</text>\n",
                     kTop + kPlotHeight / 2, kTop + kPlotHeight / 2, name);

  std::string csv = "rank,token,value,raw\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& [token, value] = bars[i];
    const double shown = round_places(value, 3);
    const double x = kLeft + kSlot * static_cast<double>(i) + (kSlot - kBarWidth) / 2.0;
    const double y = y_of(shown);
    svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{}\" height=\"{:.1f}\" fill=\"#3b8686\"/>\n", x, y,
                       kBarWidth, kTop + kPlotHeight - y);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"10\">{:.3f}</text>\n",
                       x + kBarWidth / 2.0, y - 4, shown);
    const double lx = x + kBarWidth / 2.0;
    const int ly = kTop + kPlotHeight + 14;
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"end\" transform=\"rotate(-25 {:.1f} {})\">{}</text>\n",
                       lx, ly, lx, ly, xml_escape(token));
    csv += fmt::format("{},{},{:.3f},{}\n", i + 1, token, shown, value);
  }
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#333333\"/>\n", kLeft,
                     kTop + kPlotHeight, kLeft + plot_width);
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#333333\"/>\n", kLeft, kTop,
                     kTop + kPlotHeight);
  svg += "</svg>\n";
  return Chart{std::move(svg), std::move(csv)};
}

}  // namespace me2f::report
