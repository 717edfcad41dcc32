#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

#include "me2f/cli/commands.hpp"
#include "me2f/ingest/csv.hpp"
#include "me2f/report.hpp"

namespace me2f::cli {

using nlohmann::json;

namespace {

struct Draft {
  std::optional<ChainRole> role;
  std::optional<scoring::VolatilityInput> volatility;
  std::optional<HolderSnapshot> holders;
  std::optional<scoring::SentimentInput> sentiment;
};

ChainRole role_from(const json& entry, const std::string& id, const std::string& file) {
  const std::string role = entry.value("role", std::string("standalone"));
  if (role == "standalone") {
    if (entry.contains("base")) {
      throw Error(ErrorCode::kConfigError, fmt::format("{}: standalone token '{}' declares a base", file, id));
    }
    return ChainRole::standalone();
  }
  if (role == "hosted") {
    if (!entry.contains("base")) {
      throw Error(ErrorCode::kConfigError, fmt::format("{}: hosted token '{}' needs a base", file, id));
    }
    return ChainRole::hosted_on(entry["base"].get<std::string>());
  }
  throw Error(ErrorCode::kConfigError, fmt::format("{}: token '{}' has unknown role '{}'", file, id, role));
}

}  // namespace

std::vector<scoring::TokenInput> load_universe(const std::filesystem::path& manifest, const FrameworkParams& params) {
  const std::string file = manifest.string();
  std::ifstream in(manifest);
  if (!in) {
    throw Error(ErrorCode::kConfigError, fmt::format("cannot open universe file '{}'", file));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (buffer.str().find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::kConfigError, fmt::format("universe file '{}' is empty", file));
  }
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, fmt::format("universe file '{}': {}", file, e.what()));
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kConfigError, fmt::format("universe file '{}' must hold a JSON object", file));
  }
  const auto dir = manifest.parent_path();
  auto resolve = [&dir](const json& p) { return dir / p.get<std::string>(); };

  std::vector<std::string> order;
  std::map<std::string, Draft> drafts;
  auto draft_for = [&](const std::string& id) -> Draft& {
    if (!drafts.contains(id)) order.push_back(id);
    return drafts[id];
  };

  try {
    if (doc.contains("volatility_summary")) {
      for (auto& row : ingest::load_volatility_summary_csv(resolve(doc["volatility_summary"]), params.scale_unit)) {
        Draft& d = draft_for(row.aggregate.token_id);
        if (d.volatility) {
          throw Error(ErrorCode::kConfigError,
                      fmt::format("{}: token '{}' appears twice in the volatility summary", file,
                                  row.aggregate.token_id));
        }
        d.role = row.role;
        d.volatility = std::move(row.aggregate);
      }
    }

    for (const json& entry : doc.value("tokens", json::array())) {
      const std::string id = entry.at("id").get<std::string>();
      Draft& d = draft_for(id);
      if (entry.contains("role") || entry.contains("base") || !d.role) {
        ChainRole role = role_from(entry, id, file);
        if (d.role && !(*d.role == role)) {
          throw Error(ErrorCode::kConfigError, fmt::format("{}: conflicting chain role for '{}'", file, id));
        }
        d.role = role;
      }
      if (entry.contains("bars")) {
        if (d.volatility) {
          throw Error(ErrorCode::kConfigError, fmt::format("{}: '{}' has both bars and a summary row", file, id));
        }
        d.volatility = ingest::load_bars_csv(resolve(entry["bars"]), id);
      }
      if (entry.contains("holders")) {
        ingest::HolderLoadOptions opts;
        opts.n = params.n;
        if (entry.contains("holders_as_of")) opts.as_of = Date::parse(entry["holders_as_of"].get<std::string>());
        for (const json& a : entry.value("exclude_addresses", json::array())) {
          opts.excluded_addresses.insert(a.get<std::string>());
        }
        d.holders = ingest::load_holders_csv(resolve(entry["holders"]), id, opts);
      }
      if (entry.contains("sentiment")) {
        d.sentiment = ingest::load_sentiment_csv(resolve(entry["sentiment"]), id);
      }
    }

    if (doc.contains("fgi_summary")) {
      for (auto& ind : ingest::load_fgi_summary_csv(resolve(doc["fgi_summary"]))) {
        auto it = drafts.find(ind.token_id);
        if (it == drafts.end()) {
          throw Error(ErrorCode::kConfigError,
                      fmt::format("{}: FGI summary names '{}', which is not in the universe", file, ind.token_id));
        }
        if (it->second.sentiment) {
          throw Error(ErrorCode::kConfigError, fmt::format("{}: '{}' has two sentiment sources", file, ind.token_id));
        }
        it->second.sentiment = std::move(ind);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, fmt::format("universe file '{}': {}", file, e.what()));
  }

  if (order.empty()) {
    throw Error(ErrorCode::kEmptyUniverse, fmt::format("universe file '{}' declares no tokens", file));
  }

  std::vector<scoring::TokenInput> inputs;
  for (const std::string& id : order) {
    Draft& d = drafts[id];
    if (!d.volatility) {
      throw Error(ErrorCode::kConfigError, fmt::format("{}: token '{}' has no market data", file, id));
    }
    inputs.push_back({id, d.role.value_or(ChainRole::standalone()), std::move(*d.volatility), std::move(d.holders),
                      std::move(d.sentiment)});
  }
  return inputs;
}

scoring::FragilityReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kMissingReport, fmt::format("cannot open report '{}'", path.string()));
  }
  try {
    return report::from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, fmt::format("report '{}': {}", path.string(), e.what()));
  }
}

}  // namespace me2f::cli
