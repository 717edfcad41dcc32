#include <random>

#include "doctest.h"

#include "checks.hpp"
#include "me2f/ingest/csv.hpp"
#include "me2f/sentiment.hpp"
#include "testkit.hpp"

using namespace me2f;
using namespace me2f::sentiment;
using doctest::Approx;

namespace {

std::map<std::string, FgiIndicators> published_rows() {
  std::map<std::string, FgiIndicators> out;
  for (auto& row : ingest::load_fgi_summary_csv(testkit::fixture_dir() / "fgi_summary.csv")) out[row.token_id] = row;
  return out;
}

SentimentMaxima published_maxima(const std::map<std::string, FgiIndicators>& rows) {
  std::vector<FgiIndicators> v;
  for (auto& [id, r] : rows) v.push_back(r);
  return universe_maxima(v);
}

}  // namespace

TEST_CASE("band classification") {
  CHECK(classify_fgi(10) == FgiBand::kExtremeFear);
  CHECK(classify_fgi(50) == FgiBand::kNeutral);
  CHECK(classify_fgi(80) == FgiBand::kExtremeGreed);
  CHECK(classify_fgi(0) == FgiBand::kExtremeFear);
  CHECK(classify_fgi(19.99) == FgiBand::kExtremeFear);
  CHECK(classify_fgi(20) == FgiBand::kFear);
  CHECK(classify_fgi(40) == FgiBand::kNeutral);
  CHECK(classify_fgi(59.5) == FgiBand::kNeutral);
  CHECK(classify_fgi(60) == FgiBand::kGreed);
  CHECK(classify_fgi(79.5) == FgiBand::kGreed);
  CHECK(classify_fgi(100) == FgiBand::kExtremeGreed);
  CHECK_CODE(classify_fgi(-0.5), ErrorCode::kFgiOutOfRange);
  CHECK_CODE(classify_fgi(100.5), ErrorCode::kFgiOutOfRange);
  CHECK(to_string(FgiBand::kExtremeGreed) == "ExtremeGreed");
}

TEST_CASE("indicators of small series") {
  SentimentSeries flat{"X", {}};
  for (int i = 0; i < 5; ++i) flat.points.push_back({Date(2024, 1, 1).plus_days(i), 50, 0.0});
  auto f = fgi_indicators(flat);
  CHECK(f.f_bar == 50);
  CHECK(f.r_f == 0);
  CHECK(f.q_g == 0);
  CHECK(f.q_f == 0);
  CHECK(f.delta_f_max == 0);

  SentimentSeries three{"Y",
                        {{Date(2024, 1, 1), 10, std::nullopt}, {Date(2024, 1, 2), 85, 0.12}, {Date(2024, 1, 3), 40, 0.05}}};
  auto t = fgi_indicators(three);
  CHECK(t.f_bar == Approx(45));
  CHECK(t.f_max == 85);
  CHECK(t.f_min == 10);
  CHECK(t.r_f == 75);
  CHECK(t.q_g == Approx(1.0 / 3));
  CHECK(t.q_f == Approx(1.0 / 3));
  CHECK(t.delta_f_max == 75);
  CHECK(t.delta_p_max == 0.12);
  REQUIRE(t.window);
  CHECK(t.window->last == Date(2024, 1, 3));

  CHECK_CODE(fgi_indicators(SentimentSeries{"Z", {{Date(2024, 1, 1), 10, {}}}}), ErrorCode::kInsufficientHistory);
}

TEST_CASE("random series agree with the brute-force pass") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    auto s = testkit::random_sentiment(rng, "R", testkit::uniform_int(rng, 2, 200));
    auto got = fgi_indicators(s);
    auto want = testkit::oracle_fgi(s);
    CHECK(got.f_bar == Approx(want.f_bar).epsilon(1e-12));
    CHECK(got.f_max == want.f_max);
    CHECK(got.f_min == want.f_min);
    CHECK(got.r_f == want.r_f);
    CHECK(got.q_g == want.q_g);
    CHECK(got.q_f == want.q_f);
    CHECK(got.delta_f_max == want.delta_f_max);
    CHECK(got.delta_p_max == want.delta_p_max);
    CHECK(got.f_min <= got.f_bar);
    CHECK(got.f_bar <= got.f_max);
    CHECK(got.q_g + got.q_f <= 1);
  }
}

TEST_CASE("instability and shock indices over the published table") {
  auto rows = published_rows();
  auto m = published_maxima(rows);
  CHECK(m.r_f == Approx(87.0));
  CHECK(m.delta_f_max == Approx(55.5));
  CHECK(m.delta_p_max == Approx(0.224));
  CHECK(m.degenerate_components().empty());

  CHECK(instability_index(rows.at("TRUMP"), m) == Approx(0.7008).epsilon(1e-3));
  CHECK(instability_index(rows.at("DOGE"), m) == Approx(0.6489).epsilon(2e-3));
  CHECK(shock_index(rows.at("TRUMP"), m) == Approx(0.9099).epsilon(1e-3));
  CHECK(shock_index(rows.at("DOGE"), m) == Approx(0.3408).epsilon(1e-3));

  const double trump = sas(instability_index(rows.at("TRUMP"), m), shock_index(rows.at("TRUMP"), m), 1.5);
  const double doge = sas(instability_index(rows.at("DOGE"), m), shock_index(rows.at("DOGE"), m), 1.5);
  CHECK(std::abs(trump - 0.608) <= 0.002);
  CHECK(std::abs(doge - 0.129) <= 0.002);
}

TEST_CASE("a token holding every maximum scores one") {
  FgiIndicators top{"T", 90, 100, 0, 100, 0.5, 0.5, 60, 0.3, {}};
  FgiIndicators low{"L", 55, 70, 30, 40, 0.1, 0.1, 10, 0.05, {}};
  std::vector<FgiIndicators> v{top, low};
  auto m = universe_maxima(v);
  CHECK(instability_index(top, m) == 1.0);
  CHECK(shock_index(top, m) == 1.0);
}

TEST_CASE("zero maxima zero their components") {
  FgiIndicators flat{"F", 50, 50, 50, 0, 0, 0, 0, 0, {}};
  std::vector<FgiIndicators> v{flat};
  auto m = universe_maxima(v);
  CHECK(m.degenerate_components().size() == 5);
  CHECK(instability_index(flat, m) == 0);
  CHECK(shock_index(flat, m) == 0);
}

TEST_CASE("amplification score properties") {
  CHECK(sas(0.7, 0, 1.5) == 0);
  std::mt19937_64 rng(23);
  for (int i = 0; i < 500; ++i) {
    const double u = testkit::uniform(rng, 0, 1);
    const double k = testkit::uniform(rng, 0, 1);
    const double s = sas(u, k, 1.5);
    CHECK(s <= u);
    CHECK(s <= std::pow(k, 1.5) + 1e-15);
    CHECK(s <= u * k + 1e-15);
    CHECK(sas(std::min(1.0, u + 0.01), k, 1.5) >= s);
    CHECK(sas(u, std::min(1.0, k + 0.01), 1.5) >= s);
  }
}

TEST_CASE("adding a dominated token leaves the indices unchanged") {
  auto rows = published_rows();
  auto m = published_maxima(rows);
  auto extended = rows;
  extended["NEW"] = FgiIndicators{"NEW", 51, 60, 40, 20, 0.001, 0.001, 10, 0.01, {}};
  auto m2 = published_maxima(extended);
  for (auto& [id, r] : rows) {
    CHECK(instability_index(r, m2) == instability_index(r, m));
    CHECK(shock_index(r, m2) == shock_index(r, m));
  }
}
