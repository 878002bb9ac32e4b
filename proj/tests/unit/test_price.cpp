#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "gridstudy/price/features.hpp"
#include "gridstudy/price/predictor.hpp"

using namespace gridstudy;
using namespace gridstudy::price;

namespace {

const HourStamp kMonday = parse_timestamp("2021-01-04T00:00");

SystemSnapshot snapshot(HourStamp t, double demand, double coal_qld, double wind_sa, double line) {
  SystemSnapshot s;
  s.time = t;
  s.demand_forecast_mw = demand;
  s.fleet = std::vector<UnitCapacity>{{GenType::BlackCoal, Region::QLD, coal_qld},
                                      {GenType::Wind, Region::SA, wind_sa},
                                      {GenType::GasTurbine, Region::NSW, 4500.0}};
  s.lines = std::vector<LineLimit>{{"QLD-NSW", line, -line}};
  return s;
}

// Deterministic training fixture: price depends on demand, hour and wind.
TrainingSet fixture_set(std::size_t n) {
  TrainingSet set;
  set.line_names = {"QLD-NSW"};
  for (std::size_t i = 0; i < n; ++i) {
    const double demand = 6000.0 + 1500.0 * std::sin(0.37 * static_cast<double>(i));
    const double wind = 800.0 + 600.0 * std::cos(0.11 * static_cast<double>(i));
    const double line = 700.0 + 50.0 * static_cast<double>(i % 5);
    const auto t = kMonday + std::chrono::hours(i);
    const auto f = extract_features(snapshot(t, demand, 3000.0, wind, line));
    const double price = 20.0 + 0.006 * demand - 0.01 * wind + 0.3 * hour_of_day(t) +
                         2.0 * std::sin(0.5 * static_cast<double>(i));
    set.samples.push_back({f, price, i % 3 == 0 ? Provenance::Simulated : Provenance::Historical});
  }
  return set;
}

std::vector<FeatureVector> fixture_queries() {
  std::vector<FeatureVector> out;
  for (int h = 0; h < 24; ++h) {
    const auto t = kMonday + std::chrono::hours(24 * 7 + h);
    out.push_back(extract_features(snapshot(t, 5500.0 + 90.0 * h, 3000.0, 1000.0 - 20.0 * h, 800.0)));
  }
  return out;
}

// Ridge fit written from the documented formula: z-score each non-constant
// column, centre the target, solve (Z'Z + lambda I) w = Z'(y - mean(y)).
struct ReferenceRidge {
  std::vector<std::size_t> used;
  std::vector<double> mu, sd, w;
  double intercept = 0.0;

  explicit ReferenceRidge(const TrainingSet& set) {
    const std::size_t n = set.samples.size();
    const std::size_t cols = set.samples[0].features.to_row().size();
    std::vector<std::vector<double>> x;
    for (const auto& s : set.samples) x.push_back(s.features.to_row());
    for (std::size_t c = 0; c < cols; ++c) {
      double m = 0.0;
      for (const auto& r : x) m += r[c];
      m /= static_cast<double>(n);
      double v = 0.0;
      for (const auto& r : x) v += (r[c] - m) * (r[c] - m);
      v = std::sqrt(v / static_cast<double>(n));
      if (v > 1e-12 * (1.0 + std::abs(m))) {
        used.push_back(c);
        mu.push_back(m);
        sd.push_back(v);
      }
    }
    for (const auto& s : set.samples) intercept += s.price;
    intercept /= static_cast<double>(n);
    const std::size_t k = used.size();
    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> z(k);
      for (std::size_t j = 0; j < k; ++j) z[j] = (x[i][used[j]] - mu[j]) / sd[j];
      for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = 0; q < k; ++q) a[p][q] += z[p] * z[q];
        a[p][k] += z[p] * (set.samples[i].price - intercept);
      }
    }
    for (std::size_t p = 0; p < k; ++p) a[p][p] += kRidgeLambda;
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < k; ++r) {
        if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
      }
      std::swap(a[c], a[piv]);
      for (std::size_t r = 0; r < k; ++r) {
        if (r == c) continue;
        const double f = a[r][c] / a[c][c];
        for (std::size_t q = c; q <= k; ++q) a[r][q] -= f * a[c][q];
      }
    }
    for (std::size_t p = 0; p < k; ++p) w.push_back(a[p][k] / a[p][p]);
  }

  double operator()(const FeatureVector& f) const {
    const auto row = f.to_row();
    double y = intercept;
    for (std::size_t j = 0; j < used.size(); ++j) y += w[j] * (row[used[j]] - mu[j]) / sd[j];
    return y;
  }
};

// Frozen predictions of the ridge model on the training fixture.
constexpr std::array<double, 24> kGolden = {
    42.874928362992264, 43.939144492082093, 45.003360621171915,
    46.067576750261736, 47.131792879351572, 48.196009008441386,
    49.260225137531222, 50.324441266621044, 51.388657395710872,
    52.452873524800694, 53.517089653890523, 54.581305782980344,
    55.645521912070173, 56.709738041160008, 57.773954170249823,
    58.838170299339652, 59.90238642842948, 60.966602557519302,
    62.03081868660913, 63.095034815698959, 64.159250944788781,
    65.223467073878609, 66.287683202968438, 67.351899332058267,
};

double rmse(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace

TEST_CASE("calendar features") {
  const auto f = extract_features(snapshot(kMonday, 5000.0, 500.0, 0.0, 100.0));
  CHECK(f.hour == 0);
  CHECK(f.day_of_week == 0);
  const auto g = extract_features(snapshot(kMonday + std::chrono::hours(24 * 6 + 23), 5000.0, 500.0, 0.0, 100.0));
  CHECK(g.hour == 23);
  CHECK(g.day_of_week == 6);
}

TEST_CASE("capacity features copy the fleet") {
  SystemSnapshot s;
  s.time = kMonday;
  s.demand_forecast_mw = 1000.0;
  s.fleet = std::vector<UnitCapacity>{{GenType::BlackCoal, Region::QLD, 500.0}};
  s.lines = std::vector<LineLimit>{};
  const auto f = extract_features(s);
  CHECK(f.capacity(GenType::BlackCoal, Region::QLD) == 500.0);
  double total = 0.0;
  for (double v : f.capacity_mw) total += v;
  CHECK(total == 500.0);
}

TEST_CASE("hand-computed feature row") {
  auto s = snapshot(kMonday + std::chrono::hours(24 + 7), 6123.5, 2800.0, 350.0, 600.0);
  s.fleet->push_back({GenType::BlackCoal, Region::QLD, 200.0});
  const auto row = extract_features(s).to_row();
  const auto names = FeatureVector::column_names({"QLD-NSW"});
  REQUIRE(row.size() == names.size());
  REQUIRE(row.size() == 3 + 1 + kGenTypeCount * kRegionCount);
  std::vector<double> expected(row.size(), 0.0);
  expected[0] = 6123.5;
  expected[1] = 7.0;
  expected[2] = 1.0;
  expected[3] = 1200.0;
  auto cap_index = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
  };
  expected[cap_index("cap:" + std::string(to_string(GenType::BlackCoal)) + ":QLD")] = 3000.0;
  expected[cap_index("cap:" + std::string(to_string(GenType::Wind)) + ":SA")] = 350.0;
  expected[cap_index("cap:" + std::string(to_string(GenType::GasTurbine)) + ":NSW")] = 4500.0;
  CHECK(row == expected);
}

TEST_CASE("missing snapshot fields are reported") {
  auto s = snapshot(kMonday, 1.0, 1.0, 1.0, 1.0);
  s.lines.reset();
  CHECK_THROWS_AS(extract_features(s), MissingField);
  s = snapshot(kMonday, 1.0, 1.0, 1.0, 1.0);
  s.demand_forecast_mw.reset();
  CHECK_THROWS_AS(extract_features(s), MissingField);
  s = snapshot(kMonday, 1.0, 1.0, 1.0, 1.0);
  s.time.reset();
  CHECK_THROWS_AS(extract_features(s), MissingField);
  s = snapshot(kMonday, 1.0, 1.0, 1.0, 1.0);
  s.fleet.reset();
  CHECK_THROWS_AS(extract_features(s), MissingField);
}

TEST_CASE("constant targets give a flat ridge prediction") {
  auto set = fixture_set(100);
  for (auto& s : set.samples) s.price = 42.0;
  const auto m = train(set, PredictorKind::Ridge, 1);
  const auto day = predict_day(m, fixture_queries());
  REQUIRE(day.size() == 24);
  for (double p : day) CHECK(std::abs(p - 42.0) <= 1e-6);
}

TEST_CASE("single exemplar nearest neighbour predicts its price everywhere") {
  auto set = fixture_set(1);
  set.samples[0].price = 17.25;
  const auto m = train(set, PredictorKind::NearestNeighbor, 1);
  for (const auto& f : fixture_queries()) CHECK(predict(m, f) == 17.25);
}

TEST_CASE("ridge recovers an exact linear slope") {
  TrainingSet set;
  set.line_names = {"QLD-NSW"};
  for (int i = 0; i < 200; ++i) {
    const double demand = 4000.0 + 10.0 * i;
    const auto f = extract_features(snapshot(kMonday, demand, 3000.0, 500.0, 700.0));
    set.samples.push_back({f, 5.0 + 0.0125 * demand, Provenance::Historical});
  }
  const auto m = train(set, PredictorKind::Ridge, 1);
  CHECK(std::abs(m.raw_slope("demand_mw") - 0.0125) <= 1e-3 * 0.0125);
  CHECK(m.raw_slope("hour") == 0.0);
  const auto dropped = m.dropped_columns();
  CHECK(std::find(dropped.begin(), dropped.end(), "hour") != dropped.end());
  CHECK(std::find(dropped.begin(), dropped.end(), "demand_mw") == dropped.end());
}

TEST_CASE("nearest neighbour returns the stored price at a training point") {
  const auto set = fixture_set(60);
  const auto m = train(set, PredictorKind::NearestNeighbor, 1);
  for (const auto& s : set.samples) CHECK(predict(m, s.features) == s.price);
}

TEST_CASE("ridge in-sample error beats the best constant") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    auto set = fixture_set(30 + rng() % 100);
    std::normal_distribution<double> noise(0.0, 5.0);
    for (auto& s : set.samples) s.price += noise(rng);
    const auto m = train(set, PredictorKind::Ridge, 1);
    std::vector<double> y, fit, mean;
    double avg = 0.0;
    for (const auto& s : set.samples) avg += s.price;
    avg /= static_cast<double>(set.samples.size());
    for (const auto& s : set.samples) {
      y.push_back(s.price);
      fit.push_back(predict(m, s.features));
      mean.push_back(avg);
    }
    CHECK(rmse(y, fit) <= rmse(y, mean));
  }
}

TEST_CASE("rescaling a raw feature does not change nearest-neighbour matches") {
  const auto set = fixture_set(80);
  auto scaled = set;
  for (auto& s : scaled.samples) s.features.demand_mw *= 1000.0;
  const auto a = train(set, PredictorKind::NearestNeighbor, 1);
  const auto b = train(scaled, PredictorKind::NearestNeighbor, 1);
  for (auto f : fixture_queries()) {
    const double pa = predict(a, f);
    f.demand_mw *= 1000.0;
    CHECK(predict(b, f) == pa);
  }
}

TEST_CASE("ridge agrees with an independent normal-equation solve") {
  const auto set = fixture_set(150);
  const auto m = train(set, PredictorKind::Ridge, 1);
  const ReferenceRidge ref(set);
  CHECK(ref.used == m.used);
  for (const auto& f : fixture_queries()) {
    const double p = predict(m, f);
    CHECK(std::abs(p - ref(f)) <= 1e-9 * std::max(1.0, std::abs(p)));
  }
}

TEST_CASE("golden ridge series") {
  const auto set = fixture_set(150);
  const auto m = train(set, PredictorKind::Ridge, 1);
  const auto day = predict_day(m, fixture_queries());
  for (std::size_t h = 0; h < 24; ++h) {
    CHECK(std::abs(day[h] - kGolden[h]) <= 1e-9 * std::max(1.0, std::abs(kGolden[h])));
  }
}

TEST_CASE("training is deterministic and serialization round-trips") {
  const auto set = fixture_set(120);
  for (auto kind : {PredictorKind::Ridge, PredictorKind::NearestNeighbor}) {
    const auto a = train(set, kind, 7, 50);
    const auto b = train(set, kind, 7, 50);
    std::ostringstream sa, sb;
    write_predictor(a, sa);
    write_predictor(b, sb);
    CHECK(sa.str() == sb.str());
    std::istringstream in(sa.str());
    const auto c = read_predictor(in);
    std::ostringstream sc;
    write_predictor(c, sc);
    CHECK(sc.str() == sa.str());
    for (const auto& f : fixture_queries()) CHECK(predict(c, f) == predict(a, f));
  }
}

TEST_CASE("exemplar subsampling depends only on the seed") {
  const auto set = fixture_set(120);
  const auto a = train(set, PredictorKind::NearestNeighbor, 3, 20);
  const auto b = train(set, PredictorKind::NearestNeighbor, 3, 20);
  const auto c = train(set, PredictorKind::NearestNeighbor, 4, 20);
  CHECK(a.targets.size() == 20);
  CHECK(a.targets == b.targets);
  CHECK(a.exemplars == b.exemplars);
  CHECK(a.exemplars != c.exemplars);
}

TEST_CASE("training errors") {
  CHECK_THROWS_AS(train(TrainingSet{}, PredictorKind::NearestNeighbor, 1), TrainingError);
  CHECK_THROWS_AS(train(fixture_set(10), PredictorKind::Ridge, 1), TrainingError);
  auto same = fixture_set(30);
  for (auto& s : same.samples) s.features = same.samples[0].features;
  CHECK_THROWS_AS(train(same, PredictorKind::Ridge, 1), TrainingError);
}

TEST_CASE("prediction rejects a different line layout") {
  const auto m = train(fixture_set(40), PredictorKind::Ridge, 1);
  auto f = fixture_queries()[0];
  f.line_limits_mw.push_back(100.0);
  CHECK_THROWS(predict(m, f));
}
