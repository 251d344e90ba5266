#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "actgate/dispersion.hpp"
#include "actgate/errors.hpp"
#include "oracles.hpp"
#include "test_rng.hpp"

using namespace actgate;

namespace {

DispersionAccumulator<double> accumulate(const std::vector<double>& xs) {
  DispersionAccumulator<double> acc;
  for (double x : xs) acc.update(x);
  return acc;
}

}  // namespace

TEST_CASE("welford example streams") {
  const auto acc = accumulate({1, 2, 3});
  CHECK(acc.mean() == doctest::Approx(2.0));
  CHECK(acc.variance() == doctest::Approx(1.0));  // M2 = 2 over n-1 = 2
  CHECK(acc.mssd() == doctest::Approx(2.0 / 3.0));

  const auto flat = accumulate({4.2, 4.2, 4.2, 4.2});
  CHECK(flat.variance() == 0.0);
  CHECK(flat.mssd() == 0.0);

  const auto pair = accumulate({1, 2});
  CHECK(pair.mssd() == doctest::Approx(0.5));  // ssd 1 over n 2

  const auto alt = accumulate({0, 1, 0, 1});
  CHECK(alt.mssd() == doctest::Approx(3.0 / 4.0));
}

TEST_CASE("statistics are undefined below two samples") {
  DispersionAccumulator<double> acc;
  acc.update(5.0);
  CHECK_THROWS_AS(acc.variance(), InsufficientDataError);
  CHECK_THROWS_AS(acc.mssd(), InsufficientDataError);
}

TEST_CASE("welford matches two-pass variance on random streams") {
  TestRng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + int(rng.index(5000));
    std::vector<double> xs;
    const double scale = rng.uniform(0.01, 100.0);
    const double offset = rng.uniform(-50.0, 50.0);
    for (int i = 0; i < n; ++i) xs.push_back(offset + scale * rng.gauss());
    const auto acc = accumulate(xs);
    const double ref_var = oracle::two_pass_variance(xs);
    const double ref_mssd = oracle::batch_mssd(xs);
    CHECK(acc.variance() == doctest::Approx(ref_var).epsilon(1e-9));
    CHECK(std::abs(acc.mssd() - ref_mssd) < 1e-12 * std::max(1.0, ref_mssd));
  }
}

TEST_CASE("single informative feature ranks first") {
  std::array<DispersionAccumulator<double>, kFeatureCount> accs;
  // feature 4: slow large wave (high variance, small successive steps);
  // everything else flat at small constants
  for (int i = 0; i < 200; ++i) {
    for (int f = 0; f < kFeatureCount; ++f) {
      const double x = f == 4 ? 10.0 * std::sin(0.05 * i) : 0.25;
      accs[std::size_t(f)].update(x);
    }
  }
  const auto order = rank_features(accs);
  CHECK(order[0] == 4);
}

TEST_CASE("identical features rank by index") {
  std::array<DispersionAccumulator<double>, kFeatureCount> accs;
  for (int i = 0; i < 50; ++i)
    for (auto& a : accs) a.update(std::sin(0.3 * i));
  const auto order = rank_features(accs);
  for (int f = 0; f < kFeatureCount; ++f) CHECK(order[std::size_t(f)] == f);
}

TEST_CASE("slow sinusoid outranks white noise, per the batch oracle") {
  TestRng rng(7);
  std::vector<double> wave, noise;
  for (int i = 0; i < 500; ++i) {
    wave.push_back(5.0 * std::sin(0.04 * i));
    noise.push_back(0.2 * rng.gauss());
  }
  // oracle scores straight from the batch formulas
  auto batch_score = [](const std::vector<double>& xs) {
    const double rms2 = oracle::batch_rms2(xs);
    return (oracle::two_pass_variance(xs) / rms2) / (oracle::batch_mssd(xs) / rms2 + 1e-12);
  };
  REQUIRE(batch_score(wave) > batch_score(noise));

  std::array<DispersionAccumulator<double>, kFeatureCount> accs;
  for (std::size_t i = 0; i < wave.size(); ++i) {
    accs[0].update(wave[i]);
    accs[1].update(noise[i]);
    for (int f = 2; f < kFeatureCount; ++f) accs[std::size_t(f)].update(0.0);
  }
  const auto order = rank_features(accs);
  CHECK(order[0] == 0);
  CHECK(order[1] == 1);
}

TEST_CASE("identically zero features are never selected") {
  std::array<DispersionAccumulator<double>, kFeatureCount> accs;
  for (int i = 0; i < 100; ++i) {
    accs[0].update(0.0);  // rms 0
    for (int f = 1; f < kFeatureCount; ++f) accs[std::size_t(f)].update(std::sin(0.2 * i + f));
  }
  const auto order = rank_features(accs);
  CHECK(order[kFeatureCount - 1] == 0);
  CHECK(score_feature(accs[0], 0).score == -std::numeric_limits<double>::infinity());
}

TEST_CASE("ranking is invariant to positive rescaling of a feature") {
  TestRng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    std::array<DispersionAccumulator<double>, kFeatureCount> base, scaled;
    std::array<double, kFeatureCount> k;
    for (auto& kk : k) kk = rng.uniform(0.001, 1000.0);
    for (int i = 0; i < 300; ++i) {
      for (int f = 0; f < kFeatureCount; ++f) {
        const double x = std::sin(0.01 * (f + 1) * i) + 0.3 * rng.gauss() + 0.1 * f;
        // same draw feeds both accumulator sets
        base[std::size_t(f)].update(x);
        scaled[std::size_t(f)].update(k[std::size_t(f)] * x);
      }
    }
    CHECK(rank_features(base) == rank_features(scaled));
  }
}

TEST_CASE("scores scale out the unit: variance and mssd normalize by rms2") {
  const auto acc = accumulate({1, 3, 2, 5, 4, 6});
  const auto s = score_feature(acc, 3);
  CHECK(s.feature == 3);
  CHECK(s.normalized_variance ==
        doctest::Approx(acc.variance() / acc.rms_squared()));
  CHECK(s.normalized_mssd == doctest::Approx(acc.mssd() / acc.rms_squared()));
  CHECK(std::isfinite(s.score));
}
