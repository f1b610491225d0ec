#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lipgrad/direct.hpp"

using namespace lipgrad;
using namespace lipgrad::direct;

namespace {

// Box j qualifies when some K > 0 puts it below every other box on the line
// f - K d, and the largest such K passes the improvement test.
std::vector<std::size_t> brute_force(const std::vector<BoxPoint>& boxes, double eps_bal) {
  double f_min = std::numeric_limits<double>::infinity();
  for (const auto& b : boxes) f_min = std::min(f_min, b.f);
  std::vector<std::pair<double, std::size_t>> picked;
  for (const auto& j : boxes) {
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (const auto& i : boxes) {
      if (i.id == j.id) continue;
      if (i.size < j.size) lo = std::max(lo, (j.f - i.f) / (j.size - i.size));
      else if (i.size > j.size) hi = std::min(hi, (i.f - j.f) / (i.size - j.size));
      else ok &= j.f <= i.f;
    }
    if (!ok || lo > hi || hi <= 0.0) continue;
    if (std::isfinite(hi) && j.f - hi * j.size > f_min - eps_bal * std::abs(f_min)) continue;
    picked.push_back({-j.size, j.id});
  }
  std::sort(picked.begin(), picked.end());
  std::vector<std::size_t> ids;
  for (const auto& p : picked) ids.push_back(p.second);
  return ids;
}

Problem paraboloid(std::size_t n) {
  return Problem(Point(n, -1.0), Point(n, 1.0), [](std::span<const double> x) {
    Evaluation e{0.0, std::vector<double>(x.size())};
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = x[j] - 0.3;
      e.value += d * d;
      e.gradient[j] = 2 * d;
    }
    return e;
  });
}

}  // namespace

TEST(PotentiallyOptimal, SingleBox) {
  const std::vector<BoxPoint> boxes{{1.0, 5.0, 0}};
  EXPECT_EQ(potentially_optimal(boxes, 1e-4), (std::vector<std::size_t>{0}));
  EXPECT_TRUE(potentially_optimal(std::vector<BoxPoint>{}, 1e-4).empty());
}

TEST(PotentiallyOptimal, EqualSizeKeepsBest) {
  const std::vector<BoxPoint> boxes{{1.0, 2.0, 0}, {1.0, 1.0, 1}, {1.0, 3.0, 2}};
  EXPECT_EQ(potentially_optimal(boxes, 0.0), (std::vector<std::size_t>{1}));
}

TEST(PotentiallyOptimal, TiesAtBestSize) {
  const std::vector<BoxPoint> boxes{{1.0, 1.0, 3}, {1.0, 1.0, 1}, {0.5, 2.0, 0}};
  EXPECT_EQ(potentially_optimal(boxes, 0.0, Variant::Standard), (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(potentially_optimal(boxes, 0.0, Variant::LocallyBiased), (std::vector<std::size_t>{1}));
}

TEST(PotentiallyOptimal, ImprovementTestDropsSmallBoxes) {
  // the small best box cannot improve f_min by 10 percent
  const std::vector<BoxPoint> boxes{{0.1, 1.0, 0}, {1.0, 1.05, 1}};
  EXPECT_EQ(potentially_optimal(boxes, 0.0), (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(potentially_optimal(boxes, 0.1), (std::vector<std::size_t>{1}));
}

TEST(PotentiallyOptimal, MatchesBruteForce) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> f(-2.0, 2.0);
  std::uniform_int_distribution<int> level(0, 8);
  for (int round = 0; round < 2000; ++round) {
    std::vector<BoxPoint> boxes;
    const int count = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < count; ++i) boxes.push_back({std::pow(3.0, -level(rng)), f(rng), static_cast<std::size_t>(i)});
    for (double eps : {0.0, 1e-4, 1e-2}) {
      ASSERT_EQ(potentially_optimal(boxes, eps), brute_force(boxes, eps)) << round;
    }
  }
}

TEST(PotentiallyOptimal, LocallyBiasedAtMostOnePerSize) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> f(-2.0, 2.0);
  for (int round = 0; round < 500; ++round) {
    std::vector<BoxPoint> boxes;
    for (int i = 0; i < 40; ++i) boxes.push_back({std::pow(3.0, -static_cast<int>(rng() % 5)), std::round(f(rng)), std::size_t(i)});
    const auto ids = potentially_optimal(boxes, 0.0, Variant::LocallyBiased);
    std::vector<double> sizes;
    for (auto id : ids) sizes.push_back(boxes[id].size);
    std::sort(sizes.begin(), sizes.end());
    EXPECT_EQ(std::adjacent_find(sizes.begin(), sizes.end()), sizes.end());
  }
}

TEST(DirectSearch, FirstIterationTwoDimensions) {
  const Problem p = paraboloid(2);
  DirectSearch s(p, DirectConfig{});
  s.initialize();
  EXPECT_EQ(s.trials(), 1u);
  const IterationStats st = s.iterate();
  EXPECT_EQ(st.selected, 1u);
  EXPECT_EQ(s.trials(), 5u);
  EXPECT_EQ(s.boxes().size(), 5u);
}

TEST(DirectSearch, FirstIterationOneDimension) {
  const Problem p = paraboloid(1);
  DirectSearch s(p, DirectConfig{});
  s.initialize();
  s.iterate();
  ASSERT_EQ(s.trial_log().size(), 3u);
  EXPECT_DOUBLE_EQ(s.trial_log()[0].point[0], 0.0);
  EXPECT_NEAR(s.trial_log()[1].point[0], -1.0 + 2.0 * 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(s.trial_log()[2].point[0], -1.0 + 2.0 / 6.0, 1e-15);
  for (const auto& r : s.trial_log()) EXPECT_TRUE(r.gradient.empty());
}

TEST(DirectSearch, BudgetOfOne) {
  DirectConfig c;
  c.max_trials = 1;
  const DirectResult r = run_direct(paraboloid(2), c);
  EXPECT_EQ(r.trials, 1u);
  EXPECT_EQ(r.stop_reason, StopReason::Budget);
  EXPECT_EQ(r.incumbent_point, (Point{0.0, 0.0}));
}

TEST(DirectSearch, SolvesParaboloid) {
  for (Variant v : {Variant::Standard, Variant::LocallyBiased}) {
    DirectConfig c;
    c.variant = v;
    c.max_trials = 10000;
    const DirectResult r = run_direct(paraboloid(2), c, [](const TrialRecord& t) { return t.value < 1e-4; });
    EXPECT_EQ(r.stop_reason, StopReason::Target) << to_string(v);
    EXPECT_LT(r.incumbent_value, 1e-4);
    EXPECT_LE(r.trials, 10000u);
    EXPECT_EQ(r.trial_log.back().value, r.incumbent_value);
  }
}

TEST(DirectSearch, LocallyBiasedSelectsAtMostDistinctSizes) {
  DirectConfig c;
  c.variant = Variant::LocallyBiased;
  c.max_trials = 3000;
  const DirectResult r = run_direct(builtin_problem("camel", 2), c);
  ASSERT_FALSE(r.history.empty());
  for (const auto& h : r.history) EXPECT_LE(h.selected, h.distinct_sizes);
}

TEST(DirectSearch, BoxesTileTheDomain) {
  DirectConfig c;
  c.max_trials = 2000;
  const Problem p = builtin_problem("camel", 2);
  DirectSearch s(p, c);
  s.initialize();
  while (!s.halted()) s.iterate();
  double volume = 0.0;
  for (const auto& b : s.boxes()) {
    double v = 1.0;
    for (int t : b.side_thirds) v *= std::pow(3.0, -t);
    volume += v;
    for (std::size_t j = 0; j < b.center.size(); ++j) {
      const double half = 0.5 * std::pow(3.0, -b.side_thirds[j]);
      EXPECT_GE(b.center[j] - half, -1e-12);
      EXPECT_LE(b.center[j] + half, 1.0 + 1e-12);
    }
  }
  EXPECT_NEAR(volume, 1.0, 1e-9);
  // a budget stop can land between the samples of one trisection
  EXPECT_LE(s.boxes().size(), s.trials());
  EXPECT_GE(s.boxes().size() + 3, s.trials());
}

TEST(DirectSearch, Deterministic) {
  DirectConfig c;
  c.max_trials = 1500;
  const DirectResult a = run_direct(builtin_problem("camel", 2), c);
  const DirectResult b = run_direct(builtin_problem("camel", 2), c);
  ASSERT_EQ(a.trial_log.size(), b.trial_log.size());
  for (std::size_t i = 0; i < a.trial_log.size(); ++i) EXPECT_EQ(a.trial_log[i].point, b.trial_log[i].point);
}

TEST(DirectConfig, Validation) {
  DirectConfig c;
  c.eps_bal = -1.0;
  EXPECT_THROW(run_direct(paraboloid(1), c), ConfigError);
  c = DirectConfig{};
  c.max_trials = 0;
  EXPECT_THROW(run_direct(paraboloid(1), c), ConfigError);
}
