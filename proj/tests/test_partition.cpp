#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lipgrad/partition.hpp"

using namespace lipgrad;

namespace {

TernaryFraction tf(unsigned long long num, unsigned exp) { return TernaryFraction::make(num, exp); }
const TernaryFraction Z = TernaryFraction::zero();
const TernaryFraction O = TernaryFraction::one();

Problem unit_problem(std::size_t n) {
  return Problem(std::vector<double>(n, 0.0), std::vector<double>(n, 1.0), [](std::span<const double> x) {
    Evaluation e{0.0, std::vector<double>(x.size())};
    for (std::size_t j = 0; j < x.size(); ++j) {
      e.value += std::sin(3.0 * x[j] + static_cast<double>(j));
      e.gradient[j] = 3.0 * std::cos(3.0 * x[j] + static_cast<double>(j));
    }
    return e;
  });
}

struct Fixture {
  explicit Fixture(std::size_t n) : problem(unit_problem(n)), db(problem.lower(), problem.upper()), set(db) {
    const auto a = acquire_one(db, VertexKey(n, Z), problem, counter);
    const auto b = acquire_one(db, VertexKey(n, O), problem, counter);
    set.add_root(a.index, b.index);
  }

  std::array<IntervalId, 3> split(IntervalId t) {
    const auto [u, v] = generate_uv(set[t].a_key, set[t].b_key, problem.lower(), problem.upper());
    const auto got = acquire_trials(db, u, v, problem, counter);
    return set.subdivide(t, got.u_record, got.v_record);
  }

  Problem problem;
  TrialCounter counter;
  VertexDB db;
  PartitionSet set;
};

TrialRecord rec(Point x, double f, std::vector<double> g) { return TrialRecord{std::move(x), f, std::move(g)}; }

}  // namespace

TEST(DiagonalQuantities, LinearSum) {
  for (std::size_t n : {1u, 2u, 5u}) {
    const auto q = diagonal_quantities(rec(Point(n, 0.0), 0.0, std::vector<double>(n, 1.0)),
                                       rec(Point(n, 1.0), double(n), std::vector<double>(n, 1.0)));
    EXPECT_NEAR(q.delta, std::sqrt(double(n)), 1e-15);
    EXPECT_NEAR(q.dir_deriv_a, std::sqrt(double(n)), 1e-14);
    EXPECT_NEAR(q.dir_deriv_b, std::sqrt(double(n)), 1e-14);
  }
}

TEST(DiagonalQuantities, ConstantAndQuadratic) {
  const auto c = diagonal_quantities(rec({0, 0}, 3, {0, 0}), rec({1, 1}, 3, {0, 0}));
  EXPECT_EQ(c.dir_deriv_a, 0.0);
  EXPECT_EQ(c.dir_deriv_b, 0.0);
  const auto q = diagonal_quantities(rec({0}, 0, {0}), rec({1}, 1, {2}));
  EXPECT_EQ(q.delta, 1.0);
  EXPECT_EQ(q.dir_deriv_a, 0.0);
  EXPECT_EQ(q.dir_deriv_b, 2.0);
}

TEST(DiagonalQuantities, DegenerateThrows) {
  EXPECT_THROW(diagonal_quantities(rec({0.5}, 0, {0}), rec({0.5}, 0, {0})), ContractError);
}

TEST(LongestSide, TieGoesToFirst) {
  const std::vector<double> lo{0, 0}, hi{1, 1};
  EXPECT_EQ(longest_side_index({Z, Z}, {O, O}, lo, hi), 0u);
}

TEST(LongestSide, UniqueMaximum) {
  const std::vector<double> lo{0, 0, 0}, hi{1, 3, 2};
  EXPECT_EQ(longest_side_index({Z, Z, Z}, {O, O, O}, lo, hi), 1u);
}

TEST(LongestSide, ReversedOrientation) {
  const std::vector<double> lo{0, 0, 0}, hi{2, 2, 1};
  EXPECT_EQ(longest_side_index({O, Z, Z}, {Z, O, O}, lo, hi), 0u);
}

TEST(GenerateUV, Square) {
  const std::vector<double> lo{0, 0}, hi{1, 1};
  const auto [u, v] = generate_uv({Z, Z}, {O, O}, lo, hi);
  EXPECT_EQ(u, (VertexKey{tf(2, 1), Z}));
  EXPECT_EQ(v, (VertexKey{tf(1, 1), O}));
  // second level on the middle child: longest side is now the second
  const auto [u2, v2] = generate_uv(u, v, lo, hi);
  EXPECT_EQ(u2, (VertexKey{tf(2, 1), tf(2, 1)}));
  EXPECT_EQ(v2, (VertexKey{tf(1, 1), tf(1, 1)}));
}

TEST(GenerateUV, OneDimension) {
  const std::vector<double> lo{0}, hi{1};
  const auto [u, v] = generate_uv({Z}, {O}, lo, hi);
  EXPECT_EQ(u, (VertexKey{tf(2, 1)}));
  EXPECT_EQ(v, (VertexKey{tf(1, 1)}));
}

TEST(Subdivide, OneDimension) {
  Fixture f(1);
  const auto ids = f.split(0);
  EXPECT_EQ(ids, (std::array<IntervalId, 3>{0, 1, 2}));
  EXPECT_EQ(f.set[1].a_key, (VertexKey{Z}));
  EXPECT_EQ(f.set[1].b_key, (VertexKey{tf(1, 1)}));
  EXPECT_EQ(f.set[0].a_key, (VertexKey{tf(2, 1)}));
  EXPECT_EQ(f.set[0].b_key, (VertexKey{tf(1, 1)}));
  EXPECT_EQ(f.set[2].a_key, (VertexKey{tf(2, 1)}));
  EXPECT_EQ(f.set[2].b_key, (VertexKey{O}));
}

TEST(Subdivide, Square) {
  Fixture f(2);
  f.split(0);
  ASSERT_EQ(f.set.size(), 3u);
  EXPECT_EQ(f.set[1].a_key, (VertexKey{Z, Z}));
  EXPECT_EQ(f.set[1].b_key, (VertexKey{tf(1, 1), O}));
  EXPECT_EQ(f.set[0].a_key, (VertexKey{tf(2, 1), Z}));
  EXPECT_EQ(f.set[0].b_key, (VertexKey{tf(1, 1), O}));
  EXPECT_EQ(f.set[2].a_key, (VertexKey{tf(2, 1), Z}));
  EXPECT_EQ(f.set[2].b_key, (VertexKey{O, O}));
  const auto report = verify_tiling(f.set);
  EXPECT_TRUE(report.ok());
}

TEST(Subdivide, CachedFieldsMatchRecords) {
  Fixture f(3);
  for (int i = 0; i < 20; ++i) f.split(static_cast<IntervalId>(i % f.set.size()));
  for (const auto& h : f.set.intervals()) {
    const auto q = diagonal_quantities(f.db.record(h.a_record), f.db.record(h.b_record));
    EXPECT_EQ(h.delta, q.delta);
    EXPECT_EQ(h.dir_deriv_a, q.dir_deriv_a);
    EXPECT_EQ(h.dir_deriv_b, q.dir_deriv_b);
    EXPECT_GE(h.w, 0.0);
    EXPECT_EQ(h.a_key, f.db.key(h.a_record));
  }
}

TEST(Subdivide, UnknownInterval) {
  Fixture f(2);
  EXPECT_THROW(f.set.subdivide(5, 0, 1), UnknownIntervalError);
  EXPECT_THROW(f.set.at(1), UnknownIntervalError);
}

TEST(Subdivide, ChildrenOnlyUseParentPoints) {
  Fixture f(2);
  const Hyperinterval parent = f.set[0];
  const auto [u, v] = generate_uv(parent.a_key, parent.b_key, f.problem.lower(), f.problem.upper());
  f.split(0);
  for (IntervalId id : {0u, 1u, 2u}) {
    for (const VertexKey* k : {&f.set[id].a_key, &f.set[id].b_key}) {
      EXPECT_TRUE(*k == parent.a_key || *k == parent.b_key || *k == u || *k == v);
    }
  }
}

TEST(AcquireTrials, CountsOnlyMissingPoints) {
  const Problem p = unit_problem(2);
  VertexDB db(p.lower(), p.upper());
  TrialCounter counter;
  const VertexKey u{tf(2, 1), Z}, v{tf(1, 1), O};
  EXPECT_EQ(acquire_trials(db, u, v, p, counter).new_trials, 2);
  EXPECT_EQ(db.record(0).point, to_real(u, p.lower(), p.upper()));  // u first
  EXPECT_EQ(counter.count(), 2u);
  EXPECT_EQ(acquire_trials(db, u, v, p, counter).new_trials, 0);
  EXPECT_EQ(counter.count(), 2u);
  const VertexKey w{tf(1, 1), tf(1, 1)};
  EXPECT_EQ(acquire_trials(db, u, w, p, counter).new_trials, 1);
  EXPECT_EQ(counter.count(), 3u);
  EXPECT_EQ(db.reuse_hits(), 3u);
}

TEST(AcquireTrials, HookFiresPerInsertion) {
  const Problem p = unit_problem(1);
  VertexDB db(p.lower(), p.upper());
  TrialCounter counter;
  std::vector<std::size_t> seen;
  acquire_trials(db, {tf(2, 1)}, {tf(1, 1)}, p, counter, [&](std::size_t i) { seen.push_back(i); });
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 1}));
}

TEST(Partition, RandomSubdivisionsKeepInvariants) {
  for (std::size_t n : {1u, 2u, 3u}) {
    Fixture f(n);
    std::mt19937_64 rng(11 + n);
    for (int k = 1; k <= 1500; ++k) {
      ASSERT_EQ(f.set.size(), static_cast<std::size_t>(2 * k - 1));
      std::uniform_int_distribution<std::size_t> pick(0, f.set.size() - 1);
      const IntervalId t = pick(rng);
      const double parent = f.set[t].delta;
      const auto ids = f.split(t);
      for (IntervalId id : ids) ASSERT_LT(f.set[id].delta, parent);
      ASSERT_LE(f.counter.count(), static_cast<std::uint64_t>(2 * k + 2));
    }
    EXPECT_TRUE(verify_tiling(f.set).ok()) << n;
    EXPECT_LE(max_vertex_sharing(f.set), std::size_t{1} << n);
    EXPECT_EQ(f.db.size(), f.counter.count());
  }
}

TEST(Partition, TilingDetectsGaps) {
  Fixture f(2);
  f.split(0);
  // the middle third alone covers a third of the box
  PartitionSet single(f.db);
  single.add_root(2, 3);
  const auto r = verify_tiling(single);
  EXPECT_FALSE(r.volume_exact);
  EXPECT_TRUE(r.disjoint);
  EXPECT_FALSE(r.ok());
}

TEST(Partition, DumpFormat) {
  Fixture f(1);
  std::ostringstream out;
  f.set.dump(out);
  const std::string line = out.str();
  EXPECT_EQ(line.rfind("0, (0/3^0), (1/3^0), ", 0), 0u);
  EXPECT_EQ(std::count(line.begin(), line.end(), '\n'), 1);
}
