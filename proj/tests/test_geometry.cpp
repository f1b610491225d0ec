#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <set>
#include <sstream>

#include "lipgrad/geometry.hpp"

using namespace lipgrad;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

TernaryFraction tf(unsigned long long num, unsigned exp) { return TernaryFraction::make(num, exp); }

cpp_rational as_rational(const TernaryFraction& f) {
  cpp_int num = 0;
  uint128 n = f.numerator();
  cpp_int scale = 1;
  while (n > 0) {
    num += scale * static_cast<unsigned>(n % 10);
    n /= 10;
    scale *= 10;
  }
  cpp_int den = 1;
  for (unsigned i = 0; i < f.exponent(); ++i) den *= 3;
  return cpp_rational(num, den);
}

bool canonical(const TernaryFraction& f) {
  if (f.exponent() == 0) return f.numerator() <= 1;
  return f.numerator() % 3 != 0;
}

}  // namespace

TEST(TernaryFraction, Canonicalizes) {
  EXPECT_EQ(tf(3, 1), TernaryFraction::one());
  EXPECT_EQ(tf(0, 5), TernaryFraction::zero());
  EXPECT_EQ(tf(9, 3), tf(1, 1));
  EXPECT_EQ(tf(9, 3).exponent(), 1u);
  EXPECT_EQ(tf(7, 2).str(), "7/3^2");
  EXPECT_THROW(tf(10, 2), ContractError);
}

TEST(TernaryFraction, Ordering) {
  EXPECT_LT(tf(1, 1), tf(2, 1));
  EXPECT_LT(tf(2, 3), tf(1, 1));
  EXPECT_GT(TernaryFraction::one(), tf(26, 3));
  EXPECT_EQ(tf(1, 1) <=> tf(3, 2), std::strong_ordering::equal);
}

TEST(SplitTwoThirds, Examples) {
  EXPECT_EQ(split_two_thirds(TernaryFraction::zero(), TernaryFraction::one()), tf(2, 1));
  EXPECT_EQ(split_two_thirds(TernaryFraction::one(), TernaryFraction::zero()), tf(1, 1));
  EXPECT_EQ(split_two_thirds(tf(1, 1), TernaryFraction::one()), tf(7, 2));
}

TEST(SplitTwoThirds, EqualEndsAreAContractViolation) {
  EXPECT_THROW(split_two_thirds(tf(1, 1), tf(1, 1)), ContractError);
}

TEST(SplitTwoThirds, DepthCap) {
  EXPECT_THROW(split_two_thirds(tf(1, 3), tf(2, 3), 3), DepthOverflowError);
  EXPECT_NO_THROW(split_two_thirds(tf(1, 3), tf(2, 3), 4));
  // walk one side down to the default cap
  TernaryFraction a = TernaryFraction::zero(), b = TernaryFraction::one();
  for (unsigned d = 1; d <= kDefaultDepthCap; ++d) {
    b = split_two_thirds(b, a);
    ASSERT_EQ(b.exponent(), d);
  }
  EXPECT_THROW(split_two_thirds(b, a), DepthOverflowError);
}

TEST(SplitTwoThirds, DepthSixClosureAgainstRationalOracle) {
  // Every diagonal produced by six levels of 1-D subdivision, both orientations.
  struct Side {
    TernaryFraction a, b;
  };
  std::vector<Side> level{{TernaryFraction::zero(), TernaryFraction::one()},
                          {TernaryFraction::one(), TernaryFraction::zero()}};
  std::size_t checked = 0;
  for (int depth = 1; depth <= 6; ++depth) {
    std::vector<Side> next;
    for (const auto& s : level) {
      const TernaryFraction u = split_two_thirds(s.a, s.b);
      const TernaryFraction v = split_two_thirds(s.b, s.a);
      const cpp_rational ra = as_rational(s.a), rb = as_rational(s.b);
      ASSERT_EQ(as_rational(u), ra + cpp_rational(2, 3) * (rb - ra));
      ASSERT_EQ(as_rational(v), rb + cpp_rational(2, 3) * (ra - rb));
      ASSERT_TRUE(canonical(u) && canonical(v));
      ASSERT_LE(u.exponent(), static_cast<unsigned>(depth));
      checked += 2;
      next.push_back({s.a, v});
      next.push_back({u, v});
      next.push_back({u, s.b});
    }
    level = std::move(next);
  }
  EXPECT_EQ(level.size(), 2u * 729u);
  EXPECT_GT(checked, 1000u);
}

TEST(AbsDifference, Exact) {
  EXPECT_EQ(abs_difference(tf(1, 1), tf(7, 2)), tf(4, 2));
  EXPECT_EQ(abs_difference(tf(7, 2), tf(1, 1)), tf(4, 2));
  EXPECT_EQ(abs_difference(tf(1, 1), tf(1, 1)), TernaryFraction::zero());
}

TEST(ToReal, Examples) {
  const std::vector<double> lo{0.0, 0.0, 0.0}, hi{1.0, 1.0, 1.0};
  EXPECT_EQ(to_real(VertexKey(3, TernaryFraction::zero()), lo, hi), (Point{0.0, 0.0, 0.0}));
  EXPECT_EQ(to_real(VertexKey(2, TernaryFraction::one()), std::vector<double>{-1, -1}, std::vector<double>{2, 2}),
            (Point{2.0, 2.0}));
  const Point p = to_real({tf(2, 1), tf(1, 1)}, std::vector<double>{0, 0}, std::vector<double>{3, 3});
  EXPECT_DOUBLE_EQ(p[0], 2.0);
  EXPECT_DOUBLE_EQ(p[1], 1.0);
  EXPECT_THROW(to_real({tf(1, 1)}, lo, hi), ContractError);
}

TEST(VertexDB, FindOrRecord) {
  VertexDB db({0.0, 0.0}, {1.0, 1.0});
  const VertexKey key{tf(1, 1), tf(2, 1)};
  int calls = 0;
  auto producer = [&] {
    ++calls;
    return TrialRecord{to_real(key, db.root_lower(), db.root_upper()), 1.5, {0.0, 1.0}};
  };
  const auto first = db.find_or_record(key, producer);
  EXPECT_TRUE(first.was_new);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(db.reuse_hits(), 0u);
  const auto second = db.find_or_record(key, producer);
  EXPECT_FALSE(second.was_new);
  EXPECT_EQ(second.index, first.index);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(db.reuse_hits(), 1u);
  EXPECT_TRUE(db.contains(key));
  EXPECT_EQ(db.find(key), std::optional<std::size_t>(0));
  EXPECT_FALSE(db.find(VertexKey{tf(1, 1), tf(1, 1)}));
}

TEST(VertexDB, MismatchedRecordIsFatal) {
  VertexDB db({0.0}, {1.0});
  EXPECT_THROW(db.find_or_record({tf(1, 1)}, [] { return TrialRecord{{0.5}, 0.0, {0.0}}; }), ConsistencyError);
  EXPECT_EQ(db.size(), 0u);
}

TEST(VertexDB, ProducerErrorsPropagate) {
  VertexDB db({0.0}, {1.0});
  EXPECT_THROW(db.find_or_record({tf(1, 1)}, []() -> TrialRecord { throw EvaluationError("boom"); }),
               EvaluationError);
  EXPECT_EQ(db.size(), 0u);
}

TEST(VertexDB, DumpFormat) {
  VertexDB db({0.0, 0.0}, {1.0, 1.0});
  db.find_or_record({tf(2, 1), TernaryFraction::zero()},
                    [] { return TrialRecord{{2.0 / 3.0, 0.0}, 0.25, {1.0, -2.0}}; });
  std::ostringstream out;
  db.dump(out);
  EXPECT_EQ(out.str(), "2/3^1,0/3^0\t0.25\t1 -2\n");
}

TEST(VertexKeyHash, EqualKeysHashEqual) {
  const VertexKey a{tf(1, 1), tf(7, 2)};
  const VertexKey b{tf(3, 2), tf(7, 2)};
  EXPECT_EQ(a, b);
  EXPECT_EQ(VertexKeyHash{}(a), VertexKeyHash{}(b));
}
