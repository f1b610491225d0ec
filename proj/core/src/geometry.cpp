#include "lipgrad/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

namespace lipgrad {

namespace {

constexpr unsigned kMaxPow = 80;

constexpr std::array<uint128, kMaxPow + 1> make_pow3_table() {
  std::array<uint128, kMaxPow + 1> t{};
  t[0] = 1;
  for (unsigned i = 1; i <= kMaxPow; ++i) t[i] = t[i - 1] * 3;
  return t;
}

constexpr auto kPow3 = make_pow3_table();

std::string to_decimal(uint128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace

uint128 pow3(unsigned e) {
  if (e > kMaxPow) throw ContractError("pow3 exponent out of range");
  return kPow3[e];
}

TernaryFraction TernaryFraction::make(uint128 numerator, unsigned exponent) {
  if (exponent > kMaxPow || numerator > kPow3[exponent]) {
    throw ContractError("ternary fraction outside [0, 1]");
  }
  while (exponent > 0 && numerator % 3 == 0) {
    numerator /= 3;
    --exponent;
  }
  TernaryFraction f;
  f.numerator_ = numerator;
  f.exponent_ = numerator == 0 ? 0 : exponent;
  return f;
}

double TernaryFraction::value() const {
  if (exponent_ == 0) return static_cast<double>(numerator_);
  return static_cast<double>(static_cast<long double>(numerator_) / static_cast<long double>(kPow3[exponent_]));
}

std::strong_ordering operator<=>(const TernaryFraction& x, const TernaryFraction& y) {
  const unsigned e = std::max(x.exponent_, y.exponent_);
  const uint128 a = x.numerator_ * kPow3[e - x.exponent_];
  const uint128 b = y.numerator_ * kPow3[e - y.exponent_];
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string TernaryFraction::str() const {
  return to_decimal(numerator_) + "/3^" + std::to_string(exponent_);
}

TernaryFraction abs_difference(const TernaryFraction& x, const TernaryFraction& y) {
  const unsigned e = std::max(x.exponent(), y.exponent());
  const uint128 a = x.numerator() * kPow3[e - x.exponent()];
  const uint128 b = y.numerator() * kPow3[e - y.exponent()];
  return TernaryFraction::make(a > b ? a - b : b - a, e);
}

TernaryFraction split_two_thirds(const TernaryFraction& from, const TernaryFraction& to, unsigned depth_cap) {
  if (from == to) throw ContractError("split_two_thirds on a zero-length side");
  const unsigned e = std::max(from.exponent(), to.exponent());
  if (e + 1 > depth_cap || e + 1 > kMaxPow) {
    throw DepthOverflowError("subdivision depth exceeds cap of " + std::to_string(depth_cap));
  }
  // (from + 2 to) / 3, on the common denominator 3^(e+1).
  const uint128 a = from.numerator() * kPow3[e - from.exponent()];
  const uint128 b = to.numerator() * kPow3[e - to.exponent()];
  return TernaryFraction::make(a + 2 * b, e + 1);
}

std::size_t VertexKeyHash::operator()(const VertexKey& key) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (const auto& f : key) {
    mix(static_cast<std::uint64_t>(f.numerator()));
    mix(static_cast<std::uint64_t>(f.numerator() >> 64));
    mix(f.exponent());
  }
  return static_cast<std::size_t>(h);
}

Point to_real(const VertexKey& key, std::span<const double> root_lower, std::span<const double> root_upper) {
  if (key.size() != root_lower.size() || key.size() != root_upper.size()) {
    throw ContractError("vertex key and root box dimensions disagree");
  }
  Point x(key.size());
  for (std::size_t j = 0; j < key.size(); ++j) {
    const TernaryFraction& t = key[j];
    if (t == TernaryFraction::zero()) {
      x[j] = root_lower[j];
    } else if (t == TernaryFraction::one()) {
      x[j] = root_upper[j];
    } else {
      x[j] = std::clamp(root_lower[j] + t.value() * (root_upper[j] - root_lower[j]), root_lower[j], root_upper[j]);
    }
  }
  return x;
}

std::string key_string(const VertexKey& key) {
  std::string s;
  for (std::size_t j = 0; j < key.size(); ++j) {
    if (j) s += ',';
    s += key[j].str();
  }
  return s;
}

VertexDB::VertexDB(std::vector<double> root_lower, std::vector<double> root_upper)
    : root_lower_(std::move(root_lower)), root_upper_(std::move(root_upper)) {
  if (root_lower_.size() != root_upper_.size()) throw ContractError("root box bounds differ in length");
}

std::optional<std::size_t> VertexDB::find(const VertexKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VertexDB::Lookup VertexDB::find_or_record(const VertexKey& key, const Producer& producer) {
  if (auto it = index_.find(key); it != index_.end()) {
    ++reuse_hits_;
    return {it->second, false};
  }
  TrialRecord rec = producer();
  const Point expected = to_real(key, root_lower_, root_upper_);
  if (rec.point.size() != expected.size()) {
    throw ConsistencyError("record for key " + key_string(key) + " has wrong dimension");
  }
  for (std::size_t j = 0; j < expected.size(); ++j) {
    if (std::abs(rec.point[j] - expected[j]) > kDomainSlack) {
      throw ConsistencyError("record point " + format_point(rec.point) + " does not match key " + key_string(key));
    }
  }
  const std::size_t idx = records_.size();
  records_.push_back(std::move(rec));
  keys_.push_back(key);
  index_.emplace(key, idx);
  return {idx, true};
}

void VertexDB::dump(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    out << key_string(keys_[i]) << '\t' << records_[i].value << '\t';
    for (std::size_t j = 0; j < records_[i].gradient.size(); ++j) {
      if (j) out << ' ';
      out << records_[i].gradient[j];
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace lipgrad
