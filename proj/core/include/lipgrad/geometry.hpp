#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lipgrad/objective.hpp"

namespace lipgrad {

__extension__ using uint128 = unsigned __int128;

/// Subdivision depth cap per coordinate. 3^75 < 2^119, so every intermediate
/// of split_two_thirds fits an unsigned 128-bit integer.
inline constexpr unsigned kDefaultDepthCap = 75;

/// Exact value numerator / 3^exponent in [0, 1], always kept canonical
/// (minimal exponent; 0 is 0/3^0 and 1 is 1/3^0). Diagonal vertices produced
/// by 2/3-splits never leave this set, so equal fractions mean equal points.
class TernaryFraction {
public:
  constexpr TernaryFraction() = default;

  /// Canonicalizes; throws ContractError if the value is outside [0, 1].
  static TernaryFraction make(uint128 numerator, unsigned exponent);
  static constexpr TernaryFraction zero() { return {}; }
  static constexpr TernaryFraction one() {
    TernaryFraction f;
    f.numerator_ = 1;
    return f;
  }

  uint128 numerator() const { return numerator_; }
  unsigned exponent() const { return exponent_; }
  double value() const;

  friend bool operator==(const TernaryFraction&, const TernaryFraction&) = default;
  friend std::strong_ordering operator<=>(const TernaryFraction& x, const TernaryFraction& y);

  /// `num/3^exp` text, e.g. "7/3^2".
  std::string str() const;

private:
  uint128 numerator_ = 0;
  unsigned exponent_ = 0;
};

/// 3^e for e <= 80.
uint128 pow3(unsigned e);

/// |x - y| as an exact fraction (same representation, not restricted to a split result).
TernaryFraction abs_difference(const TernaryFraction& x, const TernaryFraction& y);

/// from + (2/3)(to - from), exact. Throws DepthOverflowError when the result
/// would need an exponent above `depth_cap`, ContractError if from == to.
TernaryFraction split_two_thirds(const TernaryFraction& from, const TernaryFraction& to,
                                 unsigned depth_cap = kDefaultDepthCap);

/// A point of the root box in fraction coordinates: x_j = lower_j + t_j (upper_j - lower_j).
using VertexKey = std::vector<TernaryFraction>;

struct VertexKeyHash {
  std::size_t operator()(const VertexKey& key) const noexcept;
};

Point to_real(const VertexKey& key, std::span<const double> root_lower, std::span<const double> root_upper);

std::string key_string(const VertexKey& key);

/// Identity map from exact vertex keys to trial records, shared by all
/// hyperintervals of one run. Records are immutable once stored.
class VertexDB {
public:
  using Producer = std::function<TrialRecord()>;

  VertexDB(std::vector<double> root_lower, std::vector<double> root_upper);

  struct Lookup {
    std::size_t index;
    bool was_new;
  };

  /// Returns the stored record for `key`, calling `producer` exactly once if
  /// the key is new. Hits bump reuse_hits. A producer whose record does not
  /// sit at the key's real-space point raises ConsistencyError.
  Lookup find_or_record(const VertexKey& key, const Producer& producer);

  /// Index of `key` without touching statistics.
  std::optional<std::size_t> find(const VertexKey& key) const;
  bool contains(const VertexKey& key) const { return index_.count(key) != 0; }

  const TrialRecord& record(std::size_t index) const { return records_[index]; }
  const VertexKey& key(std::size_t index) const { return keys_[index]; }
  std::size_t size() const { return records_.size(); }
  std::uint64_t reuse_hits() const { return reuse_hits_; }

  /// Records in insertion (= evaluation) order.
  const std::vector<TrialRecord>& records() const { return records_; }

  std::span<const double> root_lower() const { return root_lower_; }
  std::span<const double> root_upper() const { return root_upper_; }

  /// One line per vertex in insertion order: `key <TAB> value <TAB> gradient...`.
  void dump(std::ostream& out) const;

private:
  std::vector<double> root_lower_;
  std::vector<double> root_upper_;
  std::unordered_map<VertexKey, std::size_t, VertexKeyHash> index_;
  std::vector<VertexKey> keys_;
  std::vector<TrialRecord> records_;
  std::uint64_t reuse_hits_ = 0;
};

}  // namespace lipgrad
