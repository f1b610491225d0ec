#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "lipgrad/geometry.hpp"
#include "lipgrad/objective.hpp"

namespace lipgrad {

using IntervalId = std::size_t;

/// A box of the current partition, identified by the two vertices of its
/// main diagonal. The pair is ordered as produced by subdivision and is not
/// componentwise sorted: middle children carry reversed diagonals.
struct Hyperinterval {
  IntervalId id = 0;
  VertexKey a_key;
  VertexKey b_key;
  std::size_t a_record = 0;  ///< index into the run's VertexDB
  std::size_t b_record = 0;
  double f_a = 0.0;
  double f_b = 0.0;
  double delta = 0.0;        ///< length of the main diagonal
  double dir_deriv_a = 0.0;  ///< derivative at a along (b - a)/delta
  double dir_deriv_b = 0.0;  ///< derivative at b along (b - a)/delta
  double w = 0.0;            ///< local lower estimate of the gradient Lipschitz constant
};

struct DiagonalQuantities {
  double delta = 0.0;
  double dir_deriv_a = 0.0;
  double dir_deriv_b = 0.0;
};

/// Diagonal length and directional derivatives at both ends along a -> b.
/// Throws ContractError if the points coincide or differ in dimension.
DiagonalQuantities diagonal_quantities(const TrialRecord& a, const TrialRecord& b);

/// Smallest j maximizing |b(j) - a(j)| in real-space units.
std::size_t longest_side_index(const VertexKey& a, const VertexKey& b, std::span<const double> root_lower,
                               std::span<const double> root_upper);

/// u = a with coordinate i moved 2/3 of the way to b(i); v = b with coordinate
/// i moved 2/3 of the way to a(i); i is the longest side.
std::pair<VertexKey, VertexKey> generate_uv(const VertexKey& a, const VertexKey& b, std::span<const double> root_lower,
                                            std::span<const double> root_upper,
                                            unsigned depth_cap = kDefaultDepthCap);

/// The current partition of the root box. Interval ids are positions in the
/// collection; subdivision keeps the parent's id for the middle child and
/// appends the two outer children.
class PartitionSet {
public:
  explicit PartitionSet(const VertexDB& db) : db_(&db) {}

  /// Starts the partition with the whole box; the records must be the
  /// vertices 0...0 and 1...1.
  IntervalId add_root(std::size_t a_record, std::size_t b_record);

  /// Replaces interval t by [u, v] and appends [a_t, v] and [u, b_t].
  /// Returns the three ids {t, M, M + 1}.
  std::array<IntervalId, 3> subdivide(IntervalId t, std::size_t u_record, std::size_t v_record);

  std::size_t size() const { return intervals_.size(); }
  bool empty() const { return intervals_.empty(); }
  const Hyperinterval& operator[](IntervalId id) const { return intervals_[id]; }
  const Hyperinterval& at(IntervalId id) const;
  const std::vector<Hyperinterval>& intervals() const { return intervals_; }
  const VertexDB& db() const { return *db_; }

  /// `id, a_key, b_key, f_a, f_b, delta, w` per line; keys in parentheses.
  void dump(std::ostream& out) const;

private:
  Hyperinterval make_interval(IntervalId id, std::size_t a_record, std::size_t b_record) const;

  const VertexDB* db_;
  std::vector<Hyperinterval> intervals_;
};

struct AcquiredTrials {
  std::size_t u_record = 0;
  std::size_t v_record = 0;
  int new_trials = 0;
};

/// Called with the database index of each freshly evaluated record.
using NewRecordHook = std::function<void(std::size_t)>;

/// Looks up u and v in the database and evaluates only the missing ones,
/// u before v when both are new. `on_new` runs right after each insertion;
/// an exception from it aborts before the second point is evaluated.
AcquiredTrials acquire_trials(VertexDB& db, const VertexKey& u, const VertexKey& v, const Problem& problem,
                              TrialCounter& counter, const NewRecordHook& on_new = {});

/// Record index of `key`, evaluating it if the pool does not have it.
VertexDB::Lookup acquire_one(VertexDB& db, const VertexKey& key, const Problem& problem, TrialCounter& counter,
                             const NewRecordHook& on_new = {});

struct TilingReport {
  bool volume_exact = false;   ///< box volumes sum to exactly 1 (in root-fraction units)
  bool disjoint = false;       ///< no two boxes share interior points
  bool non_degenerate = false; ///< every diagonal differs in every coordinate
  bool ok() const { return volume_exact && disjoint && non_degenerate; }
};

/// Exact check, in ternary arithmetic, that the boxes tile the root box.
TilingReport verify_tiling(const PartitionSet& set);

/// Largest number of intervals that use one vertex as a diagonal endpoint.
std::size_t max_vertex_sharing(const PartitionSet& set);

}  // namespace lipgrad
