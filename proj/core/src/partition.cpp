#include "lipgrad/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>

#include "lipgrad/characteristic.hpp"

namespace lipgrad {

DiagonalQuantities diagonal_quantities(const TrialRecord& a, const TrialRecord& b) {
  const std::size_t n = a.point.size();
  if (b.point.size() != n || a.gradient.size() != n || b.gradient.size() != n) {
    throw ContractError("diagonal endpoints disagree in dimension");
  }
  double sq = 0.0, dot_a = 0.0, dot_b = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double step = b.point[j] - a.point[j];
    sq += step * step;
    dot_a += a.gradient[j] * step;
    dot_b += b.gradient[j] * step;
  }
  const double delta = std::sqrt(sq);
  if (!(delta > 0.0)) throw ContractError("degenerate interval: diagonal endpoints coincide");
  return {delta, dot_a / delta, dot_b / delta};
}

std::size_t longest_side_index(const VertexKey& a, const VertexKey& b, std::span<const double> root_lower,
                               std::span<const double> root_upper) {
  std::size_t best = 0;
  double best_len = -1.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double len = abs_difference(a[j], b[j]).value() * (root_upper[j] - root_lower[j]);
    if (len > best_len) {
      best_len = len;
      best = j;
    }
  }
  return best;
}

std::pair<VertexKey, VertexKey> generate_uv(const VertexKey& a, const VertexKey& b, std::span<const double> root_lower,
                                            std::span<const double> root_upper, unsigned depth_cap) {
  const std::size_t i = longest_side_index(a, b, root_lower, root_upper);
  VertexKey u = a;
  VertexKey v = b;
  u[i] = split_two_thirds(a[i], b[i], depth_cap);
  v[i] = split_two_thirds(b[i], a[i], depth_cap);
  return {std::move(u), std::move(v)};
}

Hyperinterval PartitionSet::make_interval(IntervalId id, std::size_t a_record, std::size_t b_record) const {
  const TrialRecord& ra = db_->record(a_record);
  const TrialRecord& rb = db_->record(b_record);
  const DiagonalQuantities q = diagonal_quantities(ra, rb);
  Hyperinterval h;
  h.id = id;
  h.a_key = db_->key(a_record);
  h.b_key = db_->key(b_record);
  h.a_record = a_record;
  h.b_record = b_record;
  h.f_a = ra.value;
  h.f_b = rb.value;
  h.delta = q.delta;
  h.dir_deriv_a = q.dir_deriv_a;
  h.dir_deriv_b = q.dir_deriv_b;
  h.w = interval_w(h.f_a, h.f_b, h.dir_deriv_a, h.dir_deriv_b, h.delta);
  return h;
}

IntervalId PartitionSet::add_root(std::size_t a_record, std::size_t b_record) {
  if (!intervals_.empty()) throw ContractError("partition already has a root");
  intervals_.push_back(make_interval(0, a_record, b_record));
  return 0;
}

const Hyperinterval& PartitionSet::at(IntervalId id) const {
  if (id >= intervals_.size()) throw UnknownIntervalError("no interval with id " + std::to_string(id));
  return intervals_[id];
}

std::array<IntervalId, 3> PartitionSet::subdivide(IntervalId t, std::size_t u_record, std::size_t v_record) {
  const Hyperinterval& parent = at(t);
  const std::size_t a_record = parent.a_record;
  const std::size_t b_record = parent.b_record;
  const IntervalId left = intervals_.size();
  const IntervalId right = left + 1;

  Hyperinterval middle = make_interval(t, u_record, v_record);
  Hyperinterval near_a = make_interval(left, a_record, v_record);
  Hyperinterval near_b = make_interval(right, u_record, b_record);
  intervals_[t] = std::move(middle);
  intervals_.push_back(std::move(near_a));
  intervals_.push_back(std::move(near_b));
  return {t, left, right};
}

void PartitionSet::dump(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  for (const auto& h : intervals_) {
    out << h.id << ", (" << key_string(h.a_key) << "), (" << key_string(h.b_key) << "), " << h.f_a << ", " << h.f_b
        << ", " << h.delta << ", " << h.w << '\n';
  }
  out.precision(old_precision);
}

VertexDB::Lookup acquire_one(VertexDB& db, const VertexKey& key, const Problem& problem, TrialCounter& counter,
                             const NewRecordHook& on_new) {
  const auto lookup = db.find_or_record(key, [&] {
    const Point x = to_real(key, db.root_lower(), db.root_upper());
    return evaluate(problem, x, counter);
  });
  if (lookup.was_new && on_new) on_new(lookup.index);
  return lookup;
}

AcquiredTrials acquire_trials(VertexDB& db, const VertexKey& u, const VertexKey& v, const Problem& problem,
                              TrialCounter& counter, const NewRecordHook& on_new) {
  const auto lu = acquire_one(db, u, problem, counter, on_new);
  const auto lv = acquire_one(db, v, problem, counter, on_new);
  return {lu.index, lv.index, static_cast<int>(lu.was_new) + static_cast<int>(lv.was_new)};
}

namespace {

using boost::multiprecision::cpp_int;

cpp_int big(uint128 v) {
  cpp_int r = static_cast<std::uint64_t>(v >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(v);
  return r;
}

struct FractionBox {
  std::vector<TernaryFraction> lo;
  std::vector<TernaryFraction> hi;
};

}  // namespace

TilingReport verify_tiling(const PartitionSet& set) {
  TilingReport report;
  const auto& intervals = set.intervals();
  if (intervals.empty()) return report;
  const std::size_t n = intervals.front().a_key.size();

  std::vector<FractionBox> boxes;
  boxes.reserve(intervals.size());
  report.non_degenerate = true;
  for (const auto& h : intervals) {
    FractionBox box;
    box.lo.resize(n);
    box.hi.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      box.lo[j] = std::min(h.a_key[j], h.b_key[j]);
      box.hi[j] = std::max(h.a_key[j], h.b_key[j]);
      if (box.lo[j] == box.hi[j]) report.non_degenerate = false;
    }
    boxes.push_back(std::move(box));
  }

  // Side lengths are num/3^e; the volume of a box is prod(num) / 3^(sum e).
  std::vector<std::pair<cpp_int, unsigned>> volumes;
  volumes.reserve(boxes.size());
  unsigned max_exp = 0;
  for (const auto& box : boxes) {
    cpp_int num = 1;
    unsigned e = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const TernaryFraction side = abs_difference(box.lo[j], box.hi[j]);
      num *= big(side.numerator());
      e += side.exponent();
    }
    max_exp = std::max(max_exp, e);
    volumes.emplace_back(std::move(num), e);
  }
  cpp_int total = 0;
  for (const auto& [num, e] : volumes) total += num * boost::multiprecision::pow(cpp_int(3), max_exp - e);
  report.volume_exact = total == boost::multiprecision::pow(cpp_int(3), max_exp);

  // Sweep along the first coordinate; only boxes whose first-coordinate
  // ranges overlap need a full comparison.
  std::vector<std::size_t> order(boxes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return boxes[x].lo[0] < boxes[y].lo[0]; });
  report.disjoint = true;
  for (std::size_t p = 0; p < order.size() && report.disjoint; ++p) {
    const FractionBox& bi = boxes[order[p]];
    for (std::size_t q = p + 1; q < order.size(); ++q) {
      const FractionBox& bj = boxes[order[q]];
      if (!(bj.lo[0] < bi.hi[0])) break;
      bool overlap = true;
      for (std::size_t j = 0; j < n && overlap; ++j) {
        overlap = bi.lo[j] < bj.hi[j] && bj.lo[j] < bi.hi[j];
      }
      if (overlap) {
        report.disjoint = false;
        break;
      }
    }
  }
  return report;
}

std::size_t max_vertex_sharing(const PartitionSet& set) {
  std::unordered_map<std::size_t, std::size_t> uses;
  for (const auto& h : set.intervals()) {
    ++uses[h.a_record];
    ++uses[h.b_record];
  }
  std::size_t best = 0;
  for (const auto& [_, count] : uses) best = std::max(best, count);
  return best;
}

}  // namespace lipgrad
