#include "lipgrad/direct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lipgrad::direct {

namespace {

struct TargetHit {};

double cross(const BoxPoint& o, const BoxPoint& a, const BoxPoint& b) {
  return (a.size - o.size) * (b.f - o.f) - (a.f - o.f) * (b.size - o.size);
}

}  // namespace

std::string to_string(Variant v) { return v == Variant::Standard ? "direct" : "directl"; }

std::vector<std::size_t> potentially_optimal(std::span<const BoxPoint> boxes, double eps_bal, Variant variant) {
  if (boxes.empty()) return {};

  std::vector<BoxPoint> sorted(boxes.begin(), boxes.end());
  std::sort(sorted.begin(), sorted.end(), [](const BoxPoint& x, const BoxPoint& y) {
    if (x.size != y.size) return x.size < y.size;
    if (x.f != y.f) return x.f < y.f;
    return x.id < y.id;
  });

  // One representative per size; members holds the tied best boxes of each.
  std::vector<BoxPoint> reps;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || sorted[i].size != sorted[i - 1].size) {
      reps.push_back(sorted[i]);
      members.push_back({sorted[i].id});
    } else if (variant == Variant::Standard && sorted[i].f == reps.back().f) {
      members.back().push_back(sorted[i].id);
    }
  }

  double f_min = reps.front().f;
  for (const auto& r : reps) f_min = std::min(f_min, r.f);
  std::size_t start = 0;
  for (std::size_t g = 0; g < reps.size(); ++g) {
    if (reps[g].f == f_min) start = g;
  }

  // Lower convex hull from the best point to the largest size; collinear
  // points stay on the hull.
  std::vector<std::size_t> hull;
  for (std::size_t g = start; g < reps.size(); ++g) {
    while (hull.size() >= 2 && cross(reps[hull[hull.size() - 2]], reps[hull.back()], reps[g]) < 0.0) hull.pop_back();
    hull.push_back(g);
  }

  const double threshold = f_min - eps_bal * std::abs(f_min);
  std::vector<std::size_t> selected_groups;
  for (std::size_t h = 0; h < hull.size(); ++h) {
    const BoxPoint& p = reps[hull[h]];
    if (h + 1 < hull.size()) {
      const BoxPoint& q = reps[hull[h + 1]];
      const double slope = (q.f - p.f) / (q.size - p.size);
      if (p.f - slope * p.size > threshold) continue;
    }
    selected_groups.push_back(hull[h]);
  }

  std::vector<std::size_t> ids;
  for (auto it = selected_groups.rbegin(); it != selected_groups.rend(); ++it) {
    auto group = members[*it];
    std::sort(group.begin(), group.end());
    ids.insert(ids.end(), group.begin(), group.end());
  }
  return ids;
}

void DirectConfig::validate() const {
  if (!(eps_bal >= 0.0)) throw ConfigError("balancing parameter must be >= 0");
  if (max_trials < 1) throw ConfigError("max_trials must be at least 1");
}

DirectSearch::DirectSearch(const Problem& problem, DirectConfig config, Target target)
    : problem_(&problem), config_(config), target_(std::move(target)), counter_(config.max_trials) {
  config_.validate();
}

double DirectSearch::size_of_level(int level) const {
  const int n = static_cast<int>(problem_->dimension());
  const int whole = level / n;
  const int extra = level % n;
  if (config_.variant == Variant::LocallyBiased) return 0.5 * std::pow(3.0, -whole);
  const double big = std::pow(9.0, -whole);
  const double small = std::pow(9.0, -(whole + 1));
  return 0.5 * std::sqrt((n - extra) * big + extra * small);
}

double DirectSearch::sample(Point normalized) {
  const std::size_t n = normalized.size();
  Point x(n);
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = problem_->lower()[j] + normalized[j] * (problem_->upper()[j] - problem_->lower()[j]);
  }
  TrialRecord rec = evaluate_value(*problem_, x, counter_);
  const double value = rec.value;
  if (!have_incumbent_ || value < incumbent_.value) {
    incumbent_ = rec;
    have_incumbent_ = true;
  }
  const bool hit = target_ && target_(rec);
  if (config_.keep_log) log_.push_back(std::move(rec));
  if (hit) throw TargetHit{};
  return value;
}

void DirectSearch::index_box(std::size_t id) {
  by_level_[boxes_[id].level].emplace(boxes_[id].f_center, id);
}

void DirectSearch::unindex_box(std::size_t id) {
  auto it = by_level_.find(boxes_[id].level);
  it->second.erase({boxes_[id].f_center, id});
  if (it->second.empty()) by_level_.erase(it);
}

void DirectSearch::initialize() {
  if (!boxes_.empty() || halted_) throw ContractError("DIRECT search already initialized");
  const std::size_t n = problem_->dimension();
  DirectBox root;
  root.center.assign(n, 0.5);
  root.side_thirds.assign(n, 0);
  root.level = 0;
  root.size = size_of_level(0);
  try {
    root.f_center = sample(root.center);
  } catch (const TargetHit&) {
    halted_ = StopReason::Target;
    root.f_center = incumbent_.value;
  } catch (const BudgetExhausted&) {
    halted_ = StopReason::Budget;
    return;
  }
  boxes_.push_back(std::move(root));
  index_box(0);
}

void DirectSearch::trisect(std::size_t box_id) {
  const std::size_t n = problem_->dimension();
  const DirectBox parent = boxes_[box_id];
  const int t_min = *std::min_element(parent.side_thirds.begin(), parent.side_thirds.end());
  const double third = std::pow(3.0, -(t_min + 1));

  struct Probe {
    std::size_t dim;
    Point plus, minus;
    double f_plus, f_minus;
  };
  std::vector<Probe> probes;
  for (std::size_t j = 0; j < n; ++j) {
    if (parent.side_thirds[j] != t_min) continue;
    Probe p{j, parent.center, parent.center, 0.0, 0.0};
    p.plus[j] += third;
    p.minus[j] -= third;
    probes.push_back(std::move(p));
  }
  for (auto& p : probes) {
    p.f_plus = sample(p.plus);
    p.f_minus = sample(p.minus);
  }
  // Split first along the dimension with the best sample so that it ends up
  // in the largest boxes.
  std::stable_sort(probes.begin(), probes.end(), [](const Probe& x, const Probe& y) {
    return std::min(x.f_plus, x.f_minus) < std::min(y.f_plus, y.f_minus);
  });

  unindex_box(box_id);
  std::vector<int> thirds = parent.side_thirds;
  int level = parent.level;
  for (const auto& p : probes) {
    ++thirds[p.dim];
    ++level;
    for (int side = 0; side < 2; ++side) {
      DirectBox child;
      child.id = boxes_.size();
      child.center = side == 0 ? p.plus : p.minus;
      child.f_center = side == 0 ? p.f_plus : p.f_minus;
      child.side_thirds = thirds;
      child.level = level;
      child.size = size_of_level(level);
      boxes_.push_back(std::move(child));
      index_box(boxes_.size() - 1);
    }
  }
  DirectBox& updated = boxes_[box_id];
  updated.side_thirds = thirds;
  updated.level = level;
  updated.size = size_of_level(level);
  index_box(box_id);
}

IterationStats DirectSearch::iterate() {
  IterationStats stats;
  if (halted_) return stats;
  if (boxes_.empty()) throw ContractError("iterate() before initialize()");

  std::vector<BoxPoint> candidates;
  for (const auto& [level, entries] : by_level_) {
    const double best = entries.begin()->first;
    for (const auto& [f, id] : entries) {
      if (f != best) break;
      candidates.push_back({boxes_[id].size, f, id});
      if (config_.variant == Variant::LocallyBiased) break;
    }
  }
  std::vector<double> sizes;
  for (const auto& c : candidates) sizes.push_back(c.size);
  std::sort(sizes.begin(), sizes.end());
  stats.distinct_sizes = static_cast<std::size_t>(std::unique(sizes.begin(), sizes.end()) - sizes.begin());

  const std::vector<std::size_t> chosen = potentially_optimal(candidates, config_.eps_bal, config_.variant);
  stats.selected = chosen.size();
  try {
    for (std::size_t id : chosen) trisect(id);
  } catch (const TargetHit&) {
    halted_ = StopReason::Target;
  } catch (const BudgetExhausted&) {
    halted_ = StopReason::Budget;
  }
  ++iterations_;
  return stats;
}

DirectResult run_direct(const Problem& problem, const DirectConfig& config, const DirectSearch::Target& target) {
  DirectSearch search(problem, config, target);
  DirectResult result;
  search.initialize();
  while (!search.halted()) result.history.push_back(search.iterate());
  result.trials = search.trials();
  result.iterations = search.iterations();
  result.stop_reason = *search.halted();
  result.trial_log = search.take_log();
  result.incumbent_point = search.incumbent().point;
  result.incumbent_value = search.incumbent().value;
  return result;
}

}  // namespace lipgrad::direct
