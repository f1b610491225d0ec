#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lipgrad/objective.hpp"
#include "lipgrad/smoothd.hpp"

namespace lipgrad::direct {

enum class Variant {
  Standard,       ///< Euclidean box size, every hull box selected
  LocallyBiased,  ///< max-side box size, at most one box per size
};

std::string to_string(Variant v);

/// A box of the center-sampling partition in normalized [0, 1]^N coordinates.
struct DirectBox {
  std::size_t id = 0;
  Point center;                 ///< normalized
  double f_center = 0.0;
  std::vector<int> side_thirds; ///< side j has length 3^-side_thirds[j]
  int level = 0;                ///< total trisections, sum of side_thirds
  double size = 0.0;
};

/// (size, f) summary used by the selection rule.
struct BoxPoint {
  double size = 0.0;
  double f = 0.0;
  std::size_t id = 0;
};

/// Ids of the potentially optimal boxes: the lower-right convex hull of
/// (size, f) from the best point to the largest size, filtered by the
/// improvement test f - K size <= f_min - eps_bal |f_min|. The
/// locally-biased variant keeps at most one box per distinct size (lowest
/// f, then lowest id). Result ordered by decreasing size, then id.
std::vector<std::size_t> potentially_optimal(std::span<const BoxPoint> boxes, double eps_bal,
                                             Variant variant = Variant::Standard);

struct DirectConfig {
  Variant variant = Variant::Standard;
  double eps_bal = 1e-4;
  std::uint64_t max_trials = 1'000'000;
  bool keep_log = true;  ///< store every trial; the harness turns this off

  void validate() const;
};

struct IterationStats {
  std::size_t selected = 0;
  std::size_t distinct_sizes = 0;
};

struct DirectResult {
  Point incumbent_point;
  double incumbent_value = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t iterations = 0;
  StopReason stop_reason = StopReason::Budget;
  std::vector<TrialRecord> trial_log;  ///< value-only records in evaluation order
  std::vector<IterationStats> history;
};

/// DIRECT on one problem. Gradients are never requested.
class DirectSearch {
public:
  using Target = std::function<bool(const TrialRecord&)>;

  DirectSearch(const Problem& problem, DirectConfig config, Target target = {});

  /// Samples the center of the whole box.
  void initialize();

  /// Selects the potentially optimal boxes and trisects each of them.
  IterationStats iterate();

  std::optional<StopReason> halted() const { return halted_; }
  const std::vector<DirectBox>& boxes() const { return boxes_; }
  std::uint64_t trials() const { return counter_.count(); }
  std::uint64_t iterations() const { return iterations_; }
  const std::vector<TrialRecord>& trial_log() const { return log_; }
  std::vector<TrialRecord> take_log() { return std::move(log_); }
  const TrialRecord& incumbent() const { return incumbent_; }

  /// Box size measure of the configured variant for a given trisection level.
  double size_of_level(int level) const;

private:
  double sample(Point normalized);
  void trisect(std::size_t box_id);
  void index_box(std::size_t box_id);
  void unindex_box(std::size_t box_id);

  const Problem* problem_;
  DirectConfig config_;
  Target target_;
  TrialCounter counter_;
  std::vector<DirectBox> boxes_;
  std::vector<TrialRecord> log_;
  /// level -> (f_center, id) ordered, for O(log) access to group minima.
  std::map<int, std::set<std::pair<double, std::size_t>>> by_level_;
  TrialRecord incumbent_;
  bool have_incumbent_ = false;
  std::uint64_t iterations_ = 0;
  std::optional<StopReason> halted_;
};

/// Runs until the target accepts a trial or max_trials is spent; DIRECT has
/// no internal stopping rule.
DirectResult run_direct(const Problem& problem, const DirectConfig& config, const DirectSearch::Target& target = {});

}  // namespace lipgrad::direct
