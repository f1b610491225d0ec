#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lipgrad/characteristic.hpp"
#include "lipgrad/geometry.hpp"
#include "lipgrad/objective.hpp"
#include "lipgrad/partition.hpp"

namespace lipgrad {

struct SolverConfig {
  double r_bar = 2.0;   ///< reliability base, > 1
  double c = 0.0;       ///< r_k = r_bar + c / k
  double xi = 1e-6;     ///< floor of the Lipschitz estimate
  double eps = 1e-4;    ///< stop when the selected diagonal <= eps * root diagonal
  std::uint64_t max_trials = 1'000'000;
  /// Ascending reliability values; when non-empty the solver is restarted on
  /// the same trial pool with each value in turn and r_bar is ignored.
  std::vector<double> r_ladder;
  unsigned depth_cap = kDefaultDepthCap;

  /// Throws ConfigError on invalid values.
  void validate() const;
};

/// Default restart ladder: 1.1, then *1.4 per rung, the last rung clipped to `r_max`.
std::vector<double> default_ladder(double r_max, double start = 1.1, double factor = 1.4);

enum class StopReason {
  Tolerance,  ///< selected diagonal fell below eps * root diagonal
  Budget,     ///< max_trials evaluations spent
  Target,     ///< the caller's target predicate accepted a trial
};

std::string to_string(StopReason reason);

struct IterationReport {
  std::size_t k = 0;         ///< iteration that produced this report
  std::uint64_t p = 0;       ///< trials after the iteration
  std::size_t M = 0;         ///< intervals after the iteration
  double r = 0.0;
  double m = 0.0;
  IntervalId t = 0;
  double R_t = 0.0;
  double delta_t = 0.0;
  int new_trials = 0;
  /// Set when the iteration ended the run. Tolerance means nothing was
  /// subdivided; Budget and Target can interrupt the trial step.
  std::optional<StopReason> stop;
};

struct SolveHooks {
  /// Called for every newly evaluated trial; returning true halts the run.
  std::function<bool(const TrialRecord&)> target;
  std::function<void(const IterationReport&)> on_iteration;
};

/// One reliability-parameter run sharing a trial pool with earlier runs.
struct RungSummary {
  double r_bar = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t trials_after = 0;
  StopReason stop_reason = StopReason::Tolerance;
  std::size_t incumbent_index = 0;
};

struct RunResult {
  Point incumbent_point;
  double incumbent_value = 0.0;
  std::size_t incumbent_index = 0;  ///< position in the trial log
  std::uint64_t trials = 0;
  std::uint64_t iterations = 0;
  StopReason stop_reason = StopReason::Tolerance;
  double r_bar = 0.0;               ///< reliability base of the last rung
  bool incumbent_changed = false;   ///< set by restarts: last rung moved the incumbent
  std::uint64_t reuse_hits = 0;
  std::size_t intervals = 0;
  std::vector<RungSummary> rungs;
  /// Every trial of the run, in evaluation order; retained for restarts.
  std::shared_ptr<VertexDB> db;

  const std::vector<TrialRecord>& trial_log() const { return db->records(); }
};

/// The SmoothD iteration on one trial pool. The pool and the counter are
/// owned by the caller so that restarts can share them.
class SmoothDSolver {
public:
  SmoothDSolver(const Problem& problem, const SolverConfig& config, double r_bar, VertexDB& db,
                TrialCounter& counter, SolveHooks hooks = {});

  /// Trials at the box vertices a and b (served from the pool when known)
  /// and the one-interval partition. Sets k = 1.
  void initialize();

  /// One iteration: estimate m, compute characteristics, select, test the
  /// stopping rule, then sample u and v and subdivide. Budget exhaustion and
  /// target hits are reported through IterationReport::stop, never thrown.
  IterationReport iterate();

  /// Why the run ended, once it has.
  std::optional<StopReason> halted() const { return halted_; }

  std::size_t k() const { return k_; }
  std::uint64_t p() const { return counter_->count(); }
  std::size_t M() const { return partition_.size(); }
  double m() const { return m_; }
  double m_hat() const { return m_hat_; }
  double r_bar() const { return r_bar_; }
  double incumbent_value() const { return db_->record(incumbent_).value; }
  const Point& incumbent_point() const { return db_->record(incumbent_).point; }
  std::size_t incumbent_index() const { return incumbent_; }
  const PartitionSet& partition() const { return partition_; }
  const VertexDB& db() const { return *db_; }

  /// Characteristics of every current interval for the estimate m.
  std::vector<Characteristic> characteristics(double m) const;

private:
  void on_new_record(std::size_t index);
  void cache_interval(IntervalId id);

  // endpoint data per interval id, packed for the characteristic scan
  struct Packed {
    double f_a, f_b, dda, ddb, delta;
  };

  const Problem* problem_;
  const SolverConfig* config_;
  double r_bar_;
  VertexDB* db_;
  TrialCounter* counter_;
  SolveHooks hooks_;
  PartitionSet partition_;
  std::size_t k_ = 1;
  double m_ = 0.0;
  double m_hat_ = 0.0;
  double root_diagonal_ = 0.0;
  std::size_t incumbent_ = 0;
  bool have_incumbent_ = false;
  std::optional<StopReason> halted_;
  std::vector<Packed> packed_;
};

/// Runs SmoothD until the stopping rule, the trial budget or the target
/// predicate ends it. With a non-empty r_ladder, every rung after the first
/// restarts from the root box on the retained trial pool.
RunResult solve(const Problem& problem, const SolverConfig& config, const SolveHooks& hooks = {});

/// Restarts from the root box with a larger reliability base, serving every
/// known point from `previous.db`. The trial count continues from
/// previous.trials and max_trials bounds the total.
RunResult restart_with(const Problem& problem, const SolverConfig& config, const RunResult& previous, double new_r_bar,
                       const SolveHooks& hooks = {});

/// CSV trial log: header `trial_index,x1..xN,f,g1..gN`, one row per trial,
/// then `# ` followed by `summary`. Records without a gradient leave the
/// gradient cells empty.
void write_trial_log(std::ostream& out, const std::vector<TrialRecord>& log, const std::string& summary);

/// `key=value` summary of a run for the trial log trailer.
std::string summary_line(const RunResult& result);

}  // namespace lipgrad
