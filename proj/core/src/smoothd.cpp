#include "lipgrad/smoothd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace lipgrad {

namespace {

// Thrown from the new-record hook to unwind out of the trial step as soon as
// the target predicate accepts a point.
struct TargetHit {};

}  // namespace

void SolverConfig::validate() const {
  if (r_ladder.empty()) {
    if (!(r_bar > 1.0)) throw ConfigError("reliability parameter r_bar must be > 1");
  } else {
    for (std::size_t i = 0; i < r_ladder.size(); ++i) {
      if (!(r_ladder[i] > 1.0)) throw ConfigError("ladder values must be > 1");
      if (i > 0 && !(r_ladder[i] > r_ladder[i - 1])) throw ConfigError("ladder values must be strictly ascending");
    }
  }
  if (!(c >= 0.0) || !std::isfinite(c)) throw ConfigError("C must be a finite value >= 0");
  if (!(xi > 0.0)) throw ConfigError("xi must be > 0");
  if (!(eps >= 0.0)) throw ConfigError("eps must be >= 0");
  if (max_trials < 2) throw ConfigError("max_trials must be at least 2");
  if (depth_cap == 0 || depth_cap > kDefaultDepthCap) {
    throw ConfigError("depth cap must lie in 1.." + std::to_string(kDefaultDepthCap));
  }
}

std::vector<double> default_ladder(double r_max, double start, double factor) {
  if (!(r_max > 1.0) || !(start > 1.0) || !(factor > 1.0)) throw ConfigError("invalid ladder parameters");
  std::vector<double> ladder;
  for (double r = start; r < r_max; r *= factor) ladder.push_back(r);
  ladder.push_back(r_max);
  return ladder;
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Tolerance:
      return "tolerance";
    case StopReason::Budget:
      return "budget";
    case StopReason::Target:
      return "target";
  }
  return "unknown";
}

SmoothDSolver::SmoothDSolver(const Problem& problem, const SolverConfig& config, double r_bar, VertexDB& db,
                             TrialCounter& counter, SolveHooks hooks)
    : problem_(&problem),
      config_(&config),
      r_bar_(r_bar),
      db_(&db),
      counter_(&counter),
      hooks_(std::move(hooks)),
      partition_(db),
      root_diagonal_(problem.diagonal()) {
  if (!(r_bar > 1.0)) throw ConfigError("reliability parameter must be > 1");
  // Restarts inherit every earlier trial as incumbent candidates.
  for (std::size_t i = 0; i < db.size(); ++i) {
    if (!have_incumbent_ || db.record(i).value < db.record(incumbent_).value) {
      incumbent_ = i;
      have_incumbent_ = true;
    }
  }
}

void SmoothDSolver::on_new_record(std::size_t index) {
  if (!have_incumbent_ || db_->record(index).value < db_->record(incumbent_).value) {
    incumbent_ = index;
    have_incumbent_ = true;
  }
  if (hooks_.target && hooks_.target(db_->record(index))) throw TargetHit{};
}

void SmoothDSolver::cache_interval(IntervalId id) {
  const Hyperinterval& h = partition_[id];
  if (packed_.size() <= id) packed_.resize(id + 1);
  packed_[id] = {h.f_a, h.f_b, h.dir_deriv_a, h.dir_deriv_b, h.delta};
  m_hat_ = std::max(m_hat_, h.w);
}

void SmoothDSolver::initialize() {
  if (!partition_.empty() || halted_) throw ContractError("solver already initialized");
  const std::size_t n = problem_->dimension();
  const VertexKey a(n, TernaryFraction::zero());
  const VertexKey b(n, TernaryFraction::one());
  const NewRecordHook hook = [this](std::size_t i) { on_new_record(i); };
  try {
    const auto la = acquire_one(*db_, a, *problem_, *counter_, hook);
    const auto lb = acquire_one(*db_, b, *problem_, *counter_, hook);
    cache_interval(partition_.add_root(la.index, lb.index));
  } catch (const TargetHit&) {
    halted_ = StopReason::Target;
  } catch (const BudgetExhausted&) {
    halted_ = StopReason::Budget;
  }
  k_ = 1;
}

std::vector<Characteristic> SmoothDSolver::characteristics(double m) const {
  std::vector<Characteristic> out;
  out.reserve(partition_.size());
  for (const auto& h : partition_.intervals()) out.push_back(characteristic(h, m));
  return out;
}

IterationReport SmoothDSolver::iterate() {
  IterationReport report;
  report.k = k_;
  if (halted_) {
    report.stop = halted_;
    report.p = p();
    report.M = M();
    return report;
  }
  if (partition_.empty()) throw ContractError("iterate() before initialize()");

  const auto& intervals = partition_.intervals();

  // estimate
  const double r = schedule_r(r_bar_, config_->c, k_);
  m_ = estimate_m(m_hat_, r, config_->xi);

  // characteristics and selection
  // Same result as select_interval over characteristic(): strict < keeps
  // the lowest id on ties.
  IntervalId t = 0;
  double best = std::numeric_limits<double>::infinity();
  bool denominators_ok = true;
  for (std::size_t i = 0; i < packed_.size(); ++i) {
    const Packed& q = packed_[i];
    denominators_ok &= m_ * q.delta + q.ddb - q.dda > 0.0;
    const double R = characteristic_R(q.f_a, q.f_b, q.dda, q.ddb, q.delta, m_);
    if (R < best || i == 0) {
      best = R;
      t = i;
    }
  }
  if (!denominators_ok) throw ContractError("characteristic denominator is not positive");
  const Hyperinterval& selected = intervals[t];
  report.r = r;
  report.m = m_;
  report.t = t;
  report.R_t = best;
  report.delta_t = selected.delta;

  // stopping rule
  if (check_stop(selected.delta, root_diagonal_, config_->eps)) {
    halted_ = StopReason::Tolerance;
    report.stop = halted_;
    report.p = p();
    report.M = M();
    return report;
  }

  // new trial points
  const auto [u, v] = generate_uv(selected.a_key, selected.b_key, problem_->lower(), problem_->upper(),
                                  config_->depth_cap);
  const std::uint64_t p_before = p();
  const NewRecordHook hook = [this](std::size_t i) { on_new_record(i); };
  try {
    const AcquiredTrials acquired = acquire_trials(*db_, u, v, *problem_, *counter_, hook);
    report.new_trials = acquired.new_trials;
    // split
    // m_hat_ stays a running max over every interval created so far
    for (IntervalId id : partition_.subdivide(t, acquired.u_record, acquired.v_record)) cache_interval(id);
    ++k_;
  } catch (const TargetHit&) {
    halted_ = StopReason::Target;
  } catch (const BudgetExhausted&) {
    halted_ = StopReason::Budget;
  }
  if (halted_) report.new_trials = static_cast<int>(p() - p_before);
  report.stop = halted_;
  report.p = p();
  report.M = M();
  return report;
}

namespace {

void run_rung(const Problem& problem, const SolverConfig& config, double r_bar, VertexDB& db, TrialCounter& counter,
              const SolveHooks& hooks, RunResult& result) {
  SmoothDSolver solver(problem, config, r_bar, db, counter, hooks);
  solver.initialize();
  std::uint64_t iterations = 0;
  while (!solver.halted()) {
    const IterationReport report = solver.iterate();
    if (!report.stop || *report.stop != StopReason::Tolerance) ++iterations;
    if (hooks.on_iteration) hooks.on_iteration(report);
  }
  const std::size_t previous_incumbent = result.incumbent_index;
  const bool had_previous = !result.rungs.empty();

  result.incumbent_index = solver.incumbent_index();
  result.incumbent_point = solver.incumbent_point();
  result.incumbent_value = solver.incumbent_value();
  result.incumbent_changed = had_previous && previous_incumbent != result.incumbent_index;
  result.trials = counter.count();
  result.iterations += iterations;
  result.stop_reason = *solver.halted();
  result.r_bar = r_bar;
  result.reuse_hits = db.reuse_hits();
  result.intervals = solver.M();
  result.rungs.push_back({r_bar, iterations, counter.count(), result.stop_reason, result.incumbent_index});
}

}  // namespace

RunResult solve(const Problem& problem, const SolverConfig& config, const SolveHooks& hooks) {
  config.validate();
  RunResult result;
  result.db = std::make_shared<VertexDB>(problem.lower(), problem.upper());
  TrialCounter counter(config.max_trials);
  const std::vector<double> ladder = config.r_ladder.empty() ? std::vector<double>{config.r_bar} : config.r_ladder;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    run_rung(problem, config, ladder[i], *result.db, counter, hooks, result);
    if (result.stop_reason != StopReason::Tolerance) break;
  }
  return result;
}

RunResult restart_with(const Problem& problem, const SolverConfig& config, const RunResult& previous, double new_r_bar,
                       const SolveHooks& hooks) {
  config.validate();
  if (!previous.db) throw ContractError("previous run did not retain its trial pool");
  if (!(new_r_bar > previous.r_bar)) throw ConfigError("restart requires a larger reliability parameter");
  RunResult result = previous;
  TrialCounter counter(config.max_trials, previous.trials);
  run_rung(problem, config, new_r_bar, *result.db, counter, hooks, result);
  result.incumbent_changed = result.incumbent_index != previous.incumbent_index;
  return result;
}

void write_trial_log(std::ostream& out, const std::vector<TrialRecord>& log, const std::string& summary) {
  const std::size_t n = log.empty() ? 0 : log.front().point.size();
  out << "trial_index";
  for (std::size_t j = 1; j <= n; ++j) out << ",x" << j;
  out << ",f";
  for (std::size_t j = 1; j <= n; ++j) out << ",g" << j;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < log.size(); ++i) {
    const TrialRecord& r = log[i];
    out << (i + 1);
    for (double x : r.point) out << ',' << x;
    out << ',' << r.value;
    for (std::size_t j = 0; j < n; ++j) {
      out << ',';
      if (j < r.gradient.size()) out << r.gradient[j];
    }
    out << '\n';
  }
  out << "# " << summary << '\n';
  out.precision(old_precision);
}

std::string summary_line(const RunResult& result) {
  std::ostringstream s;
  s.precision(17);
  s << "summary incumbent=";
  for (std::size_t j = 0; j < result.incumbent_point.size(); ++j) {
    if (j) s << ';';
    s << result.incumbent_point[j];
  }
  s << " value=" << result.incumbent_value << " trials=" << result.trials << " iterations=" << result.iterations
    << " stop=" << to_string(result.stop_reason) << " reuse_hits=" << result.reuse_hits << " r_bar=" << result.r_bar;
  return s.str();
}

}  // namespace lipgrad
