#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lipgrad/errors.hpp"

namespace lipgrad {

using Point = std::vector<double>;

/// Value and gradient produced by one call of an objective.
struct Evaluation {
  double value = 0.0;
  std::vector<double> gradient;
};

/// One trial: a point together with f and its full gradient there.
struct TrialRecord {
  Point point;
  double value = 0.0;
  std::vector<double> gradient;
};

/// Must be pure: the same point always yields the same Evaluation.
using Evaluator = std::function<Evaluation(std::span<const double>)>;

/// Optional cheaper value-only path used by gradient-free methods.
using ValueEvaluator = std::function<double(std::span<const double>)>;

struct KnownOptimum {
  Point point;
  double value = 0.0;
};

/// Box-constrained minimization problem min f(x), a <= x <= b, with a
/// gradient-producing black box. The gradient Lipschitz constant is never
/// supplied; solvers estimate it from the trials.
class Problem {
public:
  Problem(std::vector<double> lower, std::vector<double> upper, Evaluator evaluator,
          std::optional<KnownOptimum> known_optimum = std::nullopt, std::string name = {});

  std::size_t dimension() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const Evaluator& evaluator() const { return evaluator_; }
  const std::optional<KnownOptimum>& known_optimum() const { return known_optimum_; }
  const std::string& name() const { return name_; }

  void set_value_evaluator(ValueEvaluator f) { value_evaluator_ = std::move(f); }
  const ValueEvaluator& value_evaluator() const { return value_evaluator_; }

  /// Euclidean length of the main diagonal of the whole box.
  double diagonal() const;

private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  Evaluator evaluator_;
  ValueEvaluator value_evaluator_;
  std::optional<KnownOptimum> known_optimum_;
  std::string name_;
};

/// Counts trials of a single solver run. Optionally enforces a budget: once
/// `limit` trials were charged, the next charge throws BudgetExhausted.
class TrialCounter {
public:
  explicit TrialCounter(std::optional<std::uint64_t> limit = std::nullopt, std::uint64_t start = 0)
      : count_(start), limit_(limit) {}

  std::uint64_t count() const { return count_; }
  std::optional<std::uint64_t> limit() const { return limit_; }
  void set_limit(std::optional<std::uint64_t> limit) { limit_ = limit; }
  bool exhausted() const { return limit_ && count_ >= *limit_; }

  void charge();

private:
  std::uint64_t count_ = 0;
  std::optional<std::uint64_t> limit_;
};

inline std::uint64_t trial_count(const TrialCounter& counter) { return counter.count(); }

/// Absolute per-coordinate slack accepted by the domain check.
inline constexpr double kDomainSlack = 1e-12;

/// Evaluates f and its gradient at `point` and charges one trial.
/// Throws DomainError if the point leaves the box and EvaluationError on
/// non-finite output. The budget is checked before the objective runs.
TrialRecord evaluate(const Problem& problem, std::span<const double> point, TrialCounter& counter);

/// Value-only trial for gradient-free methods: same checks and accounting
/// as evaluate(), but the returned record has an empty gradient.
TrialRecord evaluate_value(const Problem& problem, std::span<const double> point, TrialCounter& counter);

std::string format_point(std::span<const double> point);

/// Named analytic test functions for the CLI and the tests.
///   sphere        sum x_j^2 on [-1,1]^N
///   offset_sphere sum (x_j - 1/3)^2 on [0,1]^N
///   well          x(x - 1) on [0,1] (N must be 1)
///   bimodal       two parabolic wells on [0,1] (N must be 1), global at 0.8
///   camel         six-hump camel on [-3,3]x[-2,2] (N must be 2)
///   rosenbrock    on [-2,2]^N (N >= 2)
Problem builtin_problem(const std::string& name, std::size_t dimension);

std::vector<std::string> builtin_names();

}  // namespace lipgrad
