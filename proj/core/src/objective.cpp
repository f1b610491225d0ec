#include "lipgrad/objective.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace lipgrad {

Problem::Problem(std::vector<double> lower, std::vector<double> upper, Evaluator evaluator,
                 std::optional<KnownOptimum> known_optimum, std::string name)
    : lower_(std::move(lower)),
      upper_(std::move(upper)),
      evaluator_(std::move(evaluator)),
      known_optimum_(std::move(known_optimum)),
      name_(std::move(name)) {
  if (lower_.empty()) throw ConfigError("problem dimension must be at least 1");
  if (lower_.size() != upper_.size()) throw ConfigError("lower and upper bounds differ in length");
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j]) || !(lower_[j] < upper_[j])) {
      throw ConfigError("degenerate box in coordinate " + std::to_string(j + 1));
    }
  }
  if (!evaluator_) throw ConfigError("problem has no evaluator");
  if (known_optimum_ && known_optimum_->point.size() != lower_.size()) {
    throw ConfigError("known optimum has wrong dimension");
  }
}

double Problem::diagonal() const {
  double sum = 0.0;
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    const double side = upper_[j] - lower_[j];
    sum += side * side;
  }
  return std::sqrt(sum);
}

void TrialCounter::charge() {
  if (exhausted()) {
    throw BudgetExhausted("trial budget of " + std::to_string(*limit_) + " exhausted");
  }
  ++count_;
}

std::string format_point(std::span<const double> point) {
  std::ostringstream out;
  out.precision(17);
  out << '(';
  for (std::size_t j = 0; j < point.size(); ++j) {
    if (j) out << ", ";
    out << point[j];
  }
  out << ')';
  return out.str();
}

namespace {

void check_inside(const Problem& problem, std::span<const double> point) {
  const std::size_t n = problem.dimension();
  if (point.size() != n) {
    throw DomainError("point " + format_point(point) + " has dimension " + std::to_string(point.size()) +
                      ", expected " + std::to_string(n));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!(point[j] >= problem.lower()[j] - kDomainSlack && point[j] <= problem.upper()[j] + kDomainSlack)) {
      throw DomainError("point " + format_point(point) + " lies outside the search box");
    }
  }
}

}  // namespace

TrialRecord evaluate(const Problem& problem, std::span<const double> point, TrialCounter& counter) {
  check_inside(problem, point);
  counter.charge();
  Evaluation e = problem.evaluator()(point);

  bool finite = std::isfinite(e.value) && e.gradient.size() == problem.dimension();
  for (double g : e.gradient) finite = finite && std::isfinite(g);
  if (!finite) {
    throw EvaluationError("objective returned a non-finite value or malformed gradient at " + format_point(point));
  }
  return TrialRecord{Point(point.begin(), point.end()), e.value, std::move(e.gradient)};
}

TrialRecord evaluate_value(const Problem& problem, std::span<const double> point, TrialCounter& counter) {
  check_inside(problem, point);
  counter.charge();
  const double value =
      problem.value_evaluator() ? problem.value_evaluator()(point) : problem.evaluator()(point).value;
  if (!std::isfinite(value)) {
    throw EvaluationError("objective returned a non-finite value at " + format_point(point));
  }
  return TrialRecord{Point(point.begin(), point.end()), value, {}};
}

namespace {

Evaluation sphere(std::span<const double> x, double shift) {
  Evaluation e{0.0, std::vector<double>(x.size())};
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - shift;
    e.value += d * d;
    e.gradient[j] = 2.0 * d;
  }
  return e;
}

// Narrow deep well at 0.8 hidden next to a broad shallow one at 0.25, each a
// quartic bump -depth (1 - s^2)^2 that flattens to 0 outside its radius.
double well_piece(double x, double center, double radius, double depth, double& slope) {
  const double s = (x - center) / radius;
  if (std::abs(s) >= 1.0) {
    slope = 0.0;
    return 0.0;
  }
  const double q = 1.0 - s * s;
  slope = depth * 4.0 * q * s / radius;
  return -depth * q * q;
}

Evaluation bimodal(std::span<const double> x) {
  double s1 = 0.0, s2 = 0.0;
  const double v = well_piece(x[0], 0.25, 0.25, 0.6, s1) + well_piece(x[0], 0.8, 0.06, 1.0, s2);
  return {v, {s1 + s2}};
}

Evaluation camel(std::span<const double> x) {
  const double a = x[0], b = x[1];
  const double a2 = a * a, a4 = a2 * a2;
  Evaluation e;
  e.value = (4.0 - 2.1 * a2 + a4 / 3.0) * a2 + a * b + (-4.0 + 4.0 * b * b) * b * b;
  e.gradient = {8.0 * a - 8.4 * a2 * a + 2.0 * a4 * a + b, a - 8.0 * b + 16.0 * b * b * b};
  return e;
}

Evaluation rosenbrock(std::span<const double> x) {
  Evaluation e{0.0, std::vector<double>(x.size(), 0.0)};
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    const double t = x[j + 1] - x[j] * x[j];
    const double u = 1.0 - x[j];
    e.value += 100.0 * t * t + u * u;
    e.gradient[j] += -400.0 * x[j] * t - 2.0 * u;
    e.gradient[j + 1] += 200.0 * t;
  }
  return e;
}

void require_dimension(const std::string& name, std::size_t got, std::size_t want) {
  if (got != want) {
    throw ConfigError("function '" + name + "' requires dimension " + std::to_string(want));
  }
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"sphere", "offset_sphere", "well", "bimodal", "camel", "rosenbrock"};
}

Problem builtin_problem(const std::string& name, std::size_t n) {
  if (n == 0) throw ConfigError("dimension must be at least 1");
  if (name == "sphere") {
    return Problem(std::vector<double>(n, -1.0), std::vector<double>(n, 1.0),
                   [](std::span<const double> x) { return sphere(x, 0.0); },
                   KnownOptimum{Point(n, 0.0), 0.0}, name);
  }
  if (name == "offset_sphere") {
    return Problem(std::vector<double>(n, 0.0), std::vector<double>(n, 1.0),
                   [](std::span<const double> x) { return sphere(x, 1.0 / 3.0); },
                   KnownOptimum{Point(n, 1.0 / 3.0), 0.0}, name);
  }
  if (name == "well") {
    require_dimension(name, n, 1);
    return Problem({0.0}, {1.0},
                   [](std::span<const double> x) {
                     return Evaluation{x[0] * (x[0] - 1.0), {2.0 * x[0] - 1.0}};
                   },
                   KnownOptimum{{0.5}, -0.25}, name);
  }
  if (name == "bimodal") {
    require_dimension(name, n, 1);
    return Problem({0.0}, {1.0}, bimodal, KnownOptimum{{0.8}, -1.0}, name);
  }
  if (name == "camel") {
    require_dimension(name, n, 2);
    return Problem({-3.0, -2.0}, {3.0, 2.0}, camel,
                   KnownOptimum{{0.08984201368301331, -0.7126564032704135}, -1.031628453489877}, name);
  }
  if (name == "rosenbrock") {
    if (n < 2) throw ConfigError("function 'rosenbrock' requires dimension >= 2");
    return Problem(std::vector<double>(n, -2.0), std::vector<double>(n, 2.0), rosenbrock,
                   KnownOptimum{Point(n, 1.0), 0.0}, name);
  }
  throw ConfigError("unknown function '" + name + "'");
}

}  // namespace lipgrad
