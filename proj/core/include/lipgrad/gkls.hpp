#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lipgrad/objective.hpp"

namespace lipgrad::gkls {

inline constexpr std::uint64_t kDefaultSeed = 0x6b6c73u;

/// Seed from the LIPGRAD_SEED environment variable, or `fallback`.
std::uint64_t seed_from_environment(std::uint64_t fallback = kDefaultSeed);

/// Parameters of a class of 100 test functions on the canonical box [-1, 1]^N.
struct ClassParams {
  std::size_t dimension = 2;
  std::size_t num_minima = 10;    ///< including the global one
  double global_value = -1.0;
  double distance = 0.9;          ///< from the global minimizer to the paraboloid vertex
  double radius = 0.2;            ///< attraction radius of the global minimizer
  double eps = 1e-4;              ///< accuracy coefficient of the solved check
  int class_id = 0;               ///< 1..8 for the standard classes, 0 for custom
  std::uint64_t seed = kDefaultSeed;

  void validate() const;
};

/// The eight standard classes (two per dimension N = 2..5, simple then hard).
ClassParams standard_class(int class_id, std::uint64_t seed = kDefaultSeed);

inline constexpr int kStandardClassCount = 8;
inline constexpr int kFunctionsPerClass = 100;

/// A region in which the paraboloid is replaced by a C1 cubic with a
/// minimum `value` at `center`.
struct Ball {
  Point center;
  double radius = 0.0;
  double value = 0.0;
};

/// Paraboloid ||x - T||^2 + t distorted by disjoint balls. Ball 0 holds the
/// unique global minimum.
class GklsFunction {
public:
  GklsFunction(ClassParams params, int index, Point vertex, double vertex_value, std::vector<Ball> balls);

  std::size_t dimension() const { return vertex_.size(); }
  const ClassParams& params() const { return params_; }
  int index() const { return index_; }
  const Point& vertex() const { return vertex_; }
  double vertex_value() const { return vertex_value_; }
  const std::vector<Ball>& balls() const { return balls_; }

  /// Throw DomainError outside [-1, 1]^N.
  double value(std::span<const double> x) const;
  std::vector<double> gradient(std::span<const double> x) const;
  Evaluation evaluate(std::span<const double> x) const;

  /// (M_1, f*) of the global ball.
  std::pair<Point, double> global_minimizer() const;

  /// Plain-text description: vertex, its value and every ball.
  void describe(std::ostream& out) const;

  /// The function as a Problem on [-1, 1]^N with its known optimum and a
  /// value-only evaluator.
  Problem as_problem() const;

private:
  void check_domain(std::span<const double> x) const;
  /// Ball containing x in its open interior, or -1.
  int active_ball(std::span<const double> x) const;

  ClassParams params_;
  int index_;
  Point vertex_;
  double vertex_value_;
  std::vector<Ball> balls_;
};

/// Deterministic in (params, index). Throws GenerationError when the balls
/// cannot be placed within the bounded number of resampling rounds.
GklsFunction generate_function(const ClassParams& params, int index);

}  // namespace lipgrad::gkls
