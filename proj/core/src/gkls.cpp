#include "lipgrad/gkls.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <ostream>
#include <string>

namespace lipgrad::gkls {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream: draw i is a pure function of (key, i), so functions
// are reproducible without carrying generator state around.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next() { return splitmix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t stream_key(const ClassParams& p, int index) {
  std::uint64_t h = splitmix(p.seed);
  auto fold = [&h](std::uint64_t v) { h = splitmix(h ^ v); };
  fold(static_cast<std::uint64_t>(p.class_id));
  fold(p.dimension);
  fold(p.num_minima);
  fold(std::bit_cast<std::uint64_t>(p.global_value));
  fold(std::bit_cast<std::uint64_t>(p.distance));
  fold(std::bit_cast<std::uint64_t>(p.radius));
  fold(static_cast<std::uint64_t>(index));
  return h;
}

double distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - y[j]) * (x[j] - y[j]);
  return std::sqrt(s);
}

bool inside_box(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v >= -1.0 && v <= 1.0; });
}

std::string class_name(const ClassParams& p) {
  return p.class_id > 0 ? "class " + std::to_string(p.class_id) : "custom class (N=" + std::to_string(p.dimension) + ")";
}

// Local minimizers closer than this to another minimizer or to the vertex are
// redrawn; it keeps every ball radius bounded away from zero.
constexpr double kMinSeparation = 0.05;
// Gap above the global value reserved for local minimum values.
constexpr double kLocalValueGap = 0.1;
constexpr int kPlacementRounds = 10000;
constexpr double kParaboloidValue = 0.0;

}  // namespace

std::uint64_t seed_from_environment(std::uint64_t fallback) {
  const char* env = std::getenv("LIPGRAD_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 0);
  if (end == env || *end != '\0') throw ConfigError("LIPGRAD_SEED is not an integer: '" + std::string(env) + "'");
  return v;
}

void ClassParams::validate() const {
  if (dimension < 1) throw ConfigError("GKLS dimension must be at least 1");
  if (num_minima < 1) throw ConfigError("GKLS class needs at least one minimum");
  if (!(radius > 0.0)) throw ConfigError("GKLS attraction radius must be positive");
  if (!(distance > radius)) throw ConfigError("GKLS distance must exceed the attraction radius");
  if (!(distance < 2.0 * std::sqrt(static_cast<double>(dimension)))) {
    throw ConfigError("GKLS distance does not fit in [-1, 1]^N");
  }
  if (!(global_value + kLocalValueGap < kParaboloidValue)) {
    throw ConfigError("GKLS global value must lie below the paraboloid minimum");
  }
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("GKLS accuracy coefficient must lie in (0, 1)");
  if (class_id < 0 || class_id > kStandardClassCount) throw ConfigError("GKLS class id must be 0..8");
}

ClassParams standard_class(int class_id, std::uint64_t seed) {
  struct Row {
    double eps;
    std::size_t n;
    double d;
    double rho;
  };
  static constexpr Row kRows[kStandardClassCount] = {
      {1e-4, 2, 0.90, 0.20}, {1e-4, 2, 0.90, 0.10}, {1e-6, 3, 0.66, 0.20}, {1e-6, 3, 0.90, 0.20},
      {1e-6, 4, 0.66, 0.20}, {1e-6, 4, 0.90, 0.20}, {1e-7, 5, 0.66, 0.30}, {1e-7, 5, 0.66, 0.20},
  };
  if (class_id < 1 || class_id > kStandardClassCount) {
    throw ConfigError("standard GKLS classes are numbered 1..8, got " + std::to_string(class_id));
  }
  const Row& row = kRows[class_id - 1];
  ClassParams p;
  p.dimension = row.n;
  p.num_minima = 10;
  p.global_value = -1.0;
  p.distance = row.d;
  p.radius = row.rho;
  p.eps = row.eps;
  p.class_id = class_id;
  p.seed = seed;
  return p;
}

GklsFunction::GklsFunction(ClassParams params, int index, Point vertex, double vertex_value, std::vector<Ball> balls)
    : params_(std::move(params)),
      index_(index),
      vertex_(std::move(vertex)),
      vertex_value_(vertex_value),
      balls_(std::move(balls)) {}

void GklsFunction::check_domain(std::span<const double> x) const {
  if (x.size() != dimension()) throw DomainError("GKLS point has wrong dimension");
  for (double v : x) {
    if (!(v >= -1.0 - kDomainSlack && v <= 1.0 + kDomainSlack)) {
      throw DomainError("point " + format_point(x) + " lies outside [-1, 1]^N");
    }
  }
}

int GklsFunction::active_ball(std::span<const double> x) const {
  for (std::size_t i = 0; i < balls_.size(); ++i) {
    if (distance(x, balls_[i].center) < balls_[i].radius) return static_cast<int>(i);
  }
  return -1;
}

// Inside ball (M, rho, f_M), with z = x - M, r = |z|, w = T - M, s = <z, w>
// and A = |w|^2 + t - f_M:
//   C(x) = r^2 + 3A r^2/rho^2 - 2A r^3/rho^3 + 2 s r^2/rho^2 - 4 s r/rho + f_M.
// On r = rho this equals the paraboloid with the same gradient, and z = 0 is
// a stationary point with value f_M.
double GklsFunction::value(std::span<const double> x) const {
  check_domain(x);
  const int i = active_ball(x);
  if (i < 0) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - vertex_[j]) * (x[j] - vertex_[j]);
    return s + vertex_value_;
  }
  const Ball& b = balls_[static_cast<std::size_t>(i)];
  double r2 = 0.0, s = 0.0, w2 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double z = x[j] - b.center[j];
    const double w = vertex_[j] - b.center[j];
    r2 += z * z;
    s += z * w;
    w2 += w * w;
  }
  if (r2 == 0.0) return b.value;
  const double r = std::sqrt(r2);
  const double rho = b.radius;
  const double A = w2 + vertex_value_ - b.value;
  return r2 + 3.0 * A * r2 / (rho * rho) - 2.0 * A * r2 * r / (rho * rho * rho) + 2.0 * s * r2 / (rho * rho) -
         4.0 * s * r / rho + b.value;
}

std::vector<double> GklsFunction::gradient(std::span<const double> x) const {
  check_domain(x);
  const std::size_t n = x.size();
  std::vector<double> g(n, 0.0);
  const int i = active_ball(x);
  if (i < 0) {
    for (std::size_t j = 0; j < n; ++j) g[j] = 2.0 * (x[j] - vertex_[j]);
    return g;
  }
  const Ball& b = balls_[static_cast<std::size_t>(i)];
  double r2 = 0.0, s = 0.0, w2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double z = x[j] - b.center[j];
    const double w = vertex_[j] - b.center[j];
    r2 += z * z;
    s += z * w;
    w2 += w * w;
  }
  if (r2 == 0.0) return g;
  const double r = std::sqrt(r2);
  const double rho = b.radius;
  const double A = w2 + vertex_value_ - b.value;
  // Coefficients of z and w in the gradient.
  const double cz = 2.0 + 6.0 * A / (rho * rho) - 6.0 * A * r / (rho * rho * rho) + 4.0 * s / (rho * rho) -
                    4.0 * s / (rho * r);
  const double cw = 2.0 * r2 / (rho * rho) - 4.0 * r / rho;
  for (std::size_t j = 0; j < n; ++j) {
    g[j] = cz * (x[j] - b.center[j]) + cw * (vertex_[j] - b.center[j]);
  }
  return g;
}

Evaluation GklsFunction::evaluate(std::span<const double> x) const { return {value(x), gradient(x)}; }

std::pair<Point, double> GklsFunction::global_minimizer() const {
  return {balls_.front().center, balls_.front().value};
}

void GklsFunction::describe(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << "gkls " << class_name(params_) << " index " << index_ << '\n';
  out << "dimension " << dimension() << '\n';
  out << "seed " << params_.seed << '\n';
  out << "vertex " << format_point(vertex_) << '\n';
  out << "vertex_value " << vertex_value_ << '\n';
  for (std::size_t i = 0; i < balls_.size(); ++i) {
    out << "ball " << (i + 1) << " center " << format_point(balls_[i].center) << " radius " << balls_[i].radius
        << " value " << balls_[i].value << (i == 0 ? " global" : "") << '\n';
  }
  out.precision(old_precision);
}

Problem GklsFunction::as_problem() const {
  const std::size_t n = dimension();
  auto self = std::make_shared<const GklsFunction>(*this);
  Problem problem(std::vector<double>(n, -1.0), std::vector<double>(n, 1.0),
                  [self](std::span<const double> x) { return self->evaluate(x); },
                  KnownOptimum{balls_.front().center, balls_.front().value},
                  "gkls:" + std::to_string(params_.class_id) + ":" + std::to_string(index_));
  problem.set_value_evaluator([self](std::span<const double> x) { return self->value(x); });
  return problem;
}

GklsFunction generate_function(const ClassParams& params, int index) {
  params.validate();
  if (index < 1 || index > kFunctionsPerClass) {
    throw ConfigError("GKLS function index must lie in 1..100, got " + std::to_string(index));
  }
  const std::size_t n = params.dimension;
  CounterRng rng(stream_key(params, index));

  auto uniform_point = [&] {
    Point p(n);
    for (auto& v : p) v = rng.uniform(-1.0, 1.0);
    return p;
  };

  // Vertex and global minimizer at distance d from it, both inside the box.
  Point vertex;
  Point global_center;
  bool placed = false;
  for (int round = 0; round < kPlacementRounds && !placed; ++round) {
    vertex = uniform_point();
    for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
      Point dir(n);
      double norm = 0.0;
      for (auto& v : dir) {
        v = rng.normal();
        norm += v * v;
      }
      norm = std::sqrt(norm);
      if (norm == 0.0) continue;
      global_center.assign(n, 0.0);
      for (std::size_t j = 0; j < n; ++j) global_center[j] = vertex[j] + params.distance * dir[j] / norm;
      placed = inside_box(global_center);
    }
  }
  if (!placed) throw GenerationError("cannot place the global minimizer for " + class_name(params));

  std::vector<Point> centers{global_center};
  for (std::size_t i = 1; i < params.num_minima; ++i) {
    bool ok = false;
    Point c;
    for (int round = 0; round < kPlacementRounds && !ok; ++round) {
      c = uniform_point();
      ok = distance(c, global_center) >= params.radius + kMinSeparation && distance(c, vertex) >= kMinSeparation;
      for (std::size_t j = 1; j < centers.size() && ok; ++j) ok = distance(c, centers[j]) >= kMinSeparation;
    }
    if (!ok) {
      throw GenerationError("cannot place local minimizer " + std::to_string(i + 1) + " for " + class_name(params));
    }
    centers.push_back(std::move(c));
  }

  std::vector<Ball> balls;
  balls.push_back({global_center, params.radius, params.global_value});
  for (std::size_t i = 1; i < centers.size(); ++i) {
    double rho = distance(centers[i], global_center) - params.radius;
    rho = std::min(rho, distance(centers[i], vertex));
    for (std::size_t j = 1; j < centers.size(); ++j) {
      if (j != i) rho = std::min(rho, 0.5 * distance(centers[i], centers[j]));
    }
    rho *= 0.99;
    const double value = rng.uniform(params.global_value + kLocalValueGap, kParaboloidValue);
    balls.push_back({centers[i], rho, value});
  }
  return GklsFunction(params, index, std::move(vertex), kParaboloidValue, std::move(balls));
}

}  // namespace lipgrad::gkls
