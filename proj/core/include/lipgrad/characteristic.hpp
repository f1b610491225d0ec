#pragma once

#include <cstddef>
#include <span>

namespace lipgrad {

struct Hyperinterval;
struct SolverConfig;

/// Local estimate w_i of the gradient Lipschitz constant from the data at
/// both ends of a diagonal of length `delta` (f values and directional
/// derivatives along a -> b). Exact for quadratics restricted to the diagonal.
double interval_w(double f_a, double f_b, double dir_deriv_a, double dir_deriv_b, double delta);

/// m = r * max(xi, m_hat).
double estimate_m(double m_hat, double r, double xi);

/// r_k = r_bar + C / k, k >= 1.
double schedule_r(double r_bar, double c, std::size_t k);

enum class Branch {
  Interior,  ///< auxiliary derivative changes sign: interior minimum candidate
  Endpoints, ///< minimum attained at an end of the diagonal
};

/// Minimum of the smooth auxiliary minorant built on one diagonal.
struct Characteristic {
  std::size_t id = 0;
  double R = 0.0;
  Branch branch = Branch::Endpoints;
  double y = 0.0;        ///< right tangency point, measured from a along the diagonal
  double y_prime = 0.0;  ///< left tangency point
  double B = 0.0;        ///< linear coefficient of the middle parabola's derivative
  double x_hat = 0.0;    ///< minimizer of the middle parabola (Interior only)
  double phi_x_hat = 0.0;
};

/// Characteristic of a diagonal from raw endpoint data. Throws ContractError
/// unless m * delta + dir_deriv_b - dir_deriv_a > 0.
Characteristic characteristic(double f_a, double f_b, double dir_deriv_a, double dir_deriv_b, double delta, double m);

Characteristic characteristic(const Hyperinterval& interval, double m);

/// Just R, with the same arithmetic as characteristic(). The caller
/// guarantees a positive denominator. Used in the per-iteration scan.
inline double characteristic_R(double f_a, double f_b, double dir_deriv_a, double dir_deriv_b, double delta,
                               double m) {
  const double denom = m * delta + dir_deriv_b - dir_deriv_a;
  const double shift = delta / 4.0 + (dir_deriv_b - dir_deriv_a) / (4.0 * m);
  const double common = (f_a - f_b + dir_deriv_b * delta + 0.5 * m * delta * delta) / denom;
  const double y = shift + common;
  const double y_prime = -shift + common;
  const double B = dir_deriv_b - 2.0 * m * y + m * delta;
  const double ends = f_a < f_b ? f_a : f_b;
  if ((m * y + B) * (m * y_prime + B) < 0.0) {
    const double x_hat = 2.0 * y - dir_deriv_b / m - delta;
    const double phi = f_b - dir_deriv_b * delta - 0.5 * m * delta * delta + m * y * y - 0.5 * m * x_hat * x_hat;
    return phi < ends ? phi : ends;
  }
  return ends;
}

/// Index of the smallest R; ties go to the smallest index. Throws on empty input.
std::size_t select_interval(std::span<const double> characteristics);

/// True when the selected diagonal is no longer than eps times the root diagonal.
bool check_stop(double selected_delta, double root_diagonal, double eps);

}  // namespace lipgrad
