#include "lipgrad/characteristic.hpp"

#include <algorithm>
#include <cmath>

#include "lipgrad/errors.hpp"
#include "lipgrad/partition.hpp"

namespace lipgrad {

double interval_w(double f_a, double f_b, double dir_deriv_a, double dir_deriv_b, double delta) {
  const double bracket = 2.0 * (f_a - f_b) + (dir_deriv_a + dir_deriv_b) * delta;
  const double slope_gap = (dir_deriv_b - dir_deriv_a) * delta;
  const double d = std::hypot(bracket, slope_gap);
  return (std::abs(bracket) + d) / (delta * delta);
}

double estimate_m(double m_hat, double r, double xi) { return r * std::max(xi, m_hat); }

double schedule_r(double r_bar, double c, std::size_t k) {
  if (k == 0) throw ContractError("iteration index must start at 1");
  return r_bar + c / static_cast<double>(k);
}

Characteristic characteristic(double f_a, double f_b, double dir_deriv_a, double dir_deriv_b, double delta,
                              double m) {
  const double denom = m * delta + dir_deriv_b - dir_deriv_a;
  if (!(denom > 0.0)) {
    throw ContractError("characteristic denominator is not positive; m was not produced by the estimator");
  }
  const double shift = delta / 4.0 + (dir_deriv_b - dir_deriv_a) / (4.0 * m);
  const double common = (f_a - f_b + dir_deriv_b * delta + 0.5 * m * delta * delta) / denom;

  Characteristic c;
  c.y = shift + common;
  c.y_prime = -shift + common;
  c.B = dir_deriv_b - 2.0 * m * c.y + m * delta;

  const double slope_right = m * c.y + c.B;
  const double slope_left = m * c.y_prime + c.B;
  if (slope_right * slope_left < 0.0) {
    c.branch = Branch::Interior;
    c.x_hat = 2.0 * c.y - dir_deriv_b / m - delta;
    c.phi_x_hat = f_b - dir_deriv_b * delta - 0.5 * m * delta * delta + m * c.y * c.y - 0.5 * m * c.x_hat * c.x_hat;
    c.R = std::min({f_a, c.phi_x_hat, f_b});
  } else {
    c.branch = Branch::Endpoints;
    c.R = std::min(f_a, f_b);
  }
  return c;
}

Characteristic characteristic(const Hyperinterval& interval, double m) {
  Characteristic c =
      characteristic(interval.f_a, interval.f_b, interval.dir_deriv_a, interval.dir_deriv_b, interval.delta, m);
  c.id = interval.id;
  return c;
}

std::size_t select_interval(std::span<const double> characteristics) {
  if (characteristics.empty()) throw ContractError("no characteristics to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < characteristics.size(); ++i) {
    if (characteristics[i] < characteristics[best]) best = i;
  }
  return best;
}

bool check_stop(double selected_delta, double root_diagonal, double eps) {
  return selected_delta <= eps * root_diagonal;
}

}  // namespace lipgrad
