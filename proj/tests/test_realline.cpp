#include "doctest.h"
#include "oracles.hpp"

#include "muskat/error.hpp"
#include "muskat/quadrature.hpp"
#include "muskat/realline.hpp"
#include "muskat/spline.hpp"

#include <cmath>

using namespace muskat;
using oracle::pi;

namespace {

double gauss(double x) { return 0.5 * std::exp(-x * x); }
double caso1(double x) { return (pi / 2 - 1e-4) * std::exp(-std::pow(std::abs(x), 6)); }

// Stable cosh u ∓ cos c.
double ch_minus_cos(double u, double c) { return 2.0 * (std::pow(std::sinh(u / 2), 2) + std::pow(std::sin(c / 2), 2)); }
double ch_plus_cos(double u, double c) { return 2.0 * (std::pow(std::sinh(u / 2), 2) + std::pow(std::cos(c / 2), 2)); }

double deep_oracle(const LineInterface& itf, double x) {
  const double fx = itf.value(x), dfx = itf.slope(x);
  return oracle::midpoint_pv(
      [&](double e) {
        const double d = fx - itf.value(x - e);
        return (dfx - itf.slope(x - e)) * e / (e * e + d * d);
      },
      2.0 * itf.half_width());
}

double confined_oracle(const LineInterface& itf, double x) {
  const double fx = itf.value(x), dfx = itf.slope(x);
  return oracle::midpoint_pv(
      [&](double e) {
        const double fy = itf.value(x - e), dfy = itf.slope(x - e);
        return (dfx - dfy) * std::sinh(e) / ch_minus_cos(e, fx - fy) +
               (dfx + dfy) * std::sinh(e) / ch_plus_cos(e, fx + fy);
      },
      2.0 * itf.half_width());
}

} // namespace

TEST_CASE("natural spline basics") {
  std::vector<double> x(20), zero(20, 0.0);
  for (int j = 0; j < 20; ++j) x[j] = -1.0 + 2.0 * j / 19.0;
  const CubicSpline s0(x, zero);
  for (double t = -1.0; t <= 1.0; t += 0.013) CHECK(s0(t) == 0.0);

  std::vector<double> cube(20);
  for (int j = 0; j < 20; ++j) cube[j] = x[j] * x[j] * x[j];
  const CubicSpline nak(x, cube, SplineEnd::not_a_knot);
  CHECK(std::abs(nak(0.5) - 0.125) < 1e-10);
  CHECK(std::abs(nak.derivative(0.5) - 0.75) < 1e-10);

  const CubicSpline nat(x, cube);
  for (int j = 0; j < 20; ++j) CHECK(std::abs(nat(x[j]) - cube[j]) < 1e-12);
  CHECK(std::abs(nat.second_derivative(-1.0)) < 1e-12);
  CHECK(std::abs(nat.second_derivative(1.0)) < 1e-12);

  CHECK_THROWS_AS(CubicSpline({0.0, 1.0, 1.0, 2.0}, {0.0, 0.0, 0.0, 0.0}), InputError);
  CHECK_THROWS_AS(CubicSpline({0.0, 1.0, 2.0}, {0.0, 0.0, 0.0}), InputError);
}

TEST_CASE("spline interpolation error on e^{-x^6}") {
  auto worst_error = [](std::size_t n) {
    const auto itf = LineInterface::sample(n, 10.0, [](double x) { return std::exp(-std::pow(x, 6)); });
    double worst = 0.0;
    const std::size_t fine = 10 * n;
    for (std::size_t i = 0; i <= fine; ++i) {
      const double x = -10.0 + 20.0 * static_cast<double>(i) / fine;
      worst = std::max(worst, std::abs(itf.value(x) - std::exp(-std::pow(x, 6))));
    }
    for (std::size_t j = 0; j < itf.size(); ++j)
      CHECK(itf.spline()(itf.nodes()[j]) == doctest::Approx(itf.values()[j]).epsilon(1e-12));
    return worst;
  };
  // Fourth-order convergence; 1e-6 needs about 1000 nodes for this profile
  // (the fourth derivative peaks near |x| = 1).
  const double e300 = worst_error(300), e600 = worst_error(600);
  CHECK(e300 < 6e-5);
  CHECK(e300 / e600 > 14.0);
  CHECK(worst_error(1000) < 1e-6);
}

TEST_CASE("line interface validation") {
  CHECK_THROWS_AS(LineInterface::sample(6, 10.0, gauss), InputError);
  CHECK_THROWS_AS(LineInterface({-10, -5, 0, 1, 2, 3, 4, 9}, std::vector<double>(8, 0.0)), InputError);
  const auto flat = LineInterface::sample(64, 10.0, [](double) { return 0.2; });
  CHECK_THROWS_AS(flat.check_far_field(), InputError);
  LineInterface::sample(64, 10.0, gauss).check_far_field();
  const auto itf = LineInterface::sample(64, 10.0, gauss);
  CHECK_THROWS_AS(pv_integral_deep(itf, 10.0, {}), ParameterError);
  CHECK(itf.value(25.0) == itf.right_far_value());
  CHECK(itf.slope(-25.0) == 0.0);
}

TEST_CASE("adaptive Lobatto on known integrals") {
  CHECK(adaptive_lobatto([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12).value ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
  CHECK(adaptive_lobatto([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-10).value ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(adaptive_lobatto([](double x) { return std::sin(x); }, 0.0, pi, 1e-12).value ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("deep principal value against a midpoint oracle") {
  const QuadratureSettings q;
  const auto zero = LineInterface::sample(300, 10.0, [](double) { return 0.0; });
  CHECK(pv_integral_deep(zero, 0.0, q) == 0.0);
  const auto itf = LineInterface::sample(300, 10.0, gauss);
  for (double x : {0.0, 0.37, -1.3}) {
    const auto r = pv_integral_deep_detailed(itf, x, q);
    CHECK(std::abs(r.value - deep_oracle(itf, x)) < 5 * q.abs_tol);
    CHECK(r.tail_bound < 1e-8);
  }
  const auto bump = LineInterface::sample(300, 10.0, caso1);
  CHECK(std::abs(pv_integral_deep(bump, 0.0, q) - deep_oracle(bump, 0.0)) < 5 * q.abs_tol);
}

TEST_CASE("confined principal value against a midpoint oracle") {
  const QuadratureSettings q;
  const auto zero = LineInterface::sample(300, 10.0, [](double) { return 0.0; });
  CHECK(pv_integral_confined(zero, 0.0, q) == 0.0);

  const auto itf = LineInterface::sample(300, 10.0, gauss);
  for (double x : {0.0, 0.37})
    CHECK(std::abs(pv_integral_confined(itf, x, q) - confined_oracle(itf, x)) < 5 * q.abs_tol);

  const auto bump = LineInterface::sample(300, 10.0, caso1);
  CHECK(std::abs(pv_integral_confined(bump, 0.0, q) - confined_oracle(bump, 0.0)) < 5 * q.abs_tol);

  // Odd bump at its maximum: the right-hand side (density jump > 0) pulls it down.
  const auto odd = LineInterface::sample(300, 10.0, [](double x) { return 0.3 * x * std::exp(0.5 - x * x / 2); });
  const double xm = 1.0;
  const double pv = pv_integral_confined(odd, xm, q);
  CHECK(pv < 0.0);
  CHECK(std::abs(pv - confined_oracle(odd, xm)) < 5 * q.abs_tol);

  const auto high = LineInterface::sample(64, 10.0, [](double x) { return 1.6 * std::exp(-x * x); });
  CHECK_THROWS_AS(check_confined_admissible(high), AdmissibilityError);
  CHECK_THROWS_AS(pv_integral_confined(high, 0.0, q), AdmissibilityError);
}

TEST_CASE("lambda on the line against a midpoint oracle") {
  const QuadratureSettings q;
  const auto itf = LineInterface::sample(300, 10.0, gauss);
  for (double x : {0.0, 0.8, -2.1}) {
    const double fx = itf.value(x);
    const double R = 60.0;
    const std::size_t m = 400000;
    auto run = [&](std::size_t cells) {
      const double h = R / cells;
      double s = 0.0;
      for (std::size_t i = 0; i < cells; ++i) {
        const double e = (i + 0.5) * h;
        s += (2 * fx - itf.value(x - e) - itf.value(x + e)) / (e * e);
      }
      return s * h;
    };
    const double body = (4 * run(2 * m) - run(m)) / 3;
    const double tail = (2 * fx - itf.left_far_value() - itf.right_far_value()) / R;
    CHECK(std::abs(lambda_line(itf, x, q) - (body + tail) / pi) < 1e-7);
  }
}

TEST_CASE("line norms of a gaussian") {
  const QuadratureSettings q;
  const auto itf = LineInterface::sample(400, 10.0, gauss);
  CHECK(line_l2_norm(itf) == doctest::Approx(std::sqrt(0.25 * std::sqrt(pi / 2))).epsilon(1e-7));
  CHECK(line_h1_seminorm(itf) == doctest::Approx(std::sqrt(std::sqrt(pi) / (2 * std::pow(2.0, 1.5)))).epsilon(1e-6));
  CHECK(line_hhalf_seminorm(itf, q) == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(std::abs(line_integrate_slope(itf, [](double s) { return s; })) < 1e-12);
}
