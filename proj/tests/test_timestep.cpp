#include "doctest.h"
#include "oracles.hpp"

#include "muskat/error.hpp"
#include "muskat/timestep.hpp"

#include <cmath>

using namespace muskat;
using oracle::pi;

namespace {

constexpr double l = pi / 2;

PeriodicField field(std::size_t n, const std::function<double(double)>& fn) { return PeriodicField::sample(n, fn); }

State integrate_rk45(State y, const Rhs& rhs, double T, StepController c) {
  Rk45Stepper st(c);
  double t = 0.0;
  while (t < T) {
    const auto r = st.step(y, t, rhs, T);
    y = r.state;
    t += r.dt_used;
  }
  return y;
}

} // namespace

TEST_CASE("controller validation") {
  StepController c;
  c.validate();
  c.tol_rel = -1.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = {};
  c.dt_min = 1.0;
  c.dt_max = 0.1;
  CHECK_THROWS_AS(c.validate(), ParameterError);
}

TEST_CASE("rk4 step") {
  const Rhs zero = [](const State& y) { return State(y.size(), 0.0); };
  const State y0{1.0, -2.0, 3.5};
  CHECK(rk4_step(y0, zero, 0.3) == y0);

  const Rhs grow = [](const State& y) { return y; };
  CHECK(std::abs(rk4_step({1.0}, grow, 0.1)[0] - std::exp(0.1)) < 1e-7);

  const std::size_t n = 128;
  const double c = confined_constant(l);
  const Rhs linear = [&](const State& y) {
    auto out = lambda_op(PeriodicField(y)).release();
    for (auto& v : out) v *= -c;
    return out;
  };
  const auto f = field(n, [](double x) { return std::cos(x); });
  const auto step = rk4_step(f.data(), linear, 1e-3);
  const auto exact = semigroup(f, 1e-3, c);
  CHECK(oracle::max_abs_diff(step, exact.data()) / oracle::max_abs(exact.data()) < 1e-14);
}

TEST_CASE("rk45 on scalar problems") {
  const Rhs zero = [](const State& y) { return State(y.size(), 0.0); };
  StepController c;
  c.dt = 1e-3;
  Rk45Stepper st(c);
  State y{2.0};
  double t = 0.0, dt_prev = 0.0;
  for (int i = 0; i < 5; ++i) {
    const auto r = st.step(y, t, zero, 10.0);
    CHECK(r.state == y);
    CHECK(r.error_estimate == 0.0);
    CHECK(r.rejected == 0);
    CHECK(r.dt_used >= dt_prev);
    dt_prev = r.dt_used;
    t += r.dt_used;
  }
  CHECK(st.next_dt() == doctest::Approx(c.dt_max));

  const Rhs decay = [](const State& y) { return State{-y[0]}; };
  StepController tight;
  tight.tol_rel = 1e-8;
  CHECK(std::abs(integrate_rk45({1.0}, decay, 1.0, tight)[0] - std::exp(-1.0)) < 1e-6);

  // t_limit is hit exactly.
  Rk45Stepper s2(tight);
  const auto r = s2.step({1.0}, 0.0, decay, 1e-5);
  CHECK(r.dt_used == doctest::Approx(1e-5));
}

TEST_CASE("rk45 step size underflow") {
  const Rhs blow = [](const State& y) { return State{y[0] * y[0]}; };
  StepController c;
  c.dt_min = 1e-6;
  CHECK_THROWS_AS(integrate_rk45({1.0}, blow, 2.0, c), StepSizeUnderflow);
}

TEST_CASE("rk45 error shrinks with the tolerance on the confined model") {
  const std::size_t n = 128;
  const Rhs rhs = [](const State& y) { return rhs_confined_model(PeriodicField(y), l).release(); };
  const auto f0 = field(n, [](double x) { return 0.5 * l * std::cos(x); }).release();
  StepController ref;
  ref.tol_rel = 1e-13;
  ref.tol_abs = 1e-14;
  const auto exact = integrate_rk45(f0, rhs, 0.5, ref);
  double prev = 1.0;
  for (double tol : {1e-5, 1e-6, 1e-7}) {
    StepController c;
    c.tol_rel = tol;
    c.tol_abs = tol * 1e-2;
    const double err = oracle::max_abs_diff(integrate_rk45(f0, rhs, 0.5, c), exact);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("duhamel step") {
  const std::size_t n = 128;
  const auto zero = field(n, [](double) { return 0.0; });
  CHECK(oracle::max_abs(duhamel_step(zero, l, 0.01).data()) == 0.0);

  // Tiny data: NL is cubic and vanishes below rounding, leaving the linear flow.
  const auto tiny = field(n, [](double x) { return 1e-9 * std::cos(x); });
  const auto d = duhamel_step(tiny, l, 0.01);
  const auto lin = semigroup(tiny, 0.01, confined_constant(l));
  CHECK(oracle::max_abs_diff(d.data(), lin.data()) < 1e-22);

  const auto f0 = field(n, [](double x) { return 0.1 * std::cos(x); });
  const Rhs rhs = [](const State& y) { return rhs_confined_model(PeriodicField(y), l).release(); };
  auto gap = [&](double dt) { return oracle::max_abs_diff(duhamel_step(f0, l, dt).data(), rk4_step(f0.data(), rhs, dt)); };
  const double g1 = gap(1e-3), g2 = gap(5e-4);
  CHECK(g1 / g2 == doctest::Approx(4.0).epsilon(0.1));
}
