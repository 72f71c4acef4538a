#include "doctest.h"
#include "oracles.hpp"

#include "muskat/diagnostics.hpp"
#include "muskat/error.hpp"

#include <cmath>

using namespace muskat;
using oracle::pi;

namespace {

constexpr double l = pi / 2;

PeriodicField field(std::size_t n, const std::function<double(double)>& fn) { return PeriodicField::sample(n, fn); }

std::size_t count_failed(const std::vector<BoundCheck>& checks) {
  std::size_t bad = 0;
  for (const auto& c : checks) bad += (c.applicable && !c.satisfied) ? 1 : 0;
  return bad;
}

} // namespace

TEST_CASE("record of a periodic field") {
  const auto f = field(256, [](double x) { return 0.3 * std::cos(x) + 0.1; });
  RecordContext ctx;
  ctx.l = l;
  const auto r = compute_record(0.5, f, ctx);
  CHECK(r.t == 0.5);
  CHECK(r.linf == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(r.max_f == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(r.min_f == doctest::Approx(-0.2).epsilon(1e-3));
  CHECK(r.mean == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(r.h_half == doctest::Approx(0.3 * std::sqrt(pi)).epsilon(1e-12));
  CHECK(r.odd_residual < 1e-15);
  CHECK(r.amplitude_param == doctest::Approx(0.4 / l).epsilon(1e-14));
  CHECK(r.sigma == doctest::Approx(stability_report(f, l).sigma).epsilon(1e-15));
  CHECK(std::isnan(r.entropy));
  CHECK(record_columns().size() == 29);
}

TEST_CASE("pointwise sigma") {
  const auto z = sigma_pointwise_field(field(64, [](double) { return 0.0; }), l);
  for (std::size_t j = 0; j < z.size(); ++j) CHECK(z[j] == doctest::Approx(1.0 / (1.0 + l * l) - 1.0).epsilon(1e-15));
  const auto s = sigma_pointwise_field(field(256, [](double x) { return l * std::sin(x); }), l);
  CHECK(oracle::max_abs(s.data()) < 1e-12);
  const auto f = field(256, [](double x) { return 0.9 * std::cos(x) + 0.3 * std::sin(2 * x); });
  const auto sig = sigma_pointwise_field(f, l);
  CHECK(*std::max_element(sig.data().begin(), sig.data().end()) == stability_report(f, l).sigma);
}

TEST_CASE("entropy dissipation, spectral and symmetrized") {
  const auto g = field(512, [](double x) { return 1.0 + 0.5 * std::cos(x); });
  const double spec = entropy_dissipation_spectral(g), sym = entropy_dissipation_symmetrized(g);
  CHECK(sym <= 0.0);
  CHECK(std::abs(spec - sym) / std::abs(spec) < 1e-3);
  CHECK(entropy_dissipation_symmetrized(field(64, [](double) { return 2.0; })) == 0.0);
}

TEST_CASE("torus decay bound") {
  CHECK(torus_decay_bound(0.0, 0.5, l) == 0.5);
  for (double t : {0.1, 1.0, 3.0})
    CHECK(torus_decay_bound(t, 0.5, l) == doctest::Approx(torus_decay_bound_closed(t, 0.5, l)).epsilon(1e-12));
  // Degenerate amplitude: almost no decay at small t.
  CHECK(torus_decay_bound(0.1, l - 1e-4, l) > (l - 1e-4) * (1 - 1e-4));
  CHECK_THROWS_AS(decay_bound_linf_torus({}, field(64, [](double x) { return std::cos(x); }), l, 1e-3), CheckRefused);
  CHECK(effective_check_tol(1e-3, 1e-2) >= 5e-3);
  CHECK(effective_check_tol(1e-3, 1e-4) == 1e-3);
}

TEST_CASE("bounds on synthetic series") {
  std::vector<DiagnosticsRecord> s(11);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i].t = 0.1 * i;
    s[i].sigma = -0.5;
    s[i].h_half = 2.0 * std::exp(-s[i].t);
    s[i].h_one = 1.0;
    s[i].linf = 1.0 - 0.01 * i;
    s[i].max_f = s[i].linf;
    s[i].min_f = -s[i].linf;
    s[i].l2 = 1.0;
    s[i].odd_residual = 0.0;
    s[i].even_residual = 0.3;
  }
  const auto h = decay_bound_hhalf(s, 1e-3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(h[i].bound == doctest::Approx(2.0 * std::exp(-0.5 * s[i].t)).epsilon(1e-14));
    CHECK(h[i].applicable);
  }
  const auto e = energy_balance_sigma(s, 1e-3);
  CHECK(e.front().measured == 4.0);
  CHECK(e.front().bound == 4.0);
  CHECK(count_failed(e) == 0);

  const auto line = decay_bound_linf_line(s, l, 1.0, 1e-3);
  CHECK(line.front().bound == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(count_failed(line) == 0);

  CHECK(count_failed(maximum_principle(s)) == 0);
  CHECK(count_failed(parity_check(s, "even")) == 0);
  CHECK(count_failed(parity_check(s, "odd")) == s.size());

  auto up = s;
  up[5].linf = 1.5;
  CHECK(count_failed(maximum_principle(up)) >= 1);

  auto unstable = s;
  unstable[3].sigma = 0.1;
  const auto hu = decay_bound_hhalf(unstable, 1e-3);
  CHECK(hu[2].applicable);
  CHECK_FALSE(hu[3].applicable);
  CHECK_FALSE(hu[10].applicable);

  auto degenerate = s;
  degenerate[0].linf = l - 1e-9;
  const auto dl = decay_bound_linf_line(degenerate, l, 1.0, 1e-3);
  for (const auto& c : dl) CHECK(c.bound == doctest::Approx(l - 1e-9).epsilon(1e-7));
}

TEST_CASE("hermite time integral is exact for cubics") {
  std::vector<DiagnosticsRecord> s(6);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = 0.2 * i;
    s[i].t = t;
    s[i].referee_dissipation = t * t * t;
    s[i].referee_dissipation_rate = 3 * t * t;
  }
  const auto I = cumulative_time_integral(s, &DiagnosticsRecord::referee_dissipation,
                                          &DiagnosticsRecord::referee_dissipation_rate);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(I[i] == doctest::Approx(std::pow(s[i].t, 4) / 4).epsilon(1e-13));
  const auto plain = cumulative_time_integral(s, &DiagnosticsRecord::referee_dissipation);
  CHECK(std::abs(plain.back() - 0.25) > 1e-3);
}

TEST_CASE("balances hold trivially for constant data") {
  RecordContext ctx;
  ctx.g_equation = true;
  ctx.symmetrized = true;
  std::vector<DiagnosticsRecord> c, z;
  const auto g = field(64, [](double) { return 0.8; });
  const auto zero = field(64, [](double) { return 0.0; });
  const auto gt = field(64, [](double) { return 0.0; });
  for (int i = 0; i < 4; ++i) {
    c.push_back(compute_record(0.25 * i, g, ctx, &gt));
    z.push_back(compute_record(0.25 * i, zero, ctx, &gt));
  }
  for (double r : entropy_balance_deep(c, 1e-12, 1e-3).residual) CHECK(std::abs(r) < 1e-12);
  for (double r : referee_energy_balance(c, 1e-12).residual) CHECK(std::abs(r) < 1e-12);
  for (double r : referee_energy_balance(z, 1e-12).residual) CHECK(r == 0.0);
}

TEST_CASE("touching point") {
  const std::size_t n = 256;
  const double a = 0.1;
  const auto f = field(n, [&](double x) { return a * std::cos(x) + l - a; });
  const auto node = find_touch_node(f, l);
  CHECK(node == n / 2);
  CHECK(std::abs(f[node] - l) < 1e-15);
  CHECK_THROWS_AS(find_touch_node(field(n, [](double x) { return 0.5 * std::cos(x); }), l), CheckRefused);

  // Synthetic series obeying dc/dt = 2Λc(l + c) with constant Λ.
  const double lam = -0.3, c0 = -0.1;
  std::vector<DiagnosticsRecord> s(5);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = 0.05 * i;
    const double ratio = c0 / (l + c0) * std::exp(2 * l * lam * t);
    s[i].t = t;
    s[i].touch_value = l;
    s[i].touch_lambda = lam;
    s[i].touch_curvature = l * ratio / (1 - ratio);
    s[i].touch_sigma = 0.0;
  }
  const auto tr = touching_point_tracker(s, l);
  for (const auto& x : tr) {
    CHECK(x.ode_discrepancy < 1e-12);
    CHECK(x.drift == 0.0);
  }
  CHECK(tr.back().exp_factor == doctest::Approx(std::exp(l * lam * 0.2)).epsilon(1e-14));
  std::vector<DiagnosticsRecord> none(2);
  CHECK_THROWS_AS(touching_point_tracker(none, l), CheckRefused);
}
