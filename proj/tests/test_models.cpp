#include "doctest.h"
#include "oracles.hpp"

#include "muskat/error.hpp"
#include "muskat/models.hpp"

#include <cmath>
#include <random>

using namespace muskat;
using oracle::pi;

namespace {

constexpr double l = pi / 2;
const SpectralOptions raw{false, Admissibility::strict};
const SpectralOptions touching{true, Admissibility::allow_touching};

PeriodicField field(std::size_t n, const std::function<double(double)>& fn) { return PeriodicField::sample(n, fn); }

double caso1(double x) { return (pi / 2 - 1e-4) * std::exp(-std::pow(std::abs(x), 6)); }

} // namespace

TEST_CASE("model kind names and spec validation") {
  for (auto k : {ModelKind::confined_model, ModelKind::deep_model, ModelKind::deep_model_derivative,
                 ModelKind::deep_muskat, ModelKind::confined_muskat})
    CHECK(model_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(model_kind_from_string("shallow"), ConfigError);

  ModelSpec s;
  CHECK_THROWS_AS(s.validate(), ParameterError); // confined_model without depth
  s.depth_l = l;
  s.validate();
  CHECK(s.depth() == l);
  ModelSpec deep{ModelKind::deep_model, l};
  CHECK_THROWS_AS(deep.validate(), ParameterError);
  ModelSpec visc{ModelKind::deep_model, {}, 4 * pi, 0.1};
  CHECK_THROWS_AS(visc.validate(), ParameterError);
  ModelSpec cm{ModelKind::confined_muskat};
  CHECK(cm.depth() == l);
  CHECK(std::isinf(ModelSpec{ModelKind::deep_muskat}.depth()));
}

TEST_CASE("admissibility guard") {
  const std::vector<double> touch{0.0, l, 0.5, -0.2, 0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(check_admissible(touch, l), AdmissibilityError);
  check_admissible(touch, l, Admissibility::allow_touching);
  const std::vector<double> over{0.0, 0.0, 0.0, -1.01 * l, 0.0, 0.0, 0.0, 0.0};
  try {
    check_admissible(over, l, Admissibility::allow_touching);
    FAIL("expected AdmissibilityError");
  } catch (const AdmissibilityError& e) {
    CHECK(e.node() == 3);
  }
}

TEST_CASE("confined model against a dense oracle") {
  const std::size_t n = 64;
  const auto f = oracle::sample(n, [](double x) { return 0.5 * std::cos(x); });
  const auto lam = oracle::dense_lambda(f), fx = oracle::dense_dx(f);
  std::vector<double> expect(n);
  for (std::size_t j = 0; j < n; ++j)
    expect[j] = (-1.0 / (1.0 + fx[j] * fx[j]) + 1.0 / (1.0 + l * l - f[j] * f[j])) * lam[j];
  CHECK(oracle::max_abs_diff(rhs_confined_model(PeriodicField(f), l, raw).data(), expect) < 1e-10);
  CHECK(oracle::max_abs_diff(rhs_confined_model(PeriodicField(f), l).data(), expect) < 1e-10);
  CHECK(oracle::max_abs(rhs_confined_model(field(n, [](double) { return 1.2; }), l).data()) < 1e-14);
}

TEST_CASE("steady solutions of the confined model") {
  for (double sgn : {1.0, -1.0}) {
    const auto s = rhs_confined_model(field(256, [&](double x) { return sgn * l * std::sin(x); }), l, touching);
    CHECK(oracle::max_abs(s.data()) < 1e-10);
    const auto c = rhs_confined_model(field(256, [&](double x) { return sgn * l * std::cos(x); }), l, touching);
    CHECK(oracle::max_abs(c.data()) < 1e-10);
  }
  CHECK_THROWS_AS(rhs_confined_model(field(256, [](double x) { return l * std::sin(x); }), l),
                  AdmissibilityError);
}

TEST_CASE("duhamel split of the confined model") {
  const std::size_t n = 256;
  const PeriodicField f = field(n, [](double x) { return 0.3 * std::cos(x); });
  const auto lam = lambda_op(f);
  const auto rhs = rhs_confined_model(f, l), nl = nonlinearity_NL(f, l);
  const double c = confined_constant(l);
  for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(rhs[j] + c * lam[j] - nl[j]) < 1e-10);
  CHECK(oracle::max_abs(nonlinearity_NL(field(n, [](double) { return 0.0; }), l).data()) == 0.0);

  const PeriodicField s = field(n, [](double x) { return l * std::sin(x); });
  const auto nls = nonlinearity_NL(s, l, touching);
  const auto ls = lambda_op(s);
  for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(nls[j] - c * ls[j]) < 1e-10);

  std::mt19937_64 rng(21);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto v = oracle::band_limited(n, 12, rng, 0.3);
    const double m = oracle::max_abs(v);
    if (m >= 0.9 * l)
      for (auto& x : v) x *= 0.9 * l / m;
    const PeriodicField g(v);
    const auto r = rhs_confined_model(g, l), q = nonlinearity_NL(g, l), lg = lambda_op(g);
    for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(r[j] + c * lg[j] - q[j]));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("deep model") {
  const std::size_t n = 256;
  const auto r = rhs_deep_model(field(n, [](double x) { return std::cos(x); }), raw);
  CHECK(oracle::max_abs_diff(r.data(), oracle::sample(n, [](double x) {
          return -std::cos(x) / (1.0 + std::sin(x) * std::sin(x));
        })) < 1e-10);
  CHECK(oracle::max_abs(rhs_deep_model(field(n, [](double) { return 3.0; })).data()) < 1e-14);
  const auto small = field(n, [](double x) { return 1e-8 * std::cos(x); });
  const auto rs = rhs_deep_model(small), ls = lambda_op(small);
  for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(rs[j] + ls[j]) <= 1e-12 * 1e-8 + 1e-12 * std::abs(ls[j]));
}

TEST_CASE("g equation against a dense oracle") {
  const std::size_t n = 64;
  const double eps = 0.01;
  const auto g = oracle::sample(n, [](double x) { return 0.5 + 0.1 * std::cos(x); });
  const auto hg = oracle::dense_hilbert(g);
  std::vector<double> flux(n);
  for (std::size_t j = 0; j < n; ++j) flux[j] = g[j] * g[j] * hg[j] / (1.0 + g[j] * g[j]);
  const auto dflux = oracle::dense_dx(flux), lam = oracle::dense_lambda(g), gxx = oracle::dense_dxx(g);
  std::vector<double> expect(n);
  for (std::size_t j = 0; j < n; ++j) expect[j] = -lam[j] + dflux[j] + eps * gxx[j];
  CHECK(oracle::max_abs_diff(rhs_deep_model_derivative(PeriodicField(g), eps, raw).data(), expect) < 1e-10);
  CHECK(oracle::max_abs(rhs_deep_model_derivative(field(n, [](double) { return 0.0; }), eps).data()) == 0.0);
  CHECK(oracle::max_abs(rhs_deep_model_derivative(field(n, [](double) { return 0.7; }), eps).data()) < 1e-14);
  CHECK_THROWS_AS(rhs_deep_model_derivative(PeriodicField(g), -1.0), ParameterError);
}

TEST_CASE("stability parameter") {
  const std::size_t n = 256;
  const auto z = stability_report(field(n, [](double) { return 0.0; }), l);
  CHECK(z.sigma == doctest::Approx(1.0 / (1.0 + l * l) - 1.0).epsilon(1e-14));
  CHECK(z.sigma == doctest::Approx(-0.7116).epsilon(1e-4));
  CHECK(z.stable);

  const PeriodicField s = field(n, [](double x) { return l * std::sin(x); });
  const auto sig = sigma_field(s.values(), derivative(s).values(), l);
  CHECK(oracle::max_abs(sig) < 1e-12);

  const auto top = stability_report(field(n, [](double x) { return (l - 0.01) * std::exp(-std::pow(x, 6)); }), l);
  CHECK(top.sigma > 0.0);
  CHECK_FALSE(top.stable);
  CHECK(top.margin == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("real-line Muskat right-hand sides") {
  const QuadratureSettings q;
  const ModelSpec deep{ModelKind::deep_muskat}, conf{ModelKind::confined_muskat};
  const auto zero = LineInterface::sample(101, 10.0, [](double) { return 0.0; });
  CHECK(oracle::max_abs(rhs_deep_muskat(zero, deep, q)) == 0.0);
  CHECK(oracle::max_abs(rhs_confined_muskat(zero, conf, q)) == 0.0);

  const auto itf = LineInterface::sample(301, 10.0, caso1);
  const auto rd = rhs_deep_muskat(itf, deep, q), rc = rhs_confined_muskat(itf, conf, q);
  const std::size_t mid = 150;
  CHECK(itf.nodes()[mid] == 0.0);
  CHECK(rd[mid] < 0.0);
  CHECK(rc[mid] < 0.0);
  CHECK(std::abs(rc[mid]) < std::abs(rd[mid]));
  CHECK(rd.front() == 0.0);
  CHECK(rc.back() == 0.0);
  for (std::size_t j = 0; j < itf.size(); ++j) {
    CHECK(std::abs(rd[j] - rd[itf.size() - 1 - j]) < 10 * q.abs_tol);
    CHECK(std::abs(rc[j] - rc[itf.size() - 1 - j]) < 10 * q.abs_tol);
  }
  CHECK_THROWS_AS(rhs_deep_muskat(itf, conf, q), ParameterError);
}
