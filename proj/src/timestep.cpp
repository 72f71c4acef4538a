#include "muskat/timestep.hpp"

#include "muskat/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace muskat {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b̂
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kBeta = 0.04;
constexpr double kAlpha = 0.2 - 0.75 * kBeta;
constexpr double kMinFactor = 0.2, kMaxFactor = 10.0;

State combine(const State& y, double dt, std::initializer_list<std::pair<double, const State*>> terms) {
  State out = y;
  for (const auto& [w, k] : terms) {
    if (w == 0.0) continue;
    const double s = dt * w;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += s * (*k)[j];
  }
  return out;
}

void require_size(const State& y, const State& k) {
  if (k.size() != y.size()) throw InputError("integrator: right-hand side returned a state of different size");
}

} // namespace

void StepController::validate() const {
  if (!(dt >= 0.0)) throw ParameterError("controller: dt must be nonnegative");
  if (!(tol_rel > 0.0) || !(tol_abs > 0.0)) throw ParameterError("controller: tolerances must be positive");
  if (!(dt_min > 0.0) || !(dt_max >= dt_min)) throw ParameterError("controller: need 0 < dt_min <= dt_max");
  if (!(safety > 0.0 && safety < 1.0)) throw ParameterError("controller: safety must lie in (0, 1)");
}

State rk4_step(const State& y, const Rhs& rhs, double dt) {
  const State k1 = rhs(y);
  require_size(y, k1);
  const State k2 = rhs(combine(y, dt, {{0.5, &k1}}));
  const State k3 = rhs(combine(y, dt, {{0.5, &k2}}));
  const State k4 = rhs(combine(y, dt, {{1.0, &k3}}));
  State out = y;
  const double h = dt / 6.0;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += h * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
  return out;
}

Dopri5Trial dopri5_trial(const State& y, const State& k1, const Rhs& rhs, double dt) {
  require_size(y, k1);
  const State k2 = rhs(combine(y, dt, {{a21, &k1}}));
  const State k3 = rhs(combine(y, dt, {{a31, &k1}, {a32, &k2}}));
  const State k4 = rhs(combine(y, dt, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const State k5 = rhs(combine(y, dt, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const State k6 = rhs(combine(y, dt, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  Dopri5Trial r;
  r.y = combine(y, dt, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  r.k_end = rhs(r.y);
  r.error.resize(y.size());
  for (std::size_t j = 0; j < y.size(); ++j)
    r.error[j] = dt * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] + e6 * k6[j] + e7 * r.k_end[j]);
  return r;
}

double mixed_error_norm(const State& error, const State& y, const State& y_new, double tol_rel,
                        double tol_abs) {
  double m = 0.0;
  for (std::size_t j = 0; j < error.size(); ++j) {
    const double scale = tol_abs + tol_rel * std::max(std::abs(y[j]), std::abs(y_new[j]));
    const double e = std::abs(error[j]) / scale;
    if (!std::isfinite(e)) return std::numeric_limits<double>::infinity();
    m = std::max(m, e);
  }
  return m;
}

Rk45Stepper::Rk45Stepper(StepController controller) : c_(controller) {
  c_.validate();
  dt_ = c_.dt > 0.0 ? std::min(c_.dt, c_.dt_max) : 0.0;
}

double Rk45Stepper::initial_dt(const State& y, const State& k1, const Rhs& rhs) const {
  // Hairer-Wanner starting step.
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double sc = c_.tol_abs + c_.tol_rel * std::abs(y[j]);
    d0 = std::max(d0, std::abs(y[j]) / sc);
    d1 = std::max(d1, std::abs(k1[j]) / sc);
  }
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::clamp(h0, c_.dt_min, c_.dt_max);
  const State y1 = combine(y, h0, {{1.0, &k1}});
  const State k2 = rhs(y1);
  double d2 = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double sc = c_.tol_abs + c_.tol_rel * std::abs(y[j]);
    d2 = std::max(d2, std::abs(k2[j] - k1[j]) / sc / h0);
  }
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, 1e-3 * h0) : std::pow(0.01 / dm, 0.2);
  return std::clamp(std::min(100.0 * h0, h1), c_.dt_min, c_.dt_max);
}

Rk45Result Rk45Stepper::step(const State& y, double t, const Rhs& rhs, double t_limit) {
  if (!(t_limit > t)) throw ParameterError("rk45: t_limit must exceed t");
  State k1;
  if (!fsal_y_.empty() && fsal_y_ == y)
    k1 = fsal_k_;
  else
    k1 = rhs(y);
  require_size(y, k1);
  if (dt_ <= 0.0) dt_ = initial_dt(y, k1, rhs);

  Rk45Result res;
  for (;;) {
    const double remaining = t_limit - t;
    const bool last = dt_ >= remaining;
    const double h = last ? remaining : dt_;
    double err;
    Dopri5Trial trial;
    try {
      trial = dopri5_trial(y, k1, rhs, h);
      err = mixed_error_norm(trial.error, y, trial.y, c_.tol_rel, c_.tol_abs);
    } catch (const AdmissibilityError&) {
      err = std::numeric_limits<double>::infinity();
    }
    if (err <= 1.0) {
      double factor = err == 0.0 ? kMaxFactor
                                 : c_.safety * std::pow(err, -kAlpha) * std::pow(err_prev_, kBeta);
      factor = std::clamp(factor, kMinFactor, kMaxFactor);
      err_prev_ = std::max(err, 1e-4);
      // A step truncated to hit t_limit does not shrink the controller's step.
      if (!last || h == dt_) dt_ = std::min(dt_ * factor, c_.dt_max);
      res.state = std::move(trial.y);
      res.dt_used = h;
      res.dt_next = dt_;
      res.error_estimate = err;
      fsal_y_ = res.state;
      fsal_k_ = std::move(trial.k_end);
      return res;
    }
    const double factor =
        std::isfinite(err) ? std::max(kMinFactor, c_.safety * std::pow(err, -0.2)) : kMinFactor;
    dt_ = std::min(h, dt_) * factor;
    ++res.rejected;
    ++rejected_total_;
    if (dt_ < c_.dt_min) {
      std::ostringstream os;
      os << "rk45: step size " << dt_ << " fell below dt_min = " << c_.dt_min << " at t = " << t;
      throw StepSizeUnderflow(os.str(), t, dt_);
    }
  }
}

Rk45Result rk45_step(const State& y, const Rhs& rhs, const StepController& controller) {
  StepController c = controller;
  if (c.dt <= 0.0) c.dt = c.dt_max;
  Rk45Stepper stepper(c);
  return stepper.step(y, 0.0, rhs, std::numeric_limits<double>::infinity());
}

PeriodicField duhamel_step(const PeriodicField& f, double l, double dt, const SpectralOptions& opts) {
  if (!(dt > 0.0)) throw ParameterError("duhamel_step: dt must be positive");
  const double c = confined_constant(l);
  const PeriodicField nl = nonlinearity_NL(f, l, opts);
  std::vector<double> lin(f.size()), src(f.size());
  detail::apply_semigroup(f.values(), lin, dt, c);
  detail::apply_semigroup(nl.values(), src, 0.5 * dt, c);
  for (std::size_t j = 0; j < lin.size(); ++j) lin[j] += dt * src[j];
  return PeriodicField(std::move(lin), f.label());
}

} // namespace muskat
