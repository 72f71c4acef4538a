#include "muskat/diagnostics.hpp"

#include "muskat/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace muskat {

namespace {

using detail::Symbol;

std::vector<double> apply_op(std::span<const double> in, Symbol symbol) {
  std::vector<double> out(in.size());
  detail::apply_symbol(in, out, symbol);
  return out;
}

constexpr std::array<RecordColumn, 29> kColumns = {{
    {"t", &DiagnosticsRecord::t},
    {"linf", &DiagnosticsRecord::linf},
    {"l2", &DiagnosticsRecord::l2},
    {"h_half", &DiagnosticsRecord::h_half},
    {"h_one", &DiagnosticsRecord::h_one},
    {"sigma", &DiagnosticsRecord::sigma},
    {"amplitude_param", &DiagnosticsRecord::amplitude_param},
    {"min_f", &DiagnosticsRecord::min_f},
    {"min_node", &DiagnosticsRecord::min_node},
    {"max_f", &DiagnosticsRecord::max_f},
    {"max_node", &DiagnosticsRecord::max_node},
    {"mean", &DiagnosticsRecord::mean},
    {"odd_residual", &DiagnosticsRecord::odd_residual},
    {"even_residual", &DiagnosticsRecord::even_residual},
    {"entropy", &DiagnosticsRecord::entropy},
    {"arctan_mass", &DiagnosticsRecord::arctan_mass},
    {"entropy_dissipation", &DiagnosticsRecord::entropy_dissipation},
    {"entropy_dissipation_rate", &DiagnosticsRecord::entropy_dissipation_rate},
    {"entropy_dissipation_sym", &DiagnosticsRecord::entropy_dissipation_sym},
    {"referee_energy", &DiagnosticsRecord::referee_energy},
    {"referee_dissipation", &DiagnosticsRecord::referee_dissipation},
    {"referee_dissipation_rate", &DiagnosticsRecord::referee_dissipation_rate},
    {"touch_value", &DiagnosticsRecord::touch_value},
    {"touch_curvature", &DiagnosticsRecord::touch_curvature},
    {"touch_lambda", &DiagnosticsRecord::touch_lambda},
    {"touch_sigma", &DiagnosticsRecord::touch_sigma},
    {"d_energy", &DiagnosticsRecord::d_energy},
    {"D_energy", &DiagnosticsRecord::D_energy},
    {"edge_max", &DiagnosticsRecord::edge_max},
}};

// Extremes, mean-free parity residuals. mirror(j) is the node at -x_j.
template <class Mirror>
void fill_pointwise(DiagnosticsRecord& r, std::span<const double> f, Mirror&& mirror) {
  std::size_t imin = 0, imax = 0;
  double linf = 0.0, odd = 0.0, even = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f[j] < f[imin]) imin = j;
    if (f[j] > f[imax]) imax = j;
    linf = std::max(linf, std::abs(f[j]));
    const double m = f[mirror(j)];
    odd = std::max(odd, 0.5 * std::abs(f[j] - m));
    even = std::max(even, 0.5 * std::abs(f[j] + m));
  }
  r.linf = linf;
  r.min_f = f[imin];
  r.min_node = static_cast<double>(imin);
  r.max_f = f[imax];
  r.max_node = static_cast<double>(imax);
  r.odd_residual = odd;
  r.even_residual = even;
}

void fill_depth(DiagnosticsRecord& r, std::span<const double> f, std::span<const double> fx, double l) {
  if (!std::isfinite(l)) {
    r.amplitude_param = 0.0;
    return;
  }
  const auto s = sigma_field(f, fx, l);
  r.sigma = *std::max_element(s.begin(), s.end());
  r.amplitude_param = r.linf / l;
  double d = 0.0, D = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    d = std::max(d, 1.0 / std::abs(l * l - f[j] * f[j] - fx[j] * fx[j]));
    D = std::max(D, 1.0 / (l * l - f[j] * f[j]));
  }
  r.d_energy = d;
  r.D_energy = D;
}

bool within(double measured, double bound, double tol) { return measured <= bound * (1.0 + tol); }

BoundCheck make_check(const std::string& name, double t, double measured, double bound, double tol,
                      bool applicable = true) {
  BoundCheck c;
  c.name = name;
  c.t = t;
  c.measured = measured;
  c.bound = bound;
  c.slack = bound - measured;
  c.applicable = applicable;
  c.satisfied = !applicable || within(measured, bound, tol);
  return c;
}

} // namespace

std::span<const RecordColumn> record_columns() { return kColumns; }

double entropy_dissipation_spectral(const PeriodicField& g) {
  const auto lam = apply_op(g.values(), Symbol::lambda);
  std::vector<double> w(g.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = lam[j] / (1.0 + g[j] * g[j]);
  return integrate(w);
}

double entropy_dissipation_symmetrized(const PeriodicField& g) {
  const std::size_t n = g.size();
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  const auto gx = apply_op(g.values(), Symbol::derivative);
  std::vector<double> inv_sin2(n, 0.0), w(n);
  for (std::size_t d = 1; d < n; ++d) {
    const double s = std::sin(0.5 * h * static_cast<double>(d));
    inv_sin2[d] = 1.0 / (s * s);
  }
  for (std::size_t j = 0; j < n; ++j) w[j] = 1.0 / (1.0 + g[j] * g[j]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Diagonal: limit y → x of the kernel.
    sum += 8.0 * gx[i] * gx[i] * g[i] * w[i] * w[i];
    double row = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double diff = g[i] - g[j];
      row += diff * diff * (g[i] + g[j]) * inv_sin2[j - i] * w[j];
    }
    sum += 2.0 * row * w[i];
  }
  return -sum * h * h / (8.0 * std::numbers::pi);
}

PeriodicField sigma_pointwise_field(const PeriodicField& f, double l) {
  const auto fx = apply_op(f.values(), Symbol::derivative);
  return PeriodicField(sigma_field(f.values(), fx, l), "Sigma");
}

std::size_t find_touch_node(const PeriodicField& f, double l) {
  const auto v = f.values();
  const std::size_t j = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  if (!(std::abs(v[j] - l) <= 1e-10)) {
    std::ostringstream os;
    os << "touching-point tracker: max f = " << v[j] << " does not reach l = " << l;
    throw CheckRefused(os.str());
  }
  return j;
}

DiagnosticsRecord compute_record(double t, const PeriodicField& f, const RecordContext& ctx,
                                 const PeriodicField* f_t) {
  const std::size_t n = f.size();
  DiagnosticsRecord r;
  r.t = t;
  fill_pointwise(r, f.values(), [n](std::size_t j) { return (n - j) % n; });
  std::vector<double> sq(n);
  for (std::size_t j = 0; j < n; ++j) sq[j] = f[j] * f[j];
  r.l2 = std::sqrt(integrate(sq));
  r.h_half = sobolev_seminorm(f, 0.5);
  r.h_one = sobolev_seminorm(f, 1.0);
  r.mean = mean(f);
  const auto fx = apply_op(f.values(), Symbol::derivative);
  fill_depth(r, f.values(), fx, ctx.l);

  if (ctx.g_equation) {
    const auto lam = apply_op(f.values(), Symbol::lambda);
    std::vector<double> ent(n), at(n), dis(n), ref(n), e4(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double g = f[j], w = 1.0 / (1.0 + g * g);
      ent[j] = g * std::log1p(g * g);
      at[j] = std::atan(g);
      dis[j] = lam[j] * w;
      ref[j] = g * lam[j];
      e4[j] = g * g * g * g;
    }
    r.entropy = integrate(ent);
    r.arctan_mass = integrate(at);
    r.entropy_dissipation = integrate(dis);
    r.referee_energy = r.l2 * r.l2 + integrate(e4) / 6.0;
    r.referee_dissipation = integrate(ref);
    if (f_t) {
      const auto lam_t = apply_op(f_t->values(), Symbol::lambda);
      std::vector<double> dr(n), rr(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double g = f[j], gt = (*f_t)[j], w = 1.0 / (1.0 + g * g);
        dr[j] = lam_t[j] * w - 2.0 * g * gt * lam[j] * w * w;
        rr[j] = 2.0 * lam[j] * gt;
      }
      r.entropy_dissipation_rate = integrate(dr);
      r.referee_dissipation_rate = integrate(rr);
    }
    if (ctx.symmetrized) r.entropy_dissipation_sym = entropy_dissipation_symmetrized(f);
  }

  if (ctx.touch_node) {
    const std::size_t j = *ctx.touch_node;
    if (j >= n) throw ParameterError("compute_record: touch node out of range");
    const auto fxx = apply_op(f.values(), Symbol::second_derivative);
    const auto lam = apply_op(f.values(), Symbol::lambda);
    r.touch_value = f[j];
    r.touch_curvature = fxx[j];
    r.touch_lambda = lam[j];
    if (std::isfinite(ctx.l)) r.touch_sigma = sigma_field(f.values().subspan(j, 1), std::span(fx).subspan(j, 1), ctx.l)[0];
  }
  return r;
}

DiagnosticsRecord compute_record(double t, const LineInterface& itf, const RecordContext& ctx,
                                 const QuadratureSettings& q) {
  const std::size_t n = itf.size();
  DiagnosticsRecord r;
  r.t = t;
  fill_pointwise(r, itf.values(), [n](std::size_t j) { return n - 1 - j; });
  r.l2 = line_l2_norm(itf);
  r.h_half = line_hhalf_seminorm(itf, q);
  r.h_one = line_h1_seminorm(itf);
  r.edge_max = itf.far_field_level();
  const auto x = itf.nodes();
  std::vector<double> fx(n);
  for (std::size_t j = 0; j < n; ++j) fx[j] = itf.spline().derivative(x[j]);
  fill_depth(r, itf.values(), fx, ctx.l);
  return r;
}

double effective_check_tol(double check_tol, double dt) { return dt > 1e-3 ? std::max(check_tol, 5e-3) : check_tol; }

double torus_decay_bound(double t, double f0_linf, double l) {
  const double e = std::exp(-l / (1.0 + l * l) * t);
  return e * f0_linf / (1.0 + (f0_linf / l) * (e - 1.0));
}

double torus_decay_bound_closed(double t, double f0_linf, double l) {
  return l * f0_linf / (f0_linf + (l - f0_linf) * std::exp(l * t / (1.0 + l * l)));
}

std::vector<BoundCheck> decay_bound_linf_torus(std::span<const DiagnosticsRecord> series,
                                               const PeriodicField& f0, double l, double check_tol) {
  const auto v = f0.values();
  const std::size_t n = v.size();
  double even = 0.0, linf = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    even = std::max(even, 0.5 * std::abs(v[j] + v[(n - j) % n]));
    linf = std::max(linf, std::abs(v[j]));
  }
  if (even > 1e-10) {
    std::ostringstream os;
    os << "torus L∞ decay: initial data is not odd (even part " << even << ")";
    throw CheckRefused(os.str());
  }
  if (!(linf < l)) throw CheckRefused("torus L∞ decay: initial data not admissible");
  std::vector<BoundCheck> out;
  for (const auto& r : series) {
    out.push_back(make_check("linf_torus", r.t, r.linf, torus_decay_bound(r.t, linf, l), check_tol));
    out.push_back(make_check("linf_torus_closed", r.t, r.linf, torus_decay_bound_closed(r.t, linf, l), check_tol));
  }
  return out;
}

std::vector<double> cumulative_time_integral(std::span<const DiagnosticsRecord> series,
                                             double DiagnosticsRecord::*value,
                                             double DiagnosticsRecord::*rate) {
  std::vector<double> out(series.size(), 0.0);
  for (std::size_t i = 1; i < series.size(); ++i) {
    const auto& a = series[i - 1];
    const auto& b = series[i];
    const double h = b.t - a.t;
    double step = 0.5 * h * (a.*value + b.*value);
    if (rate && std::isfinite(a.*rate) && std::isfinite(b.*rate)) step += h * h / 12.0 * (a.*rate - b.*rate);
    out[i] = out[i - 1] + step;
  }
  return out;
}

std::vector<BoundCheck> decay_bound_hhalf(std::span<const DiagnosticsRecord> series, double check_tol) {
  std::vector<BoundCheck> out;
  if (series.empty()) return out;
  const auto integral = cumulative_time_integral(series, &DiagnosticsRecord::sigma);
  const double h0 = series.front().h_half;
  bool stable = true;
  for (std::size_t i = 0; i < series.size(); ++i) {
    stable = stable && series[i].sigma < 0.0;
    // ½ d/dt ‖f‖² ≤ σ‖f‖² integrates to e^{∫σ} for the norm itself.
    out.push_back(make_check("hhalf_decay", series[i].t, series[i].h_half, std::exp(integral[i]) * h0,
                             check_tol, stable));
  }
  return out;
}

std::vector<BoundCheck> energy_balance_sigma(std::span<const DiagnosticsRecord> series, double check_tol) {
  std::vector<BoundCheck> out;
  if (series.empty()) return out;
  std::vector<DiagnosticsRecord> w(series.begin(), series.end());
  for (auto& r : w) r.mean = r.sigma * r.h_one * r.h_one; // scratch column
  const auto integral = cumulative_time_integral(w, &DiagnosticsRecord::mean);
  const double bound = series.front().h_half * series.front().h_half;
  bool stable = true;
  for (std::size_t i = 0; i < series.size(); ++i) {
    stable = stable && series[i].sigma < 0.0;
    const double lhs = series[i].h_half * series[i].h_half - 2.0 * integral[i];
    out.push_back(make_check("sigma_energy", series[i].t, lhs, bound, check_tol, stable));
  }
  return out;
}

std::vector<BoundCheck> decay_bound_linf_line(std::span<const DiagnosticsRecord> series, double l, double T,
                                              double check_tol) {
  std::vector<BoundCheck> out;
  if (series.empty()) return out;
  const auto& r0 = series.front();
  const double amp = r0.linf / l;
  double min_abs_sigma = std::numeric_limits<double>::infinity();
  bool stable = true;
  for (const auto& r : series) {
    if (r.t > T) break;
    stable = stable && r.sigma < 0.0;
    min_abs_sigma = std::min(min_abs_sigma, std::abs(r.sigma));
  }
  const bool applicable = amp < 1.0 && stable && r0.linf > 0.0;
  const double cfrak = r0.l2 + 2.0 * std::sqrt(T) * r0.h_half / std::sqrt(min_abs_sigma);
  const double coef = ((1.0 - amp) / amp) / (1.0 + l * l);
  for (const auto& r : series) {
    if (r.t > T) break;
    const double bound =
        applicable ? std::pow(coef * 3.0 * r.t / cfrak + 1.0 / (r0.linf * r0.linf * r0.linf), -1.0 / 3.0) : kNaN;
    out.push_back(make_check("linf_line", r.t, r.linf, bound, check_tol, applicable));
  }
  return out;
}

std::vector<BoundCheck> maximum_principle(std::span<const DiagnosticsRecord> series, double slack) {
  std::vector<BoundCheck> out;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const auto& a = series[i - 1];
    const auto& b = series[i];
    out.push_back(make_check("max_principle", b.t, b.linf, a.linf + slack, 0.0));
    out.push_back(make_check("max_nonincreasing", b.t, b.max_f, a.max_f + slack, 0.0));
    out.push_back(make_check("min_nondecreasing", b.t, -b.min_f, -a.min_f + slack, 0.0));
  }
  return out;
}

std::vector<BoundCheck> parity_check(std::span<const DiagnosticsRecord> series, const std::string& parity,
                                     double tol) {
  if (parity != "even" && parity != "odd") throw ParameterError("parity_check: parity must be even or odd");
  std::vector<BoundCheck> out;
  for (const auto& r : series) {
    const double res = parity == "even" ? r.odd_residual : r.even_residual;
    out.push_back(make_check(parity + "_parity", r.t, res, tol, 0.0));
  }
  return out;
}

BalanceSeries entropy_balance_deep(std::span<const DiagnosticsRecord> series, double residual_tol,
                                   double agreement_tol) {
  BalanceSeries b;
  if (series.empty()) return b;
  const auto integral = cumulative_time_integral(series, &DiagnosticsRecord::entropy_dissipation,
                                                 &DiagnosticsRecord::entropy_dissipation_rate);
  const double e0 = series.front().entropy + 2.0 * series.front().arctan_mass;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& r = series[i];
    const double res = r.entropy + 2.0 * r.arctan_mass - integral[i] - e0;
    b.residual.push_back(res);
    b.checks.push_back(make_check("entropy_residual", r.t, std::abs(res), residual_tol, 0.0));
    if (std::isfinite(r.entropy_dissipation_sym)) {
      b.checks.push_back(make_check("entropy_sign", r.t, r.entropy_dissipation_sym, 0.0, 0.0));
      const double scale = std::max(std::abs(r.entropy_dissipation), std::numeric_limits<double>::min());
      const double gap = std::abs(r.entropy_dissipation - r.entropy_dissipation_sym) / scale;
      b.checks.push_back(make_check("entropy_agreement", r.t, gap, agreement_tol, 0.0));
    }
  }
  return b;
}

BalanceSeries referee_energy_balance(std::span<const DiagnosticsRecord> series, double residual_tol) {
  BalanceSeries b;
  if (series.empty()) return b;
  const auto integral = cumulative_time_integral(series, &DiagnosticsRecord::referee_dissipation,
                                                 &DiagnosticsRecord::referee_dissipation_rate);
  const double e0 = series.front().referee_energy;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double res = series[i].referee_energy + 2.0 * integral[i] - e0;
    b.residual.push_back(res);
    b.checks.push_back(make_check("referee_residual", series[i].t, std::abs(res), residual_tol, 0.0));
  }
  return b;
}

std::vector<TouchSample> touching_point_tracker(std::span<const DiagnosticsRecord> series, double l) {
  std::vector<TouchSample> out;
  if (series.empty()) return out;
  if (!std::isfinite(series.front().touch_curvature))
    throw CheckRefused("touching-point tracker: records carry no touch columns");
  const double c0 = series.front().touch_curvature;
  // dc/dt = 2Λ c (l + c)  ⇔  d/dt log(c/(l+c)) = 2lΛ.
  const double ratio0 = c0 / (l + c0);
  double lambda_integral = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& r = series[i];
    if (i > 0) lambda_integral += 0.5 * (r.t - series[i - 1].t) * (series[i - 1].touch_lambda + r.touch_lambda);
    TouchSample s;
    s.t = r.t;
    s.value = r.touch_value;
    s.drift = r.touch_value - l;
    s.curvature = r.touch_curvature;
    const double ratio = ratio0 * std::exp(2.0 * l * lambda_integral);
    s.curvature_ode = l * ratio / (1.0 - ratio);
    s.ode_discrepancy = std::abs(s.curvature - s.curvature_ode) / std::abs(s.curvature_ode);
    s.lambda = r.touch_lambda;
    s.sigma = r.touch_sigma;
    s.exp_factor = std::exp(l * lambda_integral);
    out.push_back(s);
  }
  return out;
}

} // namespace muskat
