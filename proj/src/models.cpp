#include "muskat/models.hpp"

#include "muskat/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace muskat {

namespace {

using detail::Symbol;

std::vector<double> apply_op(std::span<const double> in, Symbol symbol) {
  std::vector<double> out(in.size());
  detail::apply_symbol(in, out, symbol);
  return out;
}

void filter_if(std::vector<double>& v, const SpectralOptions& opts) {
  if (opts.dealias) detail::apply_dealias(v);
}

// Nonlinear part of the confined model at each node, before filtering.
std::vector<double> confined_nl_raw(std::span<const double> f, std::span<const double> fx,
                                    std::span<const double> lam, double l) {
  const double l2 = l * l;
  const double a = 1.0 + 2.0 * l2 + l2 * l2;
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double s = fx[j] * fx[j];
    const double num = s * (a - l2 * f[j] * f[j]) + f[j] * f[j];
    const double den = (1.0 + s) * (1.0 + l2 - f[j] * f[j]) * (1.0 + l2);
    out[j] = lam[j] * num / den;
  }
  return out;
}

template <class PointRhs>
std::vector<double> interior_nodes(const LineInterface& itf, PointRhs&& rhs) {
  const auto x = itf.nodes();
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t j = 1; j + 1 < x.size(); ++j) out[j] = rhs(j, x[j]);
  return out;
}

} // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
  case ModelKind::confined_model: return "confined_model";
  case ModelKind::deep_model: return "deep_model";
  case ModelKind::deep_model_derivative: return "deep_model_derivative";
  case ModelKind::deep_muskat: return "deep_muskat";
  case ModelKind::confined_muskat: return "confined_muskat";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  for (ModelKind k : {ModelKind::confined_model, ModelKind::deep_model, ModelKind::deep_model_derivative,
                      ModelKind::deep_muskat, ModelKind::confined_muskat})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown model kind '" + name + "'");
}

void ModelSpec::validate() const {
  if (depth_l && !(*depth_l > 0.0 && std::isfinite(*depth_l)))
    throw ParameterError("model: depth_l must be positive and finite");
  if (kind == ModelKind::confined_model && !depth_l)
    throw ParameterError("model: confined_model requires depth_l");
  if (kind == ModelKind::confined_muskat && depth_l &&
      std::abs(*depth_l - 0.5 * std::numbers::pi) > 1e-12)
    throw ParameterError("model: confined_muskat is posed between walls at ±π/2");
  if ((kind == ModelKind::deep_model || kind == ModelKind::deep_model_derivative ||
       kind == ModelKind::deep_muskat) && depth_l)
    throw ParameterError("model: deep models take no depth_l");
  if (!std::isfinite(density_jump)) throw ParameterError("model: density_jump must be finite");
  if (!(viscosity_eps >= 0.0)) throw ParameterError("model: viscosity_eps must be nonnegative");
  if (viscosity_eps > 0.0 && kind != ModelKind::deep_model_derivative)
    throw ParameterError("model: viscosity_eps is only defined for deep_model_derivative");
}

double ModelSpec::depth() const {
  if (depth_l) return *depth_l;
  if (kind == ModelKind::confined_muskat) return 0.5 * std::numbers::pi;
  return std::numeric_limits<double>::infinity();
}

void check_admissible(std::span<const double> values, double l, Admissibility mode) {
  if (!(l > 0.0)) throw ParameterError("admissibility: l must be positive");
  std::size_t arg = 0;
  for (std::size_t j = 1; j < values.size(); ++j)
    if (std::abs(values[j]) > std::abs(values[arg])) arg = j;
  const double m = values.empty() ? 0.0 : std::abs(values[arg]);
  const bool ok = mode == Admissibility::strict
                      ? m < l - 1e-12
                      : m <= l * (1.0 + 64.0 * std::numeric_limits<double>::epsilon());
  if (!ok) {
    std::ostringstream os;
    os << "state left the strip |f| < " << l << ": max|f| = " << m << " at node " << arg;
    throw AdmissibilityError(os.str(), m, arg);
  }
}

PeriodicField nonlinearity_NL(const PeriodicField& f, double l, const SpectralOptions& opts) {
  check_admissible(f.values(), l, opts.admissibility);
  const auto fx = apply_op(f.values(), Symbol::derivative);
  const auto lam = apply_op(f.values(), Symbol::lambda);
  auto nl = confined_nl_raw(f.values(), fx, lam, l);
  filter_if(nl, opts);
  return PeriodicField(std::move(nl), "NL");
}

PeriodicField rhs_confined_model(const PeriodicField& f, double l, const SpectralOptions& opts) {
  check_admissible(f.values(), l, opts.admissibility);
  const auto fx = apply_op(f.values(), Symbol::derivative);
  const auto lam = apply_op(f.values(), Symbol::lambda);
  auto out = confined_nl_raw(f.values(), fx, lam, l);
  filter_if(out, opts);
  const double c = confined_constant(l);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] -= c * lam[j];
  return PeriodicField(std::move(out), "rhs");
}

PeriodicField rhs_deep_model(const PeriodicField& f, const SpectralOptions& opts) {
  const auto fx = apply_op(f.values(), Symbol::derivative);
  const auto lam = apply_op(f.values(), Symbol::lambda);
  // -Λf/(1+f_x²) = -Λf + Λf f_x²/(1+f_x²).
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double s = fx[j] * fx[j];
    out[j] = lam[j] * s / (1.0 + s);
  }
  filter_if(out, opts);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] -= lam[j];
  return PeriodicField(std::move(out), "rhs");
}

PeriodicField rhs_deep_model_derivative(const PeriodicField& g, double eps, const SpectralOptions& opts) {
  if (!(eps >= 0.0)) throw ParameterError("rhs_deep_model_derivative: eps must be nonnegative");
  const auto hg = apply_op(g.values(), Symbol::hilbert);
  const auto lam = apply_op(g.values(), Symbol::lambda);
  std::vector<double> flux(g.size());
  for (std::size_t j = 0; j < flux.size(); ++j) {
    const double g2 = g[j] * g[j];
    flux[j] = g2 * hg[j] / (1.0 + g2);
  }
  filter_if(flux, opts);
  auto out = apply_op(flux, Symbol::derivative);
  std::vector<double> visc;
  if (eps > 0.0) visc = apply_op(g.values(), Symbol::second_derivative);
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] -= lam[j];
    if (eps > 0.0) out[j] += eps * visc[j];
  }
  return PeriodicField(std::move(out), "rhs");
}

std::vector<double> rhs_deep_muskat(const LineInterface& itf, const ModelSpec& spec,
                                    const QuadratureSettings& q) {
  if (spec.kind != ModelKind::deep_muskat) throw ParameterError("rhs_deep_muskat: model kind mismatch");
  spec.validate();
  const double pre = spec.density_jump / (2.0 * std::numbers::pi);
  return interior_nodes(itf, [&](std::size_t, double x) { return pre * pv_integral_deep(itf, x, q); });
}

std::vector<double> rhs_confined_muskat(const LineInterface& itf, const ModelSpec& spec,
                                        const QuadratureSettings& q) {
  if (spec.kind != ModelKind::confined_muskat)
    throw ParameterError("rhs_confined_muskat: model kind mismatch");
  spec.validate();
  check_confined_admissible(itf);
  const double pre = spec.density_jump / (4.0 * std::numbers::pi);
  return interior_nodes(itf, [&](std::size_t, double x) { return pre * pv_integral_confined(itf, x, q); });
}

std::vector<double> rhs_confined_model_line(const LineInterface& itf, double l, const QuadratureSettings& q,
                                            Admissibility mode) {
  check_admissible(itf.values(), l, mode);
  const auto f = itf.values();
  return interior_nodes(itf, [&](std::size_t j, double x) {
    const double fx = itf.slope(x);
    return (-1.0 / (1.0 + fx * fx) + 1.0 / (1.0 + l * l - f[j] * f[j])) * lambda_line(itf, x, q);
  });
}

std::vector<double> rhs_deep_model_line(const LineInterface& itf, const QuadratureSettings& q) {
  return interior_nodes(itf, [&](std::size_t, double x) {
    const double fx = itf.slope(x);
    return -lambda_line(itf, x, q) / (1.0 + fx * fx);
  });
}

std::vector<double> sigma_field(std::span<const double> f, std::span<const double> fx, double l) {
  std::vector<double> out(f.size());
  const double l2 = std::isinf(l) ? 0.0 : l * l;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double first = std::isinf(l) ? 0.0 : 1.0 / (1.0 + l2 - f[j] * f[j]);
    out[j] = first - 1.0 / (1.0 + fx[j] * fx[j]);
  }
  return out;
}

namespace {

StabilityReport report_from(std::span<const double> f, std::span<const double> fx, double l) {
  const auto s = sigma_field(f, fx, l);
  StabilityReport r;
  r.argmax_node = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
  r.sigma = s[r.argmax_node];
  r.stable = r.sigma < 0.0;
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  r.margin = l - m;
  return r;
}

} // namespace

StabilityReport stability_report(const PeriodicField& f, double l) {
  const auto fx = apply_op(f.values(), Symbol::derivative);
  return report_from(f.values(), fx, l);
}

StabilityReport stability_report(const LineInterface& itf, double l) {
  const auto x = itf.nodes();
  std::vector<double> fx(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) fx[j] = itf.spline().derivative(x[j]);
  return report_from(itf.values(), fx, l);
}

} // namespace muskat
