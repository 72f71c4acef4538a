#pragma once

// Per-sample diagnostics of a running solution and the a-priori bounds and
// balance laws they are checked against.

#include "muskat/models.hpp"
#include "muskat/realline.hpp"
#include "muskat/spectral.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace muskat {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One row of the diagnostics table. Columns that do not apply to the run are NaN.
/// Node indices are stored as integer-valued doubles so every column is numeric.
struct DiagnosticsRecord {
  double t = 0.0;
  double linf = kNaN;
  double l2 = kNaN;
  double h_half = kNaN;
  double h_one = kNaN;
  double sigma = kNaN;
  double amplitude_param = kNaN;
  double min_f = kNaN;
  double min_node = kNaN;
  double max_f = kNaN;
  double max_node = kNaN;
  double mean = kNaN;
  double odd_residual = kNaN;  ///< max |f(x) - f(-x)| / 2
  double even_residual = kNaN; ///< max |f(x) + f(-x)| / 2
  // g-equation columns
  double entropy = kNaN;                  ///< ∫ g log(1+g²)
  double arctan_mass = kNaN;              ///< ∫ arctan g
  double entropy_dissipation = kNaN;      ///< ∫ Λg/(1+g²)
  double entropy_dissipation_rate = kNaN; ///< time derivative of the above
  double entropy_dissipation_sym = kNaN;  ///< symmetrized double sum of the same quantity
  double referee_energy = kNaN;           ///< ‖g‖²_{L²} + ‖g‖⁴_{L⁴}/6
  double referee_dissipation = kNaN;      ///< ‖g‖²_{Ḣ^{1/2}}
  double referee_dissipation_rate = kNaN;
  // touching point
  double touch_value = kNaN;
  double touch_curvature = kNaN;
  double touch_lambda = kNaN;
  double touch_sigma = kNaN;
  // extras
  double d_energy = kNaN; ///< max 1/|l² - f² - f_x²|
  double D_energy = kNaN; ///< max 1/(l² - f²)
  double edge_max = kNaN; ///< far-field level of a line interface
};

struct RecordColumn {
  const char* name;
  double DiagnosticsRecord::*member;
};

/// Column order of the CSV table.
std::span<const RecordColumn> record_columns();

struct RecordContext {
  double l = std::numeric_limits<double>::infinity(); ///< depth; ∞ for the deep models
  bool g_equation = false;  ///< the state is g = ∂x f: fill the entropy and referee columns
  bool symmetrized = false; ///< also evaluate the O(n²) symmetrized dissipation
  std::optional<std::size_t> touch_node;
};

/// f_t, when given, is the time derivative of the state and enables the rate columns.
DiagnosticsRecord compute_record(double t, const PeriodicField& f, const RecordContext& ctx,
                                 const PeriodicField* f_t = nullptr);
DiagnosticsRecord compute_record(double t, const LineInterface& itf, const RecordContext& ctx,
                                 const QuadratureSettings& q);

/// Σ(x) = 1/(1+l²-f²) - 1/(1+f_x²); its maximum is stability_report(f, l).sigma.
PeriodicField sigma_pointwise_field(const PeriodicField& f, double l);

/// ∫ Λg/(1+g²) over one period (spectral Λ, trapezoid in x).
double entropy_dissipation_spectral(const PeriodicField& g);
/// -(1/8π) ∬ (g(x)-g(y))²(g(x)+g(y)) / (sin²((x-y)/2)(1+g(x)²)(1+g(y)²)) by a double trapezoid sum.
double entropy_dissipation_symmetrized(const PeriodicField& g);

/// Node at which f attains max f = l within 1e-10; throws CheckRefused otherwise.
std::size_t find_touch_node(const PeriodicField& f, double l);

struct BoundCheck {
  std::string name;
  double t = 0.0;
  double measured = 0.0;
  double bound = 0.0;
  bool satisfied = true;
  double slack = 0.0; ///< bound - measured
  bool applicable = true;
};

/// check_tol widened to at least 5e-3 when dt > 1e-3.
double effective_check_tol(double check_tol, double dt);

/// ‖f(t)‖∞ ≤ e^{-Ct}‖f₀‖∞ / (1 + 𝒜(e^{-Ct} - 1)), C = l/(1+l²), 𝒜 = ‖f₀‖∞/l.
double torus_decay_bound(double t, double f0_linf, double l);
/// l ‖f₀‖∞ / (‖f₀‖∞ + (l - ‖f₀‖∞) e^{l t/(1+l²)}), the same bound solved in closed form.
double torus_decay_bound_closed(double t, double f0_linf, double l);

/// Two series, "linf_torus" and "linf_torus_closed". Refuses non-odd f0.
std::vector<BoundCheck> decay_bound_linf_torus(std::span<const DiagnosticsRecord> series,
                                               const PeriodicField& f0, double l, double check_tol);
/// ‖f(t)‖_{Ḣ^{1/2}} ≤ e^{∫σ}‖f₀‖_{Ḣ^{1/2}}; inapplicable once σ ≥ 0.
std::vector<BoundCheck> decay_bound_hhalf(std::span<const DiagnosticsRecord> series, double check_tol);
/// ‖f(t)‖²_{Ḣ^{1/2}} - 2∫σ‖f‖²_{Ḣ¹} ≤ ‖f₀‖²_{Ḣ^{1/2}}.
std::vector<BoundCheck> energy_balance_sigma(std::span<const DiagnosticsRecord> series, double check_tol);
/// Real-line L∞ decay over [0, T]; inapplicable when 𝒜 ≥ 1 or σ ≥ 0 somewhere on [0, T].
std::vector<BoundCheck> decay_bound_linf_line(std::span<const DiagnosticsRecord> series, double l,
                                              double T, double check_tol);
/// Sampled ‖f‖∞ (and max f, -min f) non-increasing up to an absolute slack.
std::vector<BoundCheck> maximum_principle(std::span<const DiagnosticsRecord> series, double slack = 1e-8);
/// Parity residual below tol at every sample. parity = "even" checks odd_residual.
std::vector<BoundCheck> parity_check(std::span<const DiagnosticsRecord> series, const std::string& parity,
                                     double tol = 1e-9);

/// h/2 (D₀ + D₁) + h²/12 (D₀' - D₁') per interval, cumulative from the first sample.
/// Without rates (NaN) the correction is dropped.
std::vector<double> cumulative_time_integral(std::span<const DiagnosticsRecord> series,
                                             double DiagnosticsRecord::*value,
                                             double DiagnosticsRecord::*rate = nullptr);

struct BalanceSeries {
  std::vector<double> residual; ///< per sample
  std::vector<BoundCheck> checks;
};

/// "entropy_residual" (|residual| ≤ residual_tol), "entropy_sign" (symmetrized
/// dissipation ≤ 0), "entropy_agreement" (relative spectral vs double-sum gap ≤ agreement_tol).
BalanceSeries entropy_balance_deep(std::span<const DiagnosticsRecord> series, double residual_tol,
                                   double agreement_tol);
/// ‖g‖² + ‖g‖⁴_{L⁴}/6 + 2∫‖g‖²_{Ḣ^{1/2}} conserved; "referee_residual".
BalanceSeries referee_energy_balance(std::span<const DiagnosticsRecord> series, double residual_tol);

struct TouchSample {
  double t = 0.0;
  double value = 0.0;          ///< f(x̃, t)
  double drift = 0.0;          ///< f(x̃, t) - l
  double curvature = 0.0;      ///< ∂x² f(x̃, t)
  double curvature_ode = 0.0;  ///< scalar ODE prediction from the recorded Λf(x̃)
  double ode_discrepancy = 0.0; ///< |curvature - curvature_ode| / |curvature_ode|
  double lambda = 0.0;         ///< Λf(x̃, t)
  double sigma = 0.0;          ///< Σ(x̃, t)
  double exp_factor = 1.0;     ///< e^{l ∫₀ᵗ Λf(x̃, s) ds}
};

/// Integrates dc/dt = 2cΛf(x̃)(l + c) exactly with Λf(x̃) trapezoid-integrated
/// over the samples; the series must carry the touch columns.
std::vector<TouchSample> touching_point_tracker(std::span<const DiagnosticsRecord> series, double l);

} // namespace muskat
