#pragma once

// Interfaces on a truncated real line [-L, L], represented by a cubic spline
// through the node values, and the principal-value integrals of the deep-water
// and confined Muskat equations evaluated on them.
//
// Far field: beyond ±L the interface is continued by its edge values (flat at
// infinity). Contributions of the continued region up to |η| = far_cutoff are
// added in closed form; what lies beyond far_cutoff is bounded, not added.

#include "muskat/spline.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace muskat {

class LineInterface {
public:
  /// Nodes strictly increasing with endpoints at ±L (symmetric), N >= 8.
  LineInterface(std::vector<double> nodes, std::vector<double> values,
                SplineEnd end = SplineEnd::natural);

  /// N uniform nodes on [-L, L].
  static std::vector<double> uniform_nodes(std::size_t n, double half_width);
  static LineInterface sample(std::size_t n, double half_width,
                              const std::function<double(double)>& fn);

  std::size_t size() const noexcept { return spline_.size(); }
  double half_width() const noexcept { return half_width_; }
  std::span<const double> nodes() const noexcept { return spline_.nodes(); }
  std::span<const double> values() const noexcept { return spline_.values(); }
  const CubicSpline& spline() const noexcept { return spline_; }
  double min_spacing() const noexcept { return min_spacing_; }

  double left_far_value() const { return values().front(); }
  double right_far_value() const { return values().back(); }

  /// max |f| over the three outermost nodes on each side.
  double far_field_level() const;
  /// Throws InputError unless far_field_level() < decay_tol.
  void check_far_field(double decay_tol = 1e-6) const;

  /// Spline value with the flat continuation outside [-L, L].
  double value(double x) const;
  double slope(double x) const;

private:
  CubicSpline spline_;
  double half_width_ = 0.0;
  double min_spacing_ = 0.0;
};

LineInterface build_spline(std::vector<double> nodes, std::vector<double> values,
                           SplineEnd end = SplineEnd::natural);

struct QuadratureSettings {
  double abs_tol = 1e-9;
  /// Half-width of the desingularized cells around x; <= 0 selects the node spacing.
  double singular_halfwidth = 0.0;
  /// Truncation radius of the η-integral; <= 0 selects 2L.
  double far_cutoff = 0.0;

  /// Fills the spacing-dependent defaults and validates against itf.
  QuadratureSettings resolved(const LineInterface& itf) const;
};

struct PvResult {
  double value = 0.0;
  double error_estimate = 0.0; ///< accumulated Lobatto/Kronrod differences
  double tail_bound = 0.0;     ///< bound on the omitted |η| > far_cutoff part
  std::size_t evaluations = 0;
};

/// P.V. ∫ (f'(x) - f'(x-η)) η / (η² + (f(x) - f(x-η))²) dη. Requires |x| < L.
PvResult pv_integral_deep_detailed(const LineInterface& itf, double x, const QuadratureSettings& q);
double pv_integral_deep(const LineInterface& itf, double x, const QuadratureSettings& q);

/// Sum of the two kernels of the confined (l = π/2) equation:
/// (f'(x)-f'(x-η)) sinh η / (cosh η - cos(f(x)-f(x-η)))
///   + (f'(x)+f'(x-η)) sinh η / (cosh η + cos(f(x)+f(x-η))).
/// Requires |x| < L and max|f| < π/2 - guard.
PvResult pv_integral_confined_detailed(const LineInterface& itf, double x,
                                       const QuadratureSettings& q, double guard = 1e-8);
double pv_integral_confined(const LineInterface& itf, double x, const QuadratureSettings& q,
                            double guard = 1e-8);

/// Throws AdmissibilityError when the spline reaches π/2 - guard anywhere, naming the piece.
void check_confined_admissible(const LineInterface& itf, double guard = 1e-8);

/// Λf(x) = (1/π) ∫_0^∞ (2f(x) - f(x-η) - f(x+η)) / η² dη. Requires |x| < L.
double lambda_line(const LineInterface& itf, double x, const QuadratureSettings& q);

/// ∫ f² over [-L, L] (exact for the spline), square-rooted.
double line_l2_norm(const LineInterface& itf);
/// ‖f'‖_{L²(-L, L)}.
double line_h1_seminorm(const LineInterface& itf);
/// ‖f‖_{Ḣ^{1/2}} from (1/2π) ∬ (f(x)-f(y))²/(x-y)², with pairs that lie both
/// outside [-L, L] omitted.
double line_hhalf_seminorm(const LineInterface& itf, const QuadratureSettings& q);
/// ∫_{-L}^{L} fn(f'(y)) dy by 4-point Gauss-Legendre per spline piece.
double line_integrate_slope(const LineInterface& itf, const std::function<double(double)>& fn);

} // namespace muskat
