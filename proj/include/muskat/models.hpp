#pragma once

// Right-hand sides of the interface equations.
//
// Periodic backend: the confined model, the deep (infinite depth) model and
// its derivative (g = ∂x f) form. Real-line backend: the two Muskat integral
// equations plus line versions of the two model equations.

#include "muskat/realline.hpp"
#include "muskat/spectral.hpp"

#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace muskat {

enum class ModelKind {
  confined_model,        ///< (-1/(1+f_x²) + 1/(1+l²-f²)) Λf
  deep_model,            ///< -Λf / (1+f_x²)
  deep_model_derivative, ///< -Λg + ∂x(g² Hg/(1+g²)) + ε ∂x² g
  deep_muskat,           ///< infinite-depth Muskat, kernel on the real line
  confined_muskat,       ///< Muskat between walls at ±π/2
};

std::string to_string(ModelKind kind);
/// Accepts the names produced by to_string; throws ConfigError otherwise.
ModelKind model_kind_from_string(const std::string& name);

struct ModelSpec {
  ModelKind kind = ModelKind::confined_model;
  std::optional<double> depth_l;         ///< absent = infinite depth
  double density_jump = 4.0 * std::numbers::pi;
  double viscosity_eps = 0.0;

  /// Throws ParameterError on an inconsistent combination.
  void validate() const;
  /// l for the confined cases (π/2 for confined_muskat when depth_l is absent).
  double depth() const;
};

/// l² / (1 + l²), the coefficient of the linear part of the confined model.
inline double confined_constant(double l) { return l * l / (1.0 + l * l); }

enum class Admissibility {
  strict,         ///< reject max|f| >= l - 1e-12
  allow_touching, ///< accept max|f| <= l (up to roundoff)
};

struct SpectralOptions {
  /// Apply the 2/3 filter to the nonlinear part of each right-hand side.
  bool dealias = true;
  Admissibility admissibility = Admissibility::strict;
};

/// Throws AdmissibilityError naming the offending node.
void check_admissible(std::span<const double> values, double l,
                      Admissibility mode = Admissibility::strict);

PeriodicField rhs_confined_model(const PeriodicField& f, double l, const SpectralOptions& opts = {});
PeriodicField rhs_deep_model(const PeriodicField& f, const SpectralOptions& opts = {});
PeriodicField rhs_deep_model_derivative(const PeriodicField& g, double eps,
                                        const SpectralOptions& opts = {});
/// rhs_confined_model(f, l) + confined_constant(l) Λf.
PeriodicField nonlinearity_NL(const PeriodicField& f, double l, const SpectralOptions& opts = {});

/// Node values; the two edge nodes are held at the far-field value (zero rate).
std::vector<double> rhs_deep_muskat(const LineInterface& itf, const ModelSpec& spec,
                                    const QuadratureSettings& q);
std::vector<double> rhs_confined_muskat(const LineInterface& itf, const ModelSpec& spec,
                                        const QuadratureSettings& q);
std::vector<double> rhs_confined_model_line(const LineInterface& itf, double l,
                                            const QuadratureSettings& q,
                                            Admissibility mode = Admissibility::strict);
std::vector<double> rhs_deep_model_line(const LineInterface& itf, const QuadratureSettings& q);

struct StabilityReport {
  double sigma = 0.0;
  std::size_t argmax_node = 0;
  bool stable = false; ///< sigma < 0
  double margin = 0.0; ///< l - max|f|
};

/// Σ(x) = 1/(1+l²-f²) - 1/(1+f_x²) at the nodes.
std::vector<double> sigma_field(std::span<const double> f, std::span<const double> fx, double l);

StabilityReport stability_report(const PeriodicField& f, double l);
/// Slopes from the spline; for deep models pass l = ∞ to get σ = -min 1/(1+f_x²).
StabilityReport stability_report(const LineInterface& itf, double l);

} // namespace muskat
