#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace muskat {

enum class SplineEnd {
  natural,    ///< s'' = 0 at both ends
  not_a_knot, ///< s''' continuous across the second and penultimate nodes
};

/// Piecewise-cubic interpolant. Piece i covers [x_i, x_{i+1}] and is stored as
/// a + b t + c t² + d t³ with t = x - x_i.
class CubicSpline {
public:
  CubicSpline() = default;
  /// Requires >= 4 strictly increasing finite nodes and matching finite values.
  CubicSpline(std::vector<double> nodes, std::vector<double> values,
              SplineEnd end = SplineEnd::natural);

  std::size_t size() const noexcept { return nodes_.size(); }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Index of the piece containing x (clamped to the end pieces).
  std::size_t piece(double x) const;
  const std::array<double, 4>& coefficients(std::size_t piece) const { return coeffs_[piece]; }

  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;
  /// One-sided third derivative of the given piece.
  double third_derivative(std::size_t piece) const { return 6.0 * coeffs_[piece][3]; }

private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<std::array<double, 4>> coeffs_;
};

} // namespace muskat
