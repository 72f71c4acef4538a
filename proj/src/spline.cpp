#include "muskat/spline.hpp"

#include "muskat/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace muskat {

namespace {

// Thomas algorithm; sub/diag/sup/rhs are overwritten.
std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag,
                                      std::vector<double> sup, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
  return x;
}

} // namespace

CubicSpline::CubicSpline(std::vector<double> nodes, std::vector<double> values, SplineEnd end)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  const std::size_t n = nodes_.size();
  if (n < 4) throw InputError("spline: at least 4 nodes required");
  if (values_.size() != n) throw InputError("spline: node and value counts differ");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(nodes_[i]) || !std::isfinite(values_[i])) {
      std::ostringstream os;
      os << "spline: non-finite node or value at index " << i;
      throw InputError(os.str());
    }
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
      std::ostringstream os;
      os << "spline: nodes not strictly increasing at index " << i << " (" << nodes_[i - 1]
         << " >= " << nodes_[i] << ")";
      throw InputError(os.str());
    }
  }

  std::vector<double> h(n - 1), slope(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = nodes_[i + 1] - nodes_[i];
    slope[i] = (values_[i + 1] - values_[i]) / h[i];
  }

  // Second derivatives M_i from the C² conditions at interior nodes:
  // h_{i-1} M_{i-1} + 2(h_{i-1}+h_i) M_i + h_i M_{i+1} = 6(slope_i - slope_{i-1}),
  // solved for M_1..M_{n-2}; the end conditions fix M_0 and M_{n-1}.
  const std::size_t inner = n - 2;
  std::vector<double> sub(inner, 0.0), diag(inner), sup(inner, 0.0), rhs(inner);
  for (std::size_t r = 0; r < inner; ++r) {
    const std::size_t i = r + 1;
    sub[r] = h[i - 1];
    diag[r] = 2.0 * (h[i - 1] + h[i]);
    sup[r] = h[i];
    rhs[r] = 6.0 * (slope[i] - slope[i - 1]);
  }
  if (end == SplineEnd::not_a_knot) {
    // Continuous third derivative at x_1: M_0 = ((h0+h1) M_1 - h0 M_2) / h1.
    // Same at x_{n-2} for M_{n-1}. Substituted into the first and last rows.
    const double h0 = h[0], h1 = h[1];
    diag[0] += h0 * (h0 + h1) / h1;
    sup[0] -= h0 * h0 / h1;
    const double ha = h[n - 3], hb = h[n - 2];
    diag[inner - 1] += hb * (ha + hb) / ha;
    sub[inner - 1] -= hb * hb / ha;
  }
  const std::vector<double> interior = solve_tridiagonal(sub, diag, sup, rhs);
  std::vector<double> m(n, 0.0);
  std::copy(interior.begin(), interior.end(), m.begin() + 1);
  if (end == SplineEnd::not_a_knot) {
    const double h0 = h[0], h1 = h[1];
    m[0] = ((h0 + h1) * m[1] - h0 * m[2]) / h1;
    const double ha = h[n - 3], hb = h[n - 2];
    m[n - 1] = ((ha + hb) * m[n - 2] - hb * m[n - 3]) / ha;
  }

  coeffs_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    coeffs_[i] = {values_[i], slope[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0, 0.5 * m[i],
                  (m[i + 1] - m[i]) / (6.0 * h[i])};
  }
}

std::size_t CubicSpline::piece(double x) const {
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const std::ptrdiff_t idx = (it - nodes_.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(coeffs_.size()) - 1));
}

double CubicSpline::operator()(double x) const {
  const std::size_t i = piece(x);
  const auto& c = coeffs_[i];
  const double t = x - nodes_[i];
  return c[0] + t * (c[1] + t * (c[2] + t * c[3]));
}

double CubicSpline::derivative(double x) const {
  const std::size_t i = piece(x);
  const auto& c = coeffs_[i];
  const double t = x - nodes_[i];
  return c[1] + t * (2.0 * c[2] + 3.0 * t * c[3]);
}

double CubicSpline::second_derivative(double x) const {
  const std::size_t i = piece(x);
  const auto& c = coeffs_[i];
  return 2.0 * c[2] + 6.0 * c[3] * (x - nodes_[i]);
}

} // namespace muskat
