#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <type_traits>

#include "muskat/error.hpp"

namespace muskat {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;       ///< sum of accepted |Kronrod - Lobatto| differences
  std::size_t evaluations = 0;
};

namespace detail {

// Gander & Gautschi adaptive Lobatto: 4-point Gauss-Lobatto estimate checked
// against its 7-point Kronrod extension, bisected into six panels on failure.
template <class F>
class LobattoRecursion {
public:
  LobattoRecursion(F& f, std::size_t max_depth) : f_(f), max_depth_(max_depth) {}

  /// Magnitude of the whole integral; panel differences below 32ε of it are
  /// integrand noise and end the refinement.
  void set_scale(double scale) { scale_ = scale; }

  double run(double a, double b, double fa, double fb, double tol, std::size_t depth,
             QuadResult& acc) {
    constexpr double alpha = 0.816496580927726;   // sqrt(2/3)
    constexpr double beta = 0.447213595499957939; // 1/sqrt(5)
    const double h = 0.5 * (b - a);
    const double m = 0.5 * (a + b);
    const double mll = m - alpha * h, ml = m - beta * h, mr = m + beta * h, mrr = m + alpha * h;
    const double fmll = f_(mll), fml = f_(ml), fm = f_(m), fmr = f_(mr), fmrr = f_(mrr);
    acc.evaluations += 5;
    const double lobatto = (h / 6.0) * (fa + fb + 5.0 * (fml + fmr));
    const double kronrod =
        (h / 1470.0) * (77.0 * (fa + fb) + 432.0 * (fmll + fmrr) + 625.0 * (fml + fmr) + 672.0 * fm);
    const double diff = std::abs(kronrod - lobatto);
    if (!std::isfinite(kronrod))
      throw IntegrationError("adaptive Lobatto: non-finite integrand", a, b);
    constexpr double eps = 2.220446049250313e-16;
    const double local = std::abs(kronrod) + std::abs(h) * (std::abs(fa) + std::abs(fm) + std::abs(fb));
    const double roundoff = 32.0 * eps * std::max(local, scale_);
    if (diff <= tol || diff <= roundoff || !(mll > a && b > mrr)) {
      acc.error += diff;
      return kronrod;
    }
    if (depth >= max_depth_)
      throw IntegrationError("adaptive Lobatto: no convergence within the refinement limit", a, b);
    const double sub_tol = tol / 6.0;
    return run(a, mll, fa, fmll, sub_tol, depth + 1, acc) +
           run(mll, ml, fmll, fml, sub_tol, depth + 1, acc) +
           run(ml, m, fml, fm, sub_tol, depth + 1, acc) +
           run(m, mr, fm, fmr, sub_tol, depth + 1, acc) +
           run(mr, mrr, fmr, fmrr, sub_tol, depth + 1, acc) +
           run(mrr, b, fmrr, fb, sub_tol, depth + 1, acc);
  }

private:
  F& f_;
  std::size_t max_depth_;
  double scale_ = 0.0;
};

} // namespace detail

/// Adaptive Gauss-Lobatto quadrature of f on [a, b] to absolute tolerance tol.
/// fa and fb are the endpoint values (shared between neighbouring cells).
template <class F>
QuadResult adaptive_lobatto(F&& f, double a, double b, double fa, double fb, double tol,
                            std::size_t max_depth = 24) {
  QuadResult acc;
  if (a == b) return acc;
  detail::LobattoRecursion<std::remove_reference_t<F>> rec(f, max_depth);
  // Scale from a coarse look at the integrand: |b - a| max|f| over 7 points.
  double peak = std::max(std::abs(fa), std::abs(fb));
  for (int i = 1; i < 6; ++i) peak = std::max(peak, std::abs(f(a + (b - a) * i / 6.0)));
  acc.evaluations += 5;
  rec.set_scale(std::abs(b - a) * peak);
  acc.value = rec.run(a, b, fa, fb, tol, 0, acc);
  return acc;
}

template <class F>
QuadResult adaptive_lobatto(F&& f, double a, double b, double tol, std::size_t max_depth = 24) {
  const double fa = f(a), fb = f(b);
  QuadResult r = adaptive_lobatto(f, a, b, fa, fb, tol, max_depth);
  r.evaluations += 2;
  return r;
}

} // namespace muskat
