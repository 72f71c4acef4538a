#pragma once

// Periodic-grid fields on the torus [-π, π) and the Fourier multipliers that
// act on them: Λ^s, H, ∂x, ∂x², e^{-tcΛ}, plus the Ḣ^s seminorm.
//
// Grid: x_j = -π + 2πj/n, j = 0..n-1, n a power of two, n >= 8.
// Spectrum convention: f(x_j) = Σ_k c_k e^{i k x_j}, k ∈ {-n/2, ..., n/2-1},
// so c_0 is the mean. Multipliers with odd symbol (H, ∂x) zero the unmatched
// Nyquist mode k = -n/2 to keep outputs real; even symbols keep it.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace muskat {

class PeriodicField {
public:
  /// Validates: size is a power of two >= 8 and every value is finite.
  explicit PeriodicField(std::vector<double> values, std::string label = "f");

  /// Samples fn at the grid nodes.
  static PeriodicField sample(std::size_t n, const std::function<double(double)>& fn,
                              std::string label = "f");

  static double node(std::size_t j, std::size_t n);
  static std::vector<double> nodes(std::size_t n);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  const std::string& label() const noexcept { return label_; }

  /// Move the samples out (the field is left empty).
  std::vector<double> release() && { return std::move(values_); }

private:
  std::vector<double> values_;
  std::string label_;
};

class Spectrum {
public:
  Spectrum(std::size_t n, std::vector<std::complex<double>> coeffs);

  std::size_t size() const noexcept { return n_; }
  /// Coefficient of wavenumber k ∈ [-n/2, n/2).
  std::complex<double> coeff(int k) const;
  void set_coeff(int k, std::complex<double> value);
  int min_wavenumber() const noexcept { return -static_cast<int>(n_ / 2); }
  int max_wavenumber() const noexcept { return static_cast<int>(n_ / 2) - 1; }

private:
  std::size_t n_;
  std::vector<std::complex<double>> coeffs_; // index k + n/2
};

Spectrum to_spectrum(const PeriodicField& field);
PeriodicField to_field(const Spectrum& spectrum, std::string label = "f");

/// Λ^s f, symbol |k|^s, s ∈ (0, 2].
PeriodicField lambda_op(const PeriodicField& field, double s = 1.0);
/// Hilbert transform, symbol -i sgn(k).
PeriodicField hilbert(const PeriodicField& field);
/// ∂x, symbol ik.
PeriodicField derivative(const PeriodicField& field);
/// ∂x², symbol -k².
PeriodicField second_derivative(const PeriodicField& field);
/// e^{-t c Λ} f. t >= 0, c > 0.
PeriodicField semigroup(const PeriodicField& field, double t, double c);
/// ‖Λ^s f‖_{L²(-π,π)}, s ∈ [0, 4]; s = 0 gives the L² norm of f - mean(f).
double sobolev_seminorm(const PeriodicField& field, double s);

/// 2/3-rule filter: zero every mode with |k| > n/3.
PeriodicField dealias(const PeriodicField& field);

double mean(const PeriodicField& field);
/// Trapezoid (spectrally exact) integral over one period.
double integrate(std::span<const double> values);

namespace detail {

// Raw-buffer versions used by the right-hand sides; they skip validation.
enum class Symbol { lambda, hilbert, derivative, second_derivative };

void apply_symbol(std::span<const double> in, std::span<double> out, Symbol symbol,
                  double power = 1.0);
void apply_semigroup(std::span<const double> in, std::span<double> out, double t, double c);
void apply_dealias(std::span<double> values);

} // namespace detail

} // namespace muskat
