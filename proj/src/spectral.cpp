#include "muskat/spectral.hpp"

#include "muskat/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace muskat {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void validate_samples(std::span<const double> values, const std::string& label) {
  const std::size_t n = values.size();
  if (n < 8 || !is_power_of_two(n)) {
    std::ostringstream os;
    os << "periodic field '" << label << "': size " << n << " is not a power of two >= 8";
    throw InputError(os.str());
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(values[j])) {
      std::ostringstream os;
      os << "periodic field '" << label << "': non-finite value " << values[j] << " at node " << j;
      throw InputError(os.str());
    }
  }
}

// One r2c/c2r plan pair per size. Plans are created under a lock; executing a
// plan on caller-owned buffers through the new-array API is thread-safe.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit PlanPair(std::size_t n) {
    std::vector<double> real(n);
    std::vector<std::complex<double>> half(n / 2 + 1);
    auto* c = reinterpret_cast<fftw_complex*>(half.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.data(), c, flags);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), c, real.data(), flags);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
  ~PlanPair() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
};

const PlanPair& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<PlanPair>(n);
  return *slot;
}

// Unnormalized half spectrum: H[k] = Σ_j f_j e^{-2πijk/n}, k = 0..n/2.
void forward_half(std::span<const double> in, std::vector<std::complex<double>>& half) {
  const std::size_t n = in.size();
  half.resize(n / 2 + 1);
  const auto& p = plans_for(n);
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(half.data()));
}

// Inverse of forward_half including the 1/n factor. Destroys half.
void backward_half(std::vector<std::complex<double>>& half, std::span<double> out) {
  const std::size_t n = out.size();
  const auto& p = plans_for(n);
  fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(half.data()), out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
}

thread_local std::vector<std::complex<double>> scratch;

template <class Multiplier>
void apply_multiplier(std::span<const double> in, std::span<double> out, Multiplier&& m) {
  forward_half(in, scratch);
  const std::size_t half = in.size() / 2;
  for (std::size_t k = 0; k <= half; ++k) scratch[k] *= m(k, k == half);
  backward_half(scratch, out);
}

std::vector<double> filtered(const PeriodicField& field, detail::Symbol symbol, double power) {
  std::vector<double> out(field.size());
  detail::apply_symbol(field.values(), out, symbol, power);
  return out;
}

} // namespace

PeriodicField::PeriodicField(std::vector<double> values, std::string label)
    : values_(std::move(values)), label_(std::move(label)) {
  validate_samples(values_, label_);
}

PeriodicField PeriodicField::sample(std::size_t n, const std::function<double(double)>& fn,
                                    std::string label) {
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = fn(node(j, n));
  return PeriodicField(std::move(v), std::move(label));
}

double PeriodicField::node(std::size_t j, std::size_t n) {
  return -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
}

std::vector<double> PeriodicField::nodes(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = node(j, n);
  return x;
}

Spectrum::Spectrum(std::size_t n, std::vector<std::complex<double>> coeffs)
    : n_(n), coeffs_(std::move(coeffs)) {
  if (n_ < 8 || !is_power_of_two(n_) || coeffs_.size() != n_)
    throw InputError("spectrum: size must be a power of two >= 8 matching the coefficient count");
}

std::complex<double> Spectrum::coeff(int k) const {
  if (k < min_wavenumber() || k > max_wavenumber())
    throw ParameterError("spectrum: wavenumber " + std::to_string(k) + " out of range");
  return coeffs_[static_cast<std::size_t>(k + static_cast<int>(n_ / 2))];
}

void Spectrum::set_coeff(int k, std::complex<double> value) {
  if (k < min_wavenumber() || k > max_wavenumber())
    throw ParameterError("spectrum: wavenumber " + std::to_string(k) + " out of range");
  coeffs_[static_cast<std::size_t>(k + static_cast<int>(n_ / 2))] = value;
}

// With x_j = -π + 2πj/n, e^{-ikx_j} = (-1)^k e^{-2πijk/n}.
Spectrum to_spectrum(const PeriodicField& field) {
  const std::size_t n = field.size();
  std::vector<std::complex<double>> half;
  forward_half(field.values(), half);
  const double inv_n = 1.0 / static_cast<double>(n);
  const int h = static_cast<int>(n / 2);
  std::vector<std::complex<double>> coeffs(n);
  for (int k = 0; k < h; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const auto c = half[static_cast<std::size_t>(k)] * (sign * inv_n);
    coeffs[static_cast<std::size_t>(k + h)] = c;
    if (k > 0) coeffs[static_cast<std::size_t>(h - k)] = std::conj(c);
  }
  const double nyq_sign = (h % 2 == 0) ? 1.0 : -1.0;
  coeffs[0] = std::complex<double>(half[static_cast<std::size_t>(h)].real() * nyq_sign * inv_n, 0.0);
  return Spectrum(n, std::move(coeffs));
}

PeriodicField to_field(const Spectrum& spectrum, std::string label) {
  const std::size_t n = spectrum.size();
  const int h = static_cast<int>(n / 2);
  const double dn = static_cast<double>(n);
  std::vector<std::complex<double>> half(n / 2 + 1);
  for (int k = 0; k < h; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    half[static_cast<std::size_t>(k)] = spectrum.coeff(k) * (sign * dn);
  }
  const double nyq_sign = (h % 2 == 0) ? 1.0 : -1.0;
  half[static_cast<std::size_t>(h)] = std::complex<double>(spectrum.coeff(-h).real() * nyq_sign * dn, 0.0);
  half[0] = std::complex<double>(half[0].real(), 0.0);
  std::vector<double> out(n);
  backward_half(half, out);
  return PeriodicField(std::move(out), std::move(label));
}

namespace detail {

void apply_symbol(std::span<const double> in, std::span<double> out, Symbol symbol, double power) {
  using C = std::complex<double>;
  switch (symbol) {
  case Symbol::lambda:
    apply_multiplier(in, out, [power](std::size_t k, bool) {
      return C(k == 0 ? 0.0 : (power == 1.0 ? static_cast<double>(k) : std::pow(static_cast<double>(k), power)), 0.0);
    });
    break;
  case Symbol::hilbert:
    apply_multiplier(in, out, [](std::size_t k, bool nyquist) {
      return (k == 0 || nyquist) ? C(0.0, 0.0) : C(0.0, -1.0);
    });
    break;
  case Symbol::derivative:
    apply_multiplier(in, out, [](std::size_t k, bool nyquist) {
      return nyquist ? C(0.0, 0.0) : C(0.0, static_cast<double>(k));
    });
    break;
  case Symbol::second_derivative:
    apply_multiplier(in, out, [](std::size_t k, bool) {
      const double dk = static_cast<double>(k);
      return C(-dk * dk, 0.0);
    });
    break;
  }
}

void apply_semigroup(std::span<const double> in, std::span<double> out, double t, double c) {
  apply_multiplier(in, out, [t, c](std::size_t k, bool) {
    return std::complex<double>(std::exp(-t * c * static_cast<double>(k)), 0.0);
  });
}

void apply_dealias(std::span<double> values) {
  const std::size_t cutoff = values.size() / 3;
  forward_half(values, scratch);
  for (std::size_t k = cutoff + 1; k < scratch.size(); ++k) scratch[k] = 0.0;
  backward_half(scratch, values);
}

} // namespace detail

PeriodicField lambda_op(const PeriodicField& field, double s) {
  if (!(s > 0.0 && s <= 2.0)) throw ParameterError("lambda_op: s must lie in (0, 2]");
  return PeriodicField(filtered(field, detail::Symbol::lambda, s), field.label());
}

PeriodicField hilbert(const PeriodicField& field) {
  return PeriodicField(filtered(field, detail::Symbol::hilbert, 1.0), field.label());
}

PeriodicField derivative(const PeriodicField& field) {
  return PeriodicField(filtered(field, detail::Symbol::derivative, 1.0), field.label());
}

PeriodicField second_derivative(const PeriodicField& field) {
  return PeriodicField(filtered(field, detail::Symbol::second_derivative, 1.0), field.label());
}

PeriodicField semigroup(const PeriodicField& field, double t, double c) {
  if (!(t >= 0.0)) throw ParameterError("semigroup: t must be nonnegative");
  if (!(c > 0.0)) throw ParameterError("semigroup: c must be positive");
  if (t == 0.0) return field;
  std::vector<double> out(field.size());
  detail::apply_semigroup(field.values(), out, t, c);
  return PeriodicField(std::move(out), field.label());
}

double sobolev_seminorm(const PeriodicField& field, double s) {
  if (!(s >= 0.0 && s <= 4.0)) throw ParameterError("sobolev_seminorm: s must lie in [0, 4]");
  std::vector<std::complex<double>> half;
  forward_half(field.values(), half);
  const std::size_t n = field.size();
  const std::size_t h = n / 2;
  const double dn = static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t k = 1; k <= h; ++k) {
    const double weight = (k == h) ? 1.0 : 2.0;
    const double mag2 = std::norm(half[k]) / (dn * dn);
    sum += weight * std::pow(static_cast<double>(k), 2.0 * s) * mag2;
  }
  return std::sqrt(2.0 * std::numbers::pi * sum);
}

PeriodicField dealias(const PeriodicField& field) {
  std::vector<double> out(field.data());
  detail::apply_dealias(out);
  return PeriodicField(std::move(out), field.label());
}

double integrate(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * 2.0 * std::numbers::pi / static_cast<double>(values.size());
}

double mean(const PeriodicField& field) {
  return integrate(field.values()) / (2.0 * std::numbers::pi);
}

} // namespace muskat
