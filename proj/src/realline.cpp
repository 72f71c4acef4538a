#include "muskat/realline.hpp"

#include "muskat/error.hpp"
#include "muskat/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace muskat {

namespace {

constexpr std::array<double, 4> kGaussNodes = {-0.8611363115940526, -0.3399810435848563,
                                               0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> kGaussWeights = {0.3478548451374538, 0.6521451548625461,
                                                 0.6521451548625461, 0.3478548451374538};

// p(x + u) = c0 + c1 u + c2 u² + c3 u³ for one spline piece re-expanded at x.
struct Taylor {
  double c0, c1, c2, c3;
};

Taylor taylor_at(const CubicSpline& s, std::size_t piece, double x) {
  const auto& c = s.coefficients(piece);
  const double t = x - s.nodes()[piece];
  return {c[0] + t * (c[1] + t * (c[2] + t * c[3])), c[1] + t * (2.0 * c[2] + 3.0 * t * c[3]),
          c[2] + 3.0 * c[3] * t, c[3]};
}

double piece_value(const CubicSpline& s, std::size_t piece, double y) {
  const auto& c = s.coefficients(piece);
  const double t = y - s.nodes()[piece];
  return c[0] + t * (c[1] + t * (c[2] + t * c[3]));
}

double piece_slope(const CubicSpline& s, std::size_t piece, double y) {
  const auto& c = s.coefficients(piece);
  const double t = y - s.nodes()[piece];
  return c[1] + t * (2.0 * c[2] + 3.0 * t * c[3]);
}

double shc(double z) { return z == 0.0 ? 1.0 : std::sinh(z) / z; }
double sinc(double z) { return z == 0.0 ? 1.0 : std::sin(z) / z; }

// cosh u - cos c and cosh u + cos s without cancellation.
double cosh_minus_cos(double u, double c) {
  const double a = std::sinh(0.5 * u), b = std::sin(0.5 * c);
  return 2.0 * (a * a + b * b);
}
double cosh_plus_cos(double u, double s) {
  const double a = std::sinh(0.5 * u), b = std::cos(0.5 * s);
  return 2.0 * (a * a + b * b);
}

struct Cell {
  double lo, hi;
  std::size_t piece;
};

// Everything about the source variable y needed to integrate against a fixed
// target point x: the cell decomposition of [-L, L] and the divided
// differences (f(y)-f(x))/(y-x), (f'(y)-f'(x))/(y-x). Pieces whose closure
// contains x use the exact polynomial quotient, so y = x is not singular.
class SourceContext {
public:
  SourceContext(const LineInterface& itf, double x, double halfwidth)
      : s_(itf.spline()), x_(x), fx_(itf.value(x)), dfx_(itf.slope(x)) {
    const auto nodes = s_.nodes();
    const std::size_t pieces = s_.size() - 1;
    taylor_.resize(pieces);
    near_.assign(pieces, false);
    for (std::size_t j = 0; j < pieces; ++j) {
      if (nodes[j] <= x && x <= nodes[j + 1]) {
        near_[j] = true;
        taylor_[j] = taylor_at(s_, j, x);
      }
    }
    std::vector<double> breaks(nodes.begin(), nodes.end());
    const double lo = nodes.front(), hi = nodes.back();
    for (double b : {x - halfwidth, x, x + halfwidth})
      if (b > lo && b < hi) breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    cells_.reserve(breaks.size());
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double a = breaks[i], b = breaks[i + 1];
      cells_.push_back({a, b, s_.piece(0.5 * (a + b))});
    }
  }

  const std::vector<Cell>& cells() const { return cells_; }
  double fx() const { return fx_; }
  double dfx() const { return dfx_; }
  double x() const { return x_; }

  void divided(std::size_t piece, double y, double& dd0, double& dd1) const {
    if (near_[piece]) {
      const Taylor& t = taylor_[piece];
      const double u = y - x_;
      dd0 = t.c1 + u * (t.c2 + u * t.c3);
      dd1 = 2.0 * t.c2 + 3.0 * t.c3 * u;
    } else {
      const double inv = 1.0 / (y - x_);
      dd0 = (piece_value(s_, piece, y) - fx_) * inv;
      dd1 = (piece_slope(s_, piece, y) - dfx_) * inv;
    }
  }

  double value(std::size_t piece, double y) const { return piece_value(s_, piece, y); }
  double slope(std::size_t piece, double y) const { return piece_slope(s_, piece, y); }

private:
  const CubicSpline& s_;
  double x_, fx_, dfx_;
  std::vector<Taylor> taylor_;
  std::vector<bool> near_;
  std::vector<Cell> cells_;
};

template <class Integrand>
void integrate_cells(const SourceContext& ctx, double total_length, double abs_tol,
                     Integrand&& integrand, PvResult& out) {
  const auto& cells = ctx.cells();
  for (const Cell& cell : cells) {
    auto f = [&](double y) { return integrand(cell.piece, y); };
    const double tol = abs_tol * (cell.hi - cell.lo) / total_length;
    const QuadResult r = adaptive_lobatto(f, cell.lo, cell.hi, tol);
    out.value += r.value;
    out.error_estimate += r.error;
    out.evaluations += r.evaluations;
  }
}

void require_interior(const LineInterface& itf, double x, const char* op) {
  const double L = itf.half_width();
  if (!(x > -L && x < L)) {
    std::ostringstream os;
    os << op << ": x = " << x << " must lie strictly inside (-" << L << ", " << L << ")";
    throw ParameterError(os.str());
  }
}

} // namespace

LineInterface::LineInterface(std::vector<double> nodes, std::vector<double> values, SplineEnd end) {
  if (nodes.size() < 8) throw InputError("line interface: at least 8 nodes required");
  spline_ = CubicSpline(std::move(nodes), std::move(values), end);
  const auto x = spline_.nodes();
  half_width_ = x.back();
  if (!(half_width_ > 0.0) || std::abs(x.front() + x.back()) > 1e-12 * half_width_)
    throw InputError("line interface: endpoints must be symmetric at ±L");
  min_spacing_ = x[1] - x[0];
  for (std::size_t i = 1; i + 1 < x.size(); ++i) min_spacing_ = std::min(min_spacing_, x[i + 1] - x[i]);
}

std::vector<double> LineInterface::uniform_nodes(std::size_t n, double half_width) {
  if (n < 8) throw InputError("line interface: at least 8 nodes required");
  if (!(half_width > 0.0)) throw ParameterError("line interface: half width must be positive");
  std::vector<double> x(n);
  const double h = 2.0 * half_width / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) x[j] = -half_width + h * static_cast<double>(j);
  // Exact symmetry: mirror the right half onto the left.
  for (std::size_t j = 0; j < n / 2; ++j) x[n - 1 - j] = -x[j];
  if (n % 2 == 1) x[n / 2] = 0.0;
  return x;
}

LineInterface LineInterface::sample(std::size_t n, double half_width,
                                    const std::function<double(double)>& fn) {
  auto x = uniform_nodes(n, half_width);
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = fn(x[j]);
  return LineInterface(std::move(x), std::move(v));
}

double LineInterface::far_field_level() const {
  const auto v = values();
  double level = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    level = std::max(level, std::abs(v[k]));
    level = std::max(level, std::abs(v[v.size() - 1 - k]));
  }
  return level;
}

void LineInterface::check_far_field(double decay_tol) const {
  const double level = far_field_level();
  if (!(level < decay_tol)) {
    std::ostringstream os;
    os << "line interface: |f| = " << level << " near ±L exceeds the far-field tolerance " << decay_tol;
    throw InputError(os.str());
  }
}

double LineInterface::value(double x) const {
  if (x <= -half_width_) return left_far_value();
  if (x >= half_width_) return right_far_value();
  return spline_(x);
}

double LineInterface::slope(double x) const {
  if (x < -half_width_ || x > half_width_) return 0.0;
  return spline_.derivative(x);
}

LineInterface build_spline(std::vector<double> nodes, std::vector<double> values, SplineEnd end) {
  return LineInterface(std::move(nodes), std::move(values), end);
}

QuadratureSettings QuadratureSettings::resolved(const LineInterface& itf) const {
  QuadratureSettings q = *this;
  if (q.singular_halfwidth <= 0.0) q.singular_halfwidth = itf.min_spacing();
  if (q.far_cutoff <= 0.0) q.far_cutoff = 2.0 * itf.half_width();
  if (!(q.abs_tol > 0.0)) throw ParameterError("quadrature: abs_tol must be positive");
  if (!(q.singular_halfwidth < 2.0 * itf.min_spacing()))
    throw ParameterError("quadrature: singular_halfwidth must be below twice the node spacing");
  if (!(q.far_cutoff >= 2.0 * itf.half_width()))
    throw ParameterError("quadrature: far_cutoff must cover the data, i.e. be at least 2L");
  return q;
}

PvResult pv_integral_deep_detailed(const LineInterface& itf, double x, const QuadratureSettings& settings) {
  require_interior(itf, x, "pv_integral_deep");
  const QuadratureSettings q = settings.resolved(itf);
  const SourceContext ctx(itf, x, q.singular_halfwidth);
  const double L = itf.half_width();
  PvResult out;
  integrate_cells(ctx, 2.0 * L, q.abs_tol,
                  [&](std::size_t piece, double y) {
                    double dd0, dd1;
                    ctx.divided(piece, y, dd0, dd1);
                    return dd1 / (1.0 + dd0 * dd0);
                  },
                  out);

  // Flat continuation: integrand f'(x) η / (η² + c²) on η ∈ [-R, x-L] (y > L)
  // and η ∈ [x+L, R] (y < -L).
  const double dfx = ctx.dfx();
  if (dfx != 0.0) {
    const double R = q.far_cutoff;
    const double cr = ctx.fx() - itf.right_far_value();
    const double cl = ctx.fx() - itf.left_far_value();
    const double near_part = std::log(((x - L) * (x - L) + cr * cr) / ((x + L) * (x + L) + cl * cl));
    const double far_part = std::log1p((cl * cl - cr * cr) / (R * R + cr * cr));
    out.value += 0.5 * dfx * (near_part + far_part);
    out.tail_bound = std::abs(0.5 * dfx * far_part);
  }
  return out;
}

double pv_integral_deep(const LineInterface& itf, double x, const QuadratureSettings& q) {
  return pv_integral_deep_detailed(itf, x, q).value;
}

// Largest |s| on one piece: endpoints plus the roots of s' inside it.
static double piece_abs_max(const CubicSpline& s, std::size_t piece) {
  const auto& c = s.coefficients(piece);
  const double h = s.nodes()[piece + 1] - s.nodes()[piece];
  double m = std::max(std::abs(c[0]), std::abs(piece_value(s, piece, s.nodes()[piece + 1])));
  auto consider = [&](double t) {
    if (t > 0.0 && t < h) m = std::max(m, std::abs(piece_value(s, piece, s.nodes()[piece] + t)));
  };
  // s'(t) = c1 + 2 c2 t + 3 c3 t²
  const double a = 3.0 * c[3], b = 2.0 * c[2], cc = c[1];
  if (a == 0.0) {
    if (b != 0.0) consider(-cc / b);
  } else {
    const double disc = b * b - 4.0 * a * cc;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      if (q != 0.0) consider(cc / q);
      consider(q / a);
    }
  }
  return m;
}

void check_confined_admissible(const LineInterface& itf, double guard) {
  const auto& s = itf.spline();
  const double wall = 0.5 * std::numbers::pi - guard;
  std::size_t arg = 0;
  double worst = 0.0;
  for (std::size_t j = 0; j + 1 < itf.nodes().size(); ++j) {
    const double m = piece_abs_max(s, j);
    if (m > worst) worst = m, arg = j;
  }
  if (!(worst < wall)) {
    std::ostringstream os;
    os << "confined interface: max|f| = " << worst << " on [x_" << arg << ", x_" << arg + 1
       << "] reaches the walls at ±π/2 (guard " << guard << ")";
    throw AdmissibilityError(os.str(), worst, arg);
  }
}

PvResult pv_integral_confined_detailed(const LineInterface& itf, double x,
                                       const QuadratureSettings& settings, double guard) {
  require_interior(itf, x, "pv_integral_confined");
  check_confined_admissible(itf, guard);
  const QuadratureSettings q = settings.resolved(itf);
  const SourceContext ctx(itf, x, q.singular_halfwidth);
  const double L = itf.half_width();
  const double fx = ctx.fx(), dfx = ctx.dfx();
  PvResult out;
  integrate_cells(ctx, 2.0 * L, q.abs_tol,
                  [&](std::size_t piece, double y) {
                    double dd0, dd1;
                    ctx.divided(piece, y, dd0, dd1);
                    const double eta = x - y;
                    // (f'(x)-f'(y)) sinh η / (cosh η - cos Δf), divided through by η².
                    const double half = shc(0.5 * eta);
                    const double q1 = sinc(0.5 * dd0 * eta) * dd0;
                    const double k1 = dd1 * shc(eta) / (0.5 * half * half + 0.5 * q1 * q1);
                    const double k2 = (dfx + ctx.slope(piece, y)) * std::sinh(eta) /
                                      cosh_plus_cos(eta, fx + ctx.value(piece, y));
                    return k1 + k2;
                  },
                  out);

  if (dfx != 0.0) {
    const double R = q.far_cutoff;
    const double fr = itf.right_far_value(), fl = itf.left_far_value();
    const double cr = fx - fr, cl = fx - fl, sr = fx + fr, sl = fx + fl;
    const double near_part = std::log(cosh_minus_cos(x - L, cr) / cosh_minus_cos(x + L, cl)) +
                             std::log(cosh_plus_cos(x - L, sr) / cosh_plus_cos(x + L, sl));
    const double far_part = std::log1p((std::cos(cr) - std::cos(cl)) / cosh_minus_cos(R, cr)) +
                            std::log1p((std::cos(sl) - std::cos(sr)) / cosh_plus_cos(R, sr));
    out.value += dfx * (near_part + far_part);
    out.tail_bound = std::abs(dfx * far_part);
  }
  return out;
}

double pv_integral_confined(const LineInterface& itf, double x, const QuadratureSettings& q, double guard) {
  return pv_integral_confined_detailed(itf, x, q, guard).value;
}

double lambda_line(const LineInterface& itf, double x, const QuadratureSettings& settings) {
  require_interior(itf, x, "lambda_line");
  const QuadratureSettings q = settings.resolved(itf);
  const auto nodes = itf.nodes();
  const double L = itf.half_width();
  const double fx = itf.value(x);
  const double reach = L + std::abs(x);

  std::vector<double> breaks;
  breaks.reserve(nodes.size() + 1);
  for (double xj : nodes) {
    const double d = std::abs(xj - x);
    if (d > 0.0) breaks.push_back(d);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  const CubicSpline& s = itf.spline();
  const double first = breaks.front();
  const Taylor right = taylor_at(s, s.piece(x + 0.5 * first), x);
  const Taylor left = taylor_at(s, s.piece(x - 0.5 * first), x);
  // 2f(x) - f(x-η) - f(x+η) = -(r2+l2) η² - (r3-l3) η³ near η = 0; the
  // first-order terms cancel because the spline is C¹.
  auto near = [&](double eta) { return -(right.c2 + left.c2) - (right.c3 - left.c3) * eta; };
  auto far = [&](double eta) {
    return (2.0 * fx - itf.value(x - eta) - itf.value(x + eta)) / (eta * eta);
  };

  double sum = adaptive_lobatto(near, 0.0, first, q.abs_tol * first / reach).value;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    sum += adaptive_lobatto(far, a, b, q.abs_tol * (b - a) / reach).value;
  }
  sum += (2.0 * fx - itf.left_far_value() - itf.right_far_value()) / breaks.back();
  return sum / std::numbers::pi;
}

double line_l2_norm(const LineInterface& itf) {
  const auto x = itf.nodes();
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    const double mid = 0.5 * (x[j] + x[j + 1]), rad = 0.5 * (x[j + 1] - x[j]);
    for (std::size_t g = 0; g < 4; ++g) {
      const double v = piece_value(itf.spline(), j, mid + rad * kGaussNodes[g]);
      sum += rad * kGaussWeights[g] * v * v;
    }
  }
  return std::sqrt(sum);
}

double line_integrate_slope(const LineInterface& itf, const std::function<double(double)>& fn) {
  const auto x = itf.nodes();
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    const double mid = 0.5 * (x[j] + x[j + 1]), rad = 0.5 * (x[j + 1] - x[j]);
    for (std::size_t g = 0; g < 4; ++g)
      sum += rad * kGaussWeights[g] * fn(piece_slope(itf.spline(), j, mid + rad * kGaussNodes[g]));
  }
  return sum;
}

double line_h1_seminorm(const LineInterface& itf) {
  return std::sqrt(line_integrate_slope(itf, [](double d) { return d * d; }));
}

double line_hhalf_seminorm(const LineInterface& itf, const QuadratureSettings& settings) {
  const QuadratureSettings q = settings.resolved(itf);
  const auto x = itf.nodes();
  const double L = itf.half_width();
  const double fl = itf.left_far_value(), fr = itf.right_far_value();
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    const double mid = 0.5 * (x[j] + x[j + 1]), rad = 0.5 * (x[j + 1] - x[j]);
    for (std::size_t g = 0; g < 4; ++g) {
      const double xp = mid + rad * kGaussNodes[g];
      const SourceContext ctx(itf, xp, q.singular_halfwidth);
      PvResult inner;
      integrate_cells(ctx, 2.0 * L, q.abs_tol,
                      [&](std::size_t piece, double y) {
                        double dd0, dd1;
                        ctx.divided(piece, y, dd0, dd1);
                        return dd0 * dd0;
                      },
                      inner);
      const double cr = ctx.fx() - fr, cl = ctx.fx() - fl;
      const double outside = cr * cr / (L - xp) + cl * cl / (L + xp);
      total += rad * kGaussWeights[g] * (inner.value + 2.0 * outside);
    }
  }
  return std::sqrt(total / (2.0 * std::numbers::pi));
}

} // namespace muskat
