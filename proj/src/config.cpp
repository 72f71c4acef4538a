#include "muskat/error.hpp"
#include "muskat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace muskat {

using nlohmann::json;

namespace {

const std::set<std::string> kCheckNames = {"max_principle", "parity_even",  "parity_odd",
                                           "linf_torus",    "hhalf_decay",  "sigma_energy",
                                           "linf_line",     "entropy",      "referee",
                                           "touching_point"};

const std::set<std::string> kFamilies = {"cos_amplitude", "boundary_family", "caso1", "custom_samples",
                                         "fourier"};

// Reads the members of one JSON object, recording type errors and unknown keys.
class ObjectReader {
public:
  ObjectReader(const json& j, std::string prefix, std::vector<std::string>& errors)
      : j_(j), prefix_(std::move(prefix)), errors_(errors) {
    if (!j_.is_object()) errors_.push_back(where("") + " must be an object");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      errors_.push_back(where(key) + " has the wrong type");
    }
  }

  void mark(const std::string& key) { seen_.insert(key); }
  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }
  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }
  std::string where(const std::string& key) const {
    if (key.empty()) return prefix_.empty() ? "config" : prefix_;
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

  void finish() {
    if (!j_.is_object()) return;
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) errors_.push_back("unknown key '" + where(key) + "'");
  }

private:
  const json& j_;
  std::string prefix_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

std::vector<std::pair<int, double>> read_modes(const json& j, const std::string& where,
                                               std::vector<std::string>& errors) {
  std::vector<std::pair<int, double>> out;
  if (!j.is_array()) {
    errors.push_back(where + " must be a list of [k, amplitude] pairs");
    return out;
  }
  for (const auto& m : j) {
    if (!m.is_array() || m.size() != 2 || !m[0].is_number_integer() || !m[1].is_number()) {
      errors.push_back(where + " entries must be [k, amplitude] with integer k");
      continue;
    }
    out.emplace_back(m[0].get<int>(), m[1].get<double>());
  }
  return out;
}

[[noreturn]] void raise(const std::vector<std::string>& errors) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& e : errors) os << "\n  - " << e;
  throw ConfigError(os.str());
}

bool is_pow2(std::size_t n) { return n >= 8 && (n & (n - 1)) == 0; }

} // namespace

std::string to_string(Backend b) { return b == Backend::spectral ? "spectral" : "realline"; }

std::string to_string(Method m) {
  switch (m) {
  case Method::rk4: return "rk4";
  case Method::rk45: return "rk45";
  case Method::duhamel: return "duhamel";
  }
  return "unknown";
}

void SimConfig::validate() const {
  std::vector<std::string> errors;
  try {
    model.validate();
  } catch (const ParameterError& e) {
    errors.emplace_back(e.what());
  }
  const bool line_model = model.kind == ModelKind::deep_muskat || model.kind == ModelKind::confined_muskat;
  if (backend == Backend::spectral) {
    if (!is_pow2(resolution)) errors.push_back("resolution must be a power of two >= 8 for the spectral backend");
    if (line_model) errors.push_back("model " + to_string(model.kind) + " requires the realline backend");
  } else {
    if (resolution < 8) errors.push_back("resolution must be at least 8 for the realline backend");
    if (!(half_width > 0.0)) errors.push_back("half_width must be positive");
    if (model.kind == ModelKind::deep_model_derivative)
      errors.push_back("deep_model_derivative is only available on the spectral backend");
  }
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) errors.push_back("t_end must be finite and nonnegative");
  if (sample_every == 0) errors.push_back("sample_every must be positive");
  try {
    controller.step.validate();
  } catch (const ParameterError& e) {
    errors.emplace_back(e.what());
  }
  if (controller.method != Method::rk45 && !(controller.step.dt > 0.0))
    errors.push_back("controller.dt must be positive for fixed-step methods");
  if (controller.method == Method::duhamel &&
      !(backend == Backend::spectral && model.kind == ModelKind::confined_model))
    errors.push_back("the duhamel method applies to the spectral confined_model only");
  if (allow_touching && model.kind != ModelKind::confined_model)
    errors.push_back("allow_touching applies to confined_model only");
  for (const auto& c : checks)
    if (!kCheckNames.count(c)) errors.push_back("unknown check '" + c + "'");
  if (!(check_tol >= 0.0) || !(balance_tol >= 0.0) || !(agreement_tol >= 0.0))
    errors.push_back("check tolerances must be nonnegative");
  if (!(decay_tol > 0.0)) errors.push_back("decay_tol must be positive");
  if (!kFamilies.count(initial_data.family)) errors.push_back("unknown initial_data.family '" + initial_data.family + "'");
  if (initial_data.family == "custom_samples" && initial_data.path.empty())
    errors.push_back("initial_data.path is required for custom_samples");
  if (initial_data.family == "boundary_family" && model.kind != ModelKind::confined_model)
    errors.push_back("boundary_family data needs the confined_model");
  if (!(quadrature.abs_tol > 0.0)) errors.push_back("quadrature.abs_tol must be positive");
  if (!errors.empty()) raise(errors);

  // Admissibility of generated data; custom samples are checked when loaded.
  const bool confined = model.kind == ModelKind::confined_model || model.kind == ModelKind::confined_muskat;
  if (confined && initial_data.family != "custom_samples") {
    const auto v = initial_state(*this);
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    const double l = model.depth();
    const bool ok = allow_touching ? m <= l * (1.0 + 64.0 * std::numeric_limits<double>::epsilon()) : m < l - 1e-12;
    if (!ok) {
      std::ostringstream os;
      os << "initial data reaches max|f| = " << m << ", not admissible for depth l = " << l
         << (allow_touching ? "" : " (set allow_touching for boundary-touching data)");
      raise({os.str()});
    }
  }
}

SimConfig config_from_json(const json& j) {
  std::vector<std::string> errors;
  SimConfig c;
  ObjectReader top(j, "", errors);

  if (top.has("model")) {
    ObjectReader m(top.at("model"), "model", errors);
    std::string kind = to_string(c.model.kind);
    m.get("kind", kind);
    try {
      c.model.kind = model_kind_from_string(kind);
    } catch (const ConfigError& e) {
      errors.emplace_back(e.what());
    }
    if (m.has("depth_l") && !m.at("depth_l").is_null()) {
      double l = 0.0;
      m.get("depth_l", l);
      c.model.depth_l = l;
    } else {
      m.mark("depth_l");
    }
    m.get("density_jump", c.model.density_jump);
    m.get("viscosity_eps", c.model.viscosity_eps);
    m.finish();
  } else {
    errors.push_back("model is required");
  }

  std::string backend = to_string(c.backend);
  top.get("backend", backend);
  if (backend == "spectral") c.backend = Backend::spectral;
  else if (backend == "realline") c.backend = Backend::realline;
  else errors.push_back("backend must be spectral or realline");

  top.get("resolution", c.resolution);
  top.get("half_width", c.half_width);

  if (top.has("initial_data")) {
    ObjectReader d(top.at("initial_data"), "initial_data", errors);
    d.get("family", c.initial_data.family);
    d.get("amplitude", c.initial_data.amplitude);
    d.get("exponent", c.initial_data.exponent);
    d.get("path", c.initial_data.path);
    d.get("constant", c.initial_data.constant);
    if (d.has("cos_modes")) c.initial_data.cos_modes = read_modes(d.at("cos_modes"), "initial_data.cos_modes", errors);
    if (d.has("sin_modes")) c.initial_data.sin_modes = read_modes(d.at("sin_modes"), "initial_data.sin_modes", errors);
    d.finish();
  }

  if (top.has("controller")) {
    ObjectReader k(top.at("controller"), "controller", errors);
    std::string method = to_string(c.controller.method);
    k.get("method", method);
    if (method == "rk4") c.controller.method = Method::rk4;
    else if (method == "rk45") c.controller.method = Method::rk45;
    else if (method == "duhamel") c.controller.method = Method::duhamel;
    else errors.push_back("controller.method must be rk4, rk45 or duhamel");
    k.get("dt", c.controller.step.dt);
    k.get("tol_rel", c.controller.step.tol_rel);
    k.get("tol_abs", c.controller.step.tol_abs);
    k.get("dt_min", c.controller.step.dt_min);
    k.get("dt_max", c.controller.step.dt_max);
    k.get("safety", c.controller.step.safety);
    k.finish();
  }

  top.get("t_end", c.t_end);
  top.get("sample_every", c.sample_every);
  top.get("snapshot_every", c.snapshot_every);
  top.get("checks", c.checks);
  top.get("check_tol", c.check_tol);
  top.get("balance_tol", c.balance_tol);
  top.get("agreement_tol", c.agreement_tol);
  top.get("dealias", c.dealias);
  top.get("allow_touching", c.allow_touching);
  top.get("symmetrized", c.symmetrized);
  top.get("profiles", c.profiles);
  top.get("decay_tol", c.decay_tol);

  if (top.has("quadrature")) {
    ObjectReader q(top.at("quadrature"), "quadrature", errors);
    q.get("abs_tol", c.quadrature.abs_tol);
    q.get("singular_halfwidth", c.quadrature.singular_halfwidth);
    q.get("far_cutoff", c.quadrature.far_cutoff);
    q.finish();
  }
  top.finish();
  if (!errors.empty()) raise(errors);
  c.validate();
  return c;
}

json config_to_json(const SimConfig& c) {
  json model = {{"kind", to_string(c.model.kind)},
                {"depth_l", c.model.depth_l ? json(*c.model.depth_l) : json(nullptr)},
                {"density_jump", c.model.density_jump},
                {"viscosity_eps", c.model.viscosity_eps}};
  json data = {{"family", c.initial_data.family},
               {"amplitude", c.initial_data.amplitude},
               {"exponent", c.initial_data.exponent},
               {"path", c.initial_data.path},
               {"constant", c.initial_data.constant},
               {"cos_modes", json::array()},
               {"sin_modes", json::array()}};
  for (const auto& [k, a] : c.initial_data.cos_modes) data["cos_modes"].push_back({k, a});
  for (const auto& [k, b] : c.initial_data.sin_modes) data["sin_modes"].push_back({k, b});
  const auto& s = c.controller.step;
  return {{"model", model},
          {"backend", to_string(c.backend)},
          {"resolution", c.resolution},
          {"half_width", c.half_width},
          {"initial_data", data},
          {"controller",
           {{"method", to_string(c.controller.method)},
            {"dt", s.dt},
            {"tol_rel", s.tol_rel},
            {"tol_abs", s.tol_abs},
            {"dt_min", s.dt_min},
            {"dt_max", s.dt_max},
            {"safety", s.safety}}},
          {"t_end", c.t_end},
          {"sample_every", c.sample_every},
          {"snapshot_every", c.snapshot_every},
          {"checks", c.checks},
          {"check_tol", c.check_tol},
          {"balance_tol", c.balance_tol},
          {"agreement_tol", c.agreement_tol},
          {"dealias", c.dealias},
          {"allow_touching", c.allow_touching},
          {"symmetrized", c.symmetrized},
          {"profiles", c.profiles},
          {"decay_tol", c.decay_tol},
          {"quadrature",
           {{"abs_tol", c.quadrature.abs_tol},
            {"singular_halfwidth", c.quadrature.singular_halfwidth},
            {"far_cutoff", c.quadrature.far_cutoff}}}};
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq), raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &j;
  std::istringstream is(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(is, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError("override '" + key + "': '" + parts[i] + "' is not an object");
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = json::object();
  }
  if (!node->is_object()) throw ConfigError("override '" + key + "': parent is not an object");
  (*node)[parts.back()] = value;
}

std::vector<double> initial_state(const SimConfig& c) {
  const auto& d = c.initial_data;
  const double l = c.model.depth();
  std::vector<double> x = c.backend == Backend::spectral ? PeriodicField::nodes(c.resolution)
                                                         : LineInterface::uniform_nodes(c.resolution, c.half_width);
  std::vector<double> v(x.size());
  if (d.family == "custom_samples") {
    const Snapshot s = load_snapshot(d.path, c.backend);
    if (s.values.size() != c.resolution)
      throw ConfigError("custom_samples: snapshot has " + std::to_string(s.values.size()) + " values, config expects " +
                        std::to_string(c.resolution));
    return s.values;
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double xj = x[j];
    if (d.family == "cos_amplitude") {
      v[j] = d.amplitude * std::cos(xj);
    } else if (d.family == "boundary_family") {
      v[j] = d.amplitude * std::cos(xj) + l - d.amplitude;
    } else if (d.family == "caso1") {
      v[j] = d.amplitude * std::exp(-std::pow(std::abs(xj), d.exponent));
    } else {
      double s = d.constant;
      for (const auto& [k, a] : d.cos_modes) s += a * std::cos(k * xj);
      for (const auto& [k, b] : d.sin_modes) s += b * std::sin(k * xj);
      v[j] = s;
    }
  }
  // Parity of the formula is exact on the grid only up to rounding of the
  // nodes; enforce it so symmetric data stay symmetric to the last bit.
  if (c.backend == Backend::spectral) {
    const std::size_t n = v.size();
    const bool even = d.family != "fourier" || d.sin_modes.empty();
    const bool odd = d.family == "fourier" && d.cos_modes.empty() && d.constant == 0.0;
    if (d.family != "custom_samples" && even) {
      for (std::size_t j = 1; j < n / 2; ++j) v[n - j] = v[j];
    } else if (odd) {
      for (std::size_t j = 1; j < n / 2; ++j) v[n - j] = -v[j];
      v[0] = v[n / 2] = 0.0;
    }
  }
  return v;
}

} // namespace muskat
