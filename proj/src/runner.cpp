#include "muskat/error.hpp"
#include "muskat/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#ifndef MUSKAT_VERSION
#define MUSKAT_VERSION "0.0.0"
#endif

namespace muskat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

std::string indexed(const std::string& stem, std::size_t i, const std::string& ext) {
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%06zu", i);
  return stem + "_" + buf.data() + ext;
}

// Everything the loop needs to know about one backend/model combination.
struct Problem {
  Rhs rhs;
  std::function<DiagnosticsRecord(double, const State&)> record;
  std::function<void(const State&)> check_start;
  std::function<Snapshot(double, const State&)> snapshot;
};

Problem make_problem(const SimConfig& c) {
  Problem p;
  const ModelSpec spec = c.model;
  const double l = spec.depth();
  const Admissibility mode = c.allow_touching ? Admissibility::allow_touching : Admissibility::strict;
  const SpectralOptions opts{c.dealias, mode};

  if (c.backend == Backend::spectral) {
    switch (spec.kind) {
    case ModelKind::confined_model:
      p.rhs = [l, opts](const State& y) { return rhs_confined_model(PeriodicField(y), l, opts).release(); };
      p.check_start = [l, mode](const State& y) { check_admissible(y, l, mode); };
      break;
    case ModelKind::deep_model:
      p.rhs = [opts](const State& y) { return rhs_deep_model(PeriodicField(y), opts).release(); };
      break;
    case ModelKind::deep_model_derivative: {
      const double eps = spec.viscosity_eps;
      p.rhs = [eps, opts](const State& y) { return rhs_deep_model_derivative(PeriodicField(y), eps, opts).release(); };
      break;
    }
    default:
      throw ConfigError("model " + to_string(spec.kind) + " requires the realline backend");
    }
    RecordContext ctx;
    ctx.l = l;
    ctx.g_equation = spec.kind == ModelKind::deep_model_derivative;
    ctx.symmetrized = c.symmetrized;
    const bool touch = std::count(c.checks.begin(), c.checks.end(), "touching_point") > 0 ||
                       c.initial_data.family == "boundary_family";
    if (touch && spec.kind == ModelKind::confined_model) {
      const PeriodicField f0(initial_state(c));
      ctx.touch_node = find_touch_node(f0, l);
    }
    const Rhs rhs = p.rhs;
    p.record = [ctx, rhs](double t, const State& y) {
      const PeriodicField f(y);
      if (ctx.g_equation) {
        const PeriodicField ft(rhs(y), "g_t");
        return compute_record(t, f, ctx, &ft);
      }
      return compute_record(t, f, ctx);
    };
    p.snapshot = [](double t, const State& y) {
      Snapshot s;
      s.backend = Backend::spectral;
      s.t = t;
      s.values = y;
      return s;
    };
    return p;
  }

  const auto nodes = LineInterface::uniform_nodes(c.resolution, c.half_width);
  const QuadratureSettings q = c.quadrature;
  auto make_itf = [nodes](const State& y) { return LineInterface(nodes, y); };
  switch (spec.kind) {
  case ModelKind::deep_muskat:
    p.rhs = [=](const State& y) { return rhs_deep_muskat(make_itf(y), spec, q); };
    break;
  case ModelKind::confined_muskat:
    p.rhs = [=](const State& y) { return rhs_confined_muskat(make_itf(y), spec, q); };
    break;
  case ModelKind::confined_model:
    p.rhs = [=](const State& y) { return rhs_confined_model_line(make_itf(y), l, q, mode); };
    break;
  case ModelKind::deep_model:
    p.rhs = [=](const State& y) { return rhs_deep_model_line(make_itf(y), q); };
    break;
  default:
    throw ConfigError("model " + to_string(spec.kind) + " is not available on the realline backend");
  }
  const double decay_tol = c.decay_tol;
  p.check_start = [=](const State& y) {
    const LineInterface itf = make_itf(y);
    itf.check_far_field(decay_tol);
    q.resolved(itf);
    if (spec.kind == ModelKind::confined_muskat) check_confined_admissible(itf);
    if (spec.kind == ModelKind::confined_model) check_admissible(y, l, mode);
  };
  RecordContext ctx;
  ctx.l = l;
  p.record = [=](double t, const State& y) { return compute_record(t, make_itf(y), ctx, q); };
  const double hw = c.half_width;
  p.snapshot = [nodes, hw](double t, const State& y) {
    Snapshot s;
    s.backend = Backend::realline;
    s.t = t;
    s.half_width = hw;
    s.nodes = nodes;
    s.values = y;
    return s;
  };
  return p;
}

void write_profile(const State& y, const fs::path& path) {
  const std::size_t n = y.size();
  std::vector<double> fx(n), lam(n), fxx(n);
  detail::apply_symbol(y, fx, detail::Symbol::derivative);
  detail::apply_symbol(y, lam, detail::Symbol::lambda);
  detail::apply_symbol(y, fxx, detail::Symbol::second_derivative);
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << "x,f,f_x,lambda_f,f_xx\n";
  std::array<char, 160> buf{};
  for (std::size_t j = 0; j < n; ++j) {
    std::snprintf(buf.data(), buf.size(), "%.17g,%.17g,%.17g,%.17g,%.17g\n", PeriodicField::node(j, n), y[j], fx[j],
                  lam[j], fxx[j]);
    out << buf.data();
  }
}

CheckSummary summarize(const std::string& name, const std::vector<BoundCheck>& rows) {
  CheckSummary s;
  s.name = name;
  s.samples = rows.size();
  for (const auto& r : rows)
    if (!r.satisfied) ++s.violations;
  return s;
}

struct CheckOutput {
  std::vector<CheckSummary> summaries;
  std::vector<std::pair<std::string, std::vector<BoundCheck>>> tables;
  std::vector<TouchSample> touch;
};

CheckOutput evaluate_checks(const SimConfig& c, const std::vector<DiagnosticsRecord>& rec, const State& y0) {
  CheckOutput out;
  const double l = c.model.depth();
  const double dt = c.controller.method == Method::rk45 ? 0.0 : c.controller.step.dt;
  const double tol = effective_check_tol(c.check_tol, dt);
  for (const auto& name : c.checks) {
    try {
      std::vector<BoundCheck> rows;
      if (name == "max_principle") {
        rows = maximum_principle(rec);
      } else if (name == "parity_even") {
        rows = parity_check(rec, "even");
      } else if (name == "parity_odd") {
        rows = parity_check(rec, "odd");
      } else if (name == "linf_torus") {
        if (c.backend != Backend::spectral || c.model.kind != ModelKind::confined_model)
          throw CheckRefused("linf_torus needs a spectral confined_model run");
        rows = decay_bound_linf_torus(rec, PeriodicField(y0), l, tol);
      } else if (name == "hhalf_decay") {
        rows = decay_bound_hhalf(rec, tol);
      } else if (name == "sigma_energy") {
        rows = energy_balance_sigma(rec, tol);
      } else if (name == "linf_line") {
        if (c.backend != Backend::realline || !std::isfinite(l))
          throw CheckRefused("linf_line needs a finite-depth realline run");
        rows = decay_bound_linf_line(rec, l, rec.empty() ? 0.0 : rec.back().t, tol);
      } else if (name == "entropy") {
        if (c.model.kind != ModelKind::deep_model_derivative) throw CheckRefused("entropy needs a g-equation run");
        rows = entropy_balance_deep(rec, c.balance_tol, c.agreement_tol).checks;
      } else if (name == "referee") {
        if (c.model.kind != ModelKind::deep_model_derivative) throw CheckRefused("referee needs a g-equation run");
        rows = referee_energy_balance(rec, c.balance_tol).checks;
      } else if (name == "touching_point") {
        out.touch = touching_point_tracker(rec, l);
        for (const auto& s : out.touch) {
          auto add = [&](const char* n, double measured, double bound) {
            BoundCheck b;
            b.name = n;
            b.t = s.t;
            b.measured = measured;
            b.bound = bound;
            b.slack = bound - measured;
            b.satisfied = measured <= bound;
            rows.push_back(b);
          };
          add("touch_drift", std::abs(s.drift), c.balance_tol);
          add("touch_sigma", std::abs(s.sigma), c.balance_tol);
          add("touch_ode", s.ode_discrepancy, c.agreement_tol);
        }
      }
      out.summaries.push_back(summarize(name, rows));
      out.tables.emplace_back(name, std::move(rows));
    } catch (const CheckRefused& e) {
      CheckSummary s;
      s.name = name;
      s.refused = true;
      s.reason = e.what();
      out.summaries.push_back(s);
    }
  }
  return out;
}

void write_touch_csv(const std::vector<TouchSample>& rows, const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << "t,value,drift,curvature,curvature_ode,ode_discrepancy,lambda,sigma,exp_factor\n";
  std::array<char, 512> buf{};
  for (const auto& s : rows) {
    std::snprintf(buf.data(), buf.size(), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.value,
                  s.drift, s.curvature, s.curvature_ode, s.ode_discrepancy, s.lambda, s.sigma, s.exp_factor);
    out << buf.data();
  }
}

void add_artifact(RunManifest& m, const fs::path& root, const fs::path& file) {
  m.artifacts.push_back({fs::relative(file, root).generic_string(), sha256_file(file)});
}

void write_json(const json& j, const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw InputError("cannot write '" + path.string() + "'");
}

} // namespace

std::string to_string(Termination t) {
  switch (t) {
  case Termination::completed: return "completed";
  case Termination::halted_boundary: return "halted-boundary";
  case Termination::halted_dt_underflow: return "halted-dt-underflow";
  }
  return "unknown";
}

json RunManifest::to_json() const {
  json arts = json::array();
  for (const auto& a : artifacts) arts.push_back({{"path", a.path}, {"sha256", a.sha256}});
  json cks = json::array();
  for (const auto& c : checks) {
    json e = {{"name", c.name}, {"samples", c.samples}, {"violations", c.violations}, {"refused", c.refused}};
    if (c.refused) e["reason"] = c.reason;
    cks.push_back(e);
  }
  return {{"config", config},
          {"code_version", code_version},
          {"start_time", start_time},
          {"end_time", end_time},
          {"termination", muskat::to_string(termination)},
          {"message", message},
          {"final_t", final_t},
          {"accepted_steps", accepted_steps},
          {"rejected_steps", rejected_steps},
          {"artifacts", arts},
          {"checks", cks}};
}

RunResult run(const SimConfig& config, const fs::path& out_dir) {
  config.validate();
  RunResult result;
  RunManifest& m = result.manifest;
  m.config = config_to_json(config);
  m.code_version = std::string("muskatlab ") + MUSKAT_VERSION;
  m.start_time = utc_now();

  State y = initial_state(config);
  const State y0 = y;
  const Problem p = make_problem(config);
  try {
    if (p.check_start) p.check_start(y);
  } catch (const Error& e) {
    throw ConfigError(std::string("initial data rejected: ") + e.what());
  }

  fs::create_directories(out_dir);
  write_json(m.config, out_dir / "config.json");

  double t = 0.0;
  std::size_t accepted = 0;
  bool sampled_last = false;
  auto sample = [&] {
    result.records.push_back(p.record(t, y));
    result.samples.push_back(y);
    sampled_last = true;
  };
  sample();

  const auto& ctl = config.controller;
  std::optional<Rk45Stepper> stepper;
  if (ctl.method == Method::rk45) stepper.emplace(ctl.step);
  const double l = config.model.depth();
  const SpectralOptions opts{config.dealias,
                             config.allow_touching ? Admissibility::allow_touching : Admissibility::strict};
  try {
    while (t < config.t_end) {
      if (ctl.method == Method::rk45) {
        const auto r = stepper->step(y, t, p.rhs, config.t_end);
        y = r.state;
        t = r.dt_used >= config.t_end - t ? config.t_end : t + r.dt_used;
        m.rejected_steps += r.rejected;
      } else {
        const double t_next = std::min(config.t_end, static_cast<double>(accepted + 1) * ctl.step.dt);
        const double h = t_next - t;
        if (ctl.method == Method::rk4)
          y = rk4_step(y, p.rhs, h);
        else
          y = duhamel_step(PeriodicField(y), l, h, opts).release();
        t = t_next;
      }
      ++accepted;
      sampled_last = false;
      if (accepted % config.sample_every == 0 || t >= config.t_end) sample();
    }
    m.termination = Termination::completed;
  } catch (const AdmissibilityError& e) {
    m.termination = Termination::halted_boundary;
    m.message = e.what();
  } catch (const StepSizeUnderflow& e) {
    m.termination = Termination::halted_dt_underflow;
    m.message = e.what();
  }
  if (!sampled_last) sample();
  m.accepted_steps = accepted;
  m.final_t = t;

  write_records_csv(result.records, out_dir / "diagnostics.csv");
  add_artifact(m, out_dir, out_dir / "config.json");
  add_artifact(m, out_dir, out_dir / "diagnostics.csv");

  const std::size_t ns = result.samples.size();
  for (std::size_t i = 0; i < ns; ++i) {
    const bool keep = i == 0 || i + 1 == ns || (config.snapshot_every > 0 && i % config.snapshot_every == 0);
    if (!keep) continue;
    const fs::path path = out_dir / "snapshots" / indexed("snap", i, ".txt");
    emit_snapshot(p.snapshot(result.records[i].t, result.samples[i]), path);
    add_artifact(m, out_dir, path);
    if (config.profiles && config.backend == Backend::spectral) {
      const fs::path prof = out_dir / "profiles" / indexed("profile", i, ".csv");
      write_profile(result.samples[i], prof);
      add_artifact(m, out_dir, prof);
    }
  }

  CheckOutput checks = evaluate_checks(config, result.records, y0);
  for (const auto& [name, rows] : checks.tables) {
    const fs::path path = out_dir / "checks" / (name + ".csv");
    write_checks_csv(rows, path);
    add_artifact(m, out_dir, path);
  }
  if (!checks.touch.empty()) {
    const fs::path path = out_dir / "checks" / "touching_point_series.csv";
    write_touch_csv(checks.touch, path);
    add_artifact(m, out_dir, path);
  }
  m.checks = std::move(checks.summaries);
  m.end_time = utc_now();
  write_json(m.to_json(), out_dir / "manifest.json");
  return result;
}

std::vector<CheckSummary> recheck(const fs::path& run_dir) {
  const SimConfig config = load_config(run_dir / "config.json");
  const auto records = read_records_csv(run_dir / "diagnostics.csv");
  const fs::path first = run_dir / "snapshots" / indexed("snap", 0, ".txt");
  const Snapshot s = load_snapshot(first, config.backend);
  return evaluate_checks(config, records, s.values).summaries;
}

Comparison compare_depths(const SimConfig& confined, const SimConfig& deep, const fs::path& out_dir) {
  if (confined.model.kind != ModelKind::confined_muskat || deep.model.kind != ModelKind::deep_muskat)
    throw ConfigError("compare_depths: need one confined_muskat and one deep_muskat config");
  const auto& a = confined;
  const auto& b = deep;
  if (a.backend != b.backend || a.resolution != b.resolution || a.half_width != b.half_width ||
      a.controller.method != b.controller.method || a.controller.step.dt != b.controller.step.dt ||
      a.t_end != b.t_end || a.sample_every != b.sample_every || a.controller.method == Method::rk45)
    throw ConfigError("compare_depths: the two runs must share grid, fixed time step, horizon and sampling");
  if (initial_state(a) != initial_state(b)) throw ConfigError("compare_depths: initial data differ");

  Comparison cmp;
  cmp.confined = run(a, out_dir / "confined");
  cmp.deep = run(b, out_dir / "deep");
  const std::size_t rows = std::min(cmp.confined.records.size(), cmp.deep.records.size());
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& rc = cmp.confined.records[i];
    const auto& rd = cmp.deep.records[i];
    ComparisonRow r;
    r.t = rc.t;
    r.linf_confined = rc.linf;
    r.linf_deep = rd.linf;
    r.linf_gap = rc.linf - rd.linf;
    const auto& fc = cmp.confined.samples[i];
    const auto& fd = cmp.deep.samples[i];
    for (std::size_t j = 0; j < fc.size(); ++j) r.max_pointwise = std::max(r.max_pointwise, std::abs(fc[j] - fd[j]));
    r.ordered = rc.t == 0.0 || rc.linf >= rd.linf;
    cmp.rows.push_back(r);
  }

  std::ofstream out(out_dir / "comparison.csv");
  out << "t,linf_confined,linf_deep,linf_gap,max_pointwise_difference,ordered\n";
  std::array<char, 256> buf{};
  for (const auto& r : cmp.rows) {
    std::snprintf(buf.data(), buf.size(), "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.t, r.linf_confined, r.linf_deep,
                  r.linf_gap, r.max_pointwise, r.ordered ? 1 : 0);
    out << buf.data();
  }
  out.close();
  std::size_t violations = 0;
  for (const auto& r : cmp.rows) violations += r.ordered ? 0 : 1;
  write_json({{"confined", to_string(cmp.confined.manifest.termination)},
              {"deep", to_string(cmp.deep.manifest.termination)},
              {"rows", cmp.rows.size()},
              {"ordering_violations", violations},
              {"comparison_sha256", sha256_file(out_dir / "comparison.csv")}},
             out_dir / "comparison.json");
  return cmp;
}

Comparison compare_depths(const SimConfig& base, const fs::path& out_dir) {
  SimConfig confined = base, deep = base;
  confined.model.kind = ModelKind::confined_muskat;
  confined.model.depth_l.reset();
  deep.model.kind = ModelKind::deep_muskat;
  deep.model.depth_l.reset();
  return compare_depths(confined, deep, out_dir);
}

std::vector<SweepEntry> boundary_sweep(const SimConfig& base, const std::vector<double>& a_values,
                                       const fs::path& out_dir) {
  if (base.model.kind != ModelKind::confined_model) throw ConfigError("boundary_sweep: needs the confined_model");
  const double l = base.model.depth();
  for (double a : a_values)
    if (!(a > 0.0 && a < l)) throw ConfigError("boundary_sweep: every a must lie in (0, l)");
  std::vector<SweepEntry> out;
  json entries = json::array();
  for (double a : a_values) {
    SimConfig c = base;
    c.initial_data = InitialData{};
    c.initial_data.family = "boundary_family";
    c.initial_data.amplitude = a;
    c.allow_touching = true;
    if (std::find(c.checks.begin(), c.checks.end(), "touching_point") == c.checks.end())
      c.checks.push_back("touching_point");
    std::array<char, 32> name{};
    std::snprintf(name.data(), name.size(), "a_%g", a);
    SweepEntry e;
    e.a = a;
    e.result = run(c, out_dir / name.data());
    for (const auto& r : e.result.records) e.max_linf = std::max(e.max_linf, r.linf);
    e.admissible = e.max_linf <= l * (1.0 + 64.0 * std::numeric_limits<double>::epsilon());
    entries.push_back({{"a", a},
                       {"directory", name.data()},
                       {"termination", to_string(e.result.manifest.termination)},
                       {"final_t", e.result.manifest.final_t},
                       {"max_linf", e.max_linf},
                       {"admissible", e.admissible}});
    out.push_back(std::move(e));
  }
  write_json({{"depth_l", l}, {"runs", entries}}, out_dir / "sweep.json");
  return out;
}

} // namespace muskat
