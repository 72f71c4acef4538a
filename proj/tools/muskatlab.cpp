// muskatlab: run interface simulations and reproduce the depth comparison and
// boundary-touching experiments as data files.

#include "muskat/error.hpp"
#include "muskat/experiments.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using muskat::SimConfig;
using nlohmann::json;

SimConfig resolve_config(const std::string& path, const std::vector<std::string>& overrides) {
  json j;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw muskat::ConfigError("cannot open config '" + path + "'");
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw muskat::ConfigError("config '" + path + "': " + e.what());
    }
  } else {
    j = json::object();
  }
  for (const auto& o : overrides) muskat::apply_override(j, o);
  return muskat::config_from_json(j);
}

void print_run(const std::string& label, const muskat::RunResult& r) {
  const auto& m = r.manifest;
  std::printf("%s: %s at t = %.6g after %zu steps (%zu rejected), %zu samples\n", label.c_str(),
              muskat::to_string(m.termination).c_str(), m.final_t, m.accepted_steps, m.rejected_steps,
              r.records.size());
  if (!m.message.empty()) std::printf("  %s\n", m.message.c_str());
  for (const auto& c : m.checks) {
    if (c.refused)
      std::printf("  check %-16s refused: %s\n", c.name.c_str(), c.reason.c_str());
    else
      std::printf("  check %-16s %zu/%zu satisfied\n", c.name.c_str(), c.samples - c.violations, c.samples);
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interface evolution in confined and deep porous media"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::vector<std::string> overrides;
  std::vector<double> a_values{0.1, 0.2, 0.3, 0.4};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--override", overrides, "dotted.key=value (repeatable)");
  };
  auto* run = app.add_subcommand("run", "Run one simulation");
  add_common(run);
  auto* cmp = app.add_subcommand("compare-depths", "Run the confined and deep Muskat pair on the same data");
  add_common(cmp);
  auto* sweep = app.add_subcommand("boundary-sweep", "Confined-model runs from data touching the wall");
  add_common(sweep);
  sweep->add_option("--a", a_values, "Family parameters a (repeatable)");
  auto* check = app.add_subcommand("check", "Re-evaluate the configured checks of a finished run");
  check->add_option("--out", out_dir, "Run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      print_run("run", muskat::run(resolve_config(config_path, overrides), out_dir));
    } else if (*cmp) {
      const auto c = muskat::compare_depths(resolve_config(config_path, overrides), out_dir);
      print_run("confined", c.confined);
      print_run("deep", c.deep);
      std::size_t bad = 0;
      for (const auto& r : c.rows) bad += r.ordered ? 0 : 1;
      std::printf("ordering ‖f^{π/2}‖∞ >= ‖f^∞‖∞ held at %zu/%zu common samples\n", c.rows.size() - bad,
                  c.rows.size());
      if (c.confined.manifest.termination != muskat::Termination::completed ||
          c.deep.manifest.termination != muskat::Termination::completed)
        std::printf("comparison incomplete: a run halted before t_end\n");
    } else if (*sweep) {
      const auto entries = muskat::boundary_sweep(resolve_config(config_path, overrides), a_values, out_dir);
      for (const auto& e : entries) {
        char label[32];
        std::snprintf(label, sizeof label, "a = %g", e.a);
        print_run(label, e.result);
      }
    } else if (*check) {
      for (const auto& c : muskat::recheck(out_dir)) {
        if (c.refused)
          std::printf("check %-16s refused: %s\n", c.name.c_str(), c.reason.c_str());
        else
          std::printf("check %-16s %zu/%zu satisfied\n", c.name.c_str(), c.samples - c.violations, c.samples);
      }
    }
  } catch (const muskat::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const muskat::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
