#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "muskat/diagnostics.hpp"
#include "muskat/error.hpp"
#include "muskat/experiments.hpp"
#include "muskat/models.hpp"
#include "muskat/realline.hpp"
#include "muskat/spectral.hpp"

#include <vector>

namespace py = pybind11;
using namespace muskat;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vec(const Array& a) {
  if (a.ndim() != 1) throw InputError("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Array to_array(const PeriodicField& f) { return to_array(f.values()); }

PeriodicField as_field(const Array& a) { return PeriodicField(to_vec(a)); }

SpectralOptions options(bool dealias, bool allow_touching) {
  return {dealias, allow_touching ? Admissibility::allow_touching : Admissibility::strict};
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json py_to_json(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict records_to_py(const std::vector<DiagnosticsRecord>& rows) {
  py::dict out;
  for (const auto& c : record_columns()) {
    std::vector<double> col;
    col.reserve(rows.size());
    for (const auto& r : rows) col.push_back(r.*(c.member));
    out[c.name] = to_array(col);
  }
  return out;
}

py::dict result_to_py(const RunResult& r) {
  py::dict d;
  d["manifest"] = json_to_py(r.manifest.to_json());
  d["records"] = records_to_py(r.records);
  return d;
}

LineInterface line(const Array& nodes, const Array& values) { return LineInterface(to_vec(nodes), to_vec(values)); }

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Confined and deep-water Muskat interface solvers";

  auto base = py::register_exception<Error>(m, "MuskatError", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<AdmissibilityError>(m, "AdmissibilityError", base.ptr());
  py::register_exception<IntegrationError>(m, "IntegrationError", base.ptr());
  py::register_exception<StepSizeUnderflow>(m, "StepSizeUnderflow", base.ptr());
  py::register_exception<CheckRefused>(m, "CheckRefused", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  m.def("grid", [](std::size_t n) { return to_array(PeriodicField::nodes(n)); }, py::arg("n"),
        "Nodes x_j = -pi + 2 pi j / n of the periodic grid.");
  m.def("lambda_op", [](const Array& f, double s) { return to_array(lambda_op(as_field(f), s)); }, py::arg("f"),
        py::arg("s") = 1.0);
  m.def("hilbert", [](const Array& f) { return to_array(hilbert(as_field(f))); }, py::arg("f"));
  m.def("derivative", [](const Array& f) { return to_array(derivative(as_field(f))); }, py::arg("f"));
  m.def("semigroup", [](const Array& f, double t, double c) { return to_array(semigroup(as_field(f), t, c)); },
        py::arg("f"), py::arg("t"), py::arg("c"));
  m.def("sobolev_seminorm", [](const Array& f, double s) { return sobolev_seminorm(as_field(f), s); }, py::arg("f"),
        py::arg("s"));
  m.def("confined_constant", &confined_constant, py::arg("l"));

  m.def(
      "rhs_confined_model",
      [](const Array& f, double l, bool dealias, bool allow_touching) {
        return to_array(rhs_confined_model(as_field(f), l, options(dealias, allow_touching)));
      },
      py::arg("f"), py::arg("l"), py::arg("dealias") = true, py::arg("allow_touching") = false);
  m.def(
      "rhs_deep_model", [](const Array& f, bool dealias) { return to_array(rhs_deep_model(as_field(f), options(dealias, false))); },
      py::arg("f"), py::arg("dealias") = true);
  m.def(
      "rhs_deep_model_derivative",
      [](const Array& g, double eps, bool dealias) {
        return to_array(rhs_deep_model_derivative(as_field(g), eps, options(dealias, false)));
      },
      py::arg("g"), py::arg("eps") = 0.0, py::arg("dealias") = true);
  m.def(
      "stability_report",
      [](const Array& f, double l) {
        const auto r = stability_report(as_field(f), l);
        py::dict d;
        d["sigma"] = r.sigma;
        d["argmax_node"] = r.argmax_node;
        d["stable"] = r.stable;
        d["margin"] = r.margin;
        return d;
      },
      py::arg("f"), py::arg("l"));

  m.def("uniform_nodes", [](std::size_t n, double L) { return to_array(LineInterface::uniform_nodes(n, L)); },
        py::arg("n"), py::arg("half_width"));
  m.def(
      "pv_integral_deep",
      [](const Array& nodes, const Array& values, double x, double abs_tol) {
        QuadratureSettings q;
        q.abs_tol = abs_tol;
        return pv_integral_deep(line(nodes, values), x, q);
      },
      py::arg("nodes"), py::arg("values"), py::arg("x"), py::arg("abs_tol") = 1e-9);
  m.def(
      "pv_integral_confined",
      [](const Array& nodes, const Array& values, double x, double abs_tol) {
        QuadratureSettings q;
        q.abs_tol = abs_tol;
        return pv_integral_confined(line(nodes, values), x, q);
      },
      py::arg("nodes"), py::arg("values"), py::arg("x"), py::arg("abs_tol") = 1e-9);
  m.def(
      "lambda_line",
      [](const Array& nodes, const Array& values, double x) { return lambda_line(line(nodes, values), x, {}); },
      py::arg("nodes"), py::arg("values"), py::arg("x"));

  m.def(
      "validate_config", [](const py::object& cfg) { return json_to_py(config_to_json(config_from_json(py_to_json(cfg)))); },
      py::arg("config"), "Parse and validate a config dict; returns it with every default filled in.");
  m.def(
      "initial_state", [](const py::object& cfg) { return to_array(initial_state(config_from_json(py_to_json(cfg)))); },
      py::arg("config"));
  m.def(
      "run",
      [](const py::object& cfg, const std::filesystem::path& out) {
        const auto c = config_from_json(py_to_json(cfg));
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(c, out);
        }
        return result_to_py(r);
      },
      py::arg("config"), py::arg("out_dir"), "Run a simulation; writes its artifacts into out_dir.");
  m.def(
      "compare_depths",
      [](const py::object& cfg, const std::filesystem::path& out) {
        const auto c = config_from_json(py_to_json(cfg));
        Comparison cmp;
        {
          py::gil_scoped_release release;
          cmp = compare_depths(c, out);
        }
        py::dict d;
        std::vector<double> t, lc, ld, gap, diff;
        std::vector<bool> ordered;
        for (const auto& r : cmp.rows) {
          t.push_back(r.t);
          lc.push_back(r.linf_confined);
          ld.push_back(r.linf_deep);
          gap.push_back(r.linf_gap);
          diff.push_back(r.max_pointwise);
          ordered.push_back(r.ordered);
        }
        d["t"] = to_array(t);
        d["linf_confined"] = to_array(lc);
        d["linf_deep"] = to_array(ld);
        d["linf_gap"] = to_array(gap);
        d["max_pointwise"] = to_array(diff);
        d["ordered"] = ordered;
        d["confined"] = result_to_py(cmp.confined);
        d["deep"] = result_to_py(cmp.deep);
        return d;
      },
      py::arg("config"), py::arg("out_dir"));
  m.def(
      "load_snapshot",
      [](const std::filesystem::path& path) {
        const auto s = load_snapshot(path);
        py::dict d;
        d["backend"] = to_string(s.backend);
        d["label"] = s.label;
        d["t"] = s.t;
        d["values"] = to_array(s.values);
        if (s.backend == Backend::realline) {
          d["nodes"] = to_array(s.nodes);
          d["half_width"] = s.half_width;
        }
        return d;
      },
      py::arg("path"));
  m.def("read_diagnostics", [](const std::filesystem::path& path) { return records_to_py(read_records_csv(path)); },
        py::arg("path"));
}
