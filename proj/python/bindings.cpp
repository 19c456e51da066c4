#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "greeks/analytics/black_scholes.hpp"
#include "greeks/cli/experiment.hpp"
#include "greeks/errors.hpp"

namespace py = pybind11;
using namespace greeks;

namespace {

py::dict to_dict(const vibrato::EstimatorResult& r) {
  py::dict d;
  d["estimate"] = r.estimate;
  d["std_error"] = r.std_error;
  d["variance"] = r.variance;
  d["paths"] = r.M;
  d["MZ"] = r.MZ;
  d["steps"] = r.n;
  d["rejected"] = r.rejected;
  d["wall_time"] = r.wall_time;
  return d;
}

cli::ExperimentConfig config_from(const std::string& text, py::object seed, py::object threads, py::object paths) {
  auto cfg = cli::load_experiment(cli::ConfigFile::parse_string(text));
  cli::Overrides ov;
  if (!seed.is_none()) ov.seed = seed.cast<std::uint64_t>();
  if (!threads.is_none()) ov.threads = threads.cast<int>();
  if (!paths.is_none()) ov.M = paths.cast<std::uint64_t>();
  cli::apply_overrides(cfg, ov);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_greeks, m) {
  m.doc() = "Vibrato + AD Monte Carlo greeks";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "run",
      [](const std::string& text, py::object seed, py::object threads, py::object paths) {
        const auto cfg = config_from(text, seed, threads, paths);
        std::vector<cli::CsvRow> rows;
        {
          py::gil_scoped_release nogil;
          rows = cli::run_experiment(cfg);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d = to_dict(r.result);
          d["greek"] = r.greek;
          d["sweep"] = r.has_sweep ? py::object(py::float_(r.sweep)) : py::none();
          out.append(d);
        }
        return out;
      },
      py::arg("config_text"), py::arg("seed") = py::none(), py::arg("threads") = py::none(),
      py::arg("paths") = py::none(), "Run an experiment given the text of a config file.");

  m.def(
      "run_csv",
      [](const std::string& text, py::object seed, py::object threads) {
        const auto cfg = config_from(text, seed, threads, py::none());
        py::gil_scoped_release nogil;
        return cli::csv_string(cli::run_experiment(cfg), cfg.timing);
      },
      py::arg("config_text"), py::arg("seed") = py::none(), py::arg("threads") = py::none());

  m.def(
      "bench_hessian",
      [](const std::string& text) {
        const auto cfg = config_from(text, py::none(), py::none(), py::none());
        cli::BenchReport rep;
        {
          py::gil_scoped_release nogil;
          rep = cli::bench_hessian(cfg);
        }
        py::dict d;
        d["params"] = rep.params;
        d["fd_seconds"] = rep.fd_seconds;
        d["vrad_seconds"] = rep.vrad_seconds;
        d["fd_evaluations"] = rep.fd_evaluations;
        py::list vrad, fd;
        for (std::size_t a = 0; a < rep.vrad.size(); ++a) {
          py::list rv, rf;
          for (std::size_t b = 0; b < rep.vrad[a].size(); ++b) {
            rv.append(to_dict(rep.vrad[a][b]));
            rf.append(to_dict(rep.fd[a][b]));
          }
          vrad.append(rv);
          fd.append(rf);
        }
        d["vrad"] = vrad;
        d["fd"] = fd;
        d["closed_form"] = rep.closed_form;
        return d;
      },
      py::arg("config_text"));

  m.def("list_methods", [] {
    py::list out;
    for (const auto& mi : cli::method_table()) out.append(py::make_tuple(mi.name, mi.orders, mi.description));
    return out;
  });

  m.def(
      "bs_greek",
      [](const std::string& greek, double x0, double k, double sigma, double r, double t) {
        return analytics::bs_closed_form(x0, k, sigma, r, t, analytics::parse_bs_greek(greek));
      },
      py::arg("greek"), py::arg("x0"), py::arg("k"), py::arg("sigma"), py::arg("r"), py::arg("t"),
      "Black-Scholes call price or greek in closed form.");

  m.attr("CSV_HEADER") = cli::kCsvHeader;
}
