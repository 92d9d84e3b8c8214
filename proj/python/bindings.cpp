#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nfold/commands.hpp"
#include "nfold/errors.hpp"
#include "nfold/modelfile.hpp"
#include "nfold/spectral.hpp"

namespace py = pybind11;
using namespace nfold;

namespace {

CommandOptions options(const std::string& branch, std::optional<int> levels, std::optional<int> grid,
                       std::optional<double> tol, std::uint64_t seed, int threads) {
  CommandOptions opt;
  opt.branch = branch;
  opt.levels = levels;
  opt.grid = grid;
  opt.tol = tol;
  opt.seed = seed;
  opt.threads = threads;
  return opt;
}

// The report crosses the boundary as JSON text; the Python side decodes it.
py::dict result_dict(const CommandResult& r) {
  py::dict d;
  d["exit_code"] = r.exit_code;
  d["report"] = r.report.dump();
  d["csv"] = r.csv;
  d["plot"] = r.plot;
  d["summary"] = r.summary;
  return d;
}

std::vector<std::vector<cplx>> matrix_rows(const Eigen::MatrixXcd& m) {
  std::vector<std::vector<cplx>> rows(m.rows(), std::vector<cplx>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  }
  return rows;
}

Branch branch_of(const std::string& b) {
  if (b == "minus") return Branch::minus;
  if (b == "plus") return Branch::plus;
  throw py::value_error("branch must be 'minus' or 'plus'");
}

}  // namespace

PYBIND11_MODULE(_nfold, m) {
  m.doc() = "Native core of the nfold toolkit";

  static py::exception<Error> base(m, "NfoldError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      base(e.what());
    }
  });

  m.attr("report_schema_version") = report_schema_version;

  m.def(
      "run_command",
      [](const std::string& command, const std::string& path, const std::string& branch, std::optional<int> levels,
         std::optional<int> grid, std::optional<double> tol, std::uint64_t seed, int threads) {
        CommandResult r;
        {
          py::gil_scoped_release release;
          r = run_command(command, path, options(branch, levels, grid, tol, seed, threads));
        }
        return result_dict(r);
      },
      py::arg("command"), py::arg("path"), py::kw_only(), py::arg("branch") = "minus", py::arg("levels") = py::none(),
      py::arg("grid") = py::none(), py::arg("tol") = py::none(), py::arg("seed") = 0, py::arg("threads") = 0);

  m.def(
      "run_command_text",
      [](const std::string& command, const std::string& text, const std::string& branch, std::optional<int> levels,
         std::optional<int> grid, std::optional<double> tol, std::uint64_t seed, int threads) {
        CommandResult r;
        {
          py::gil_scoped_release release;
          r = run_command_text(command, text, options(branch, levels, grid, tol, seed, threads));
        }
        return result_dict(r);
      },
      py::arg("command"), py::arg("text"), py::kw_only(), py::arg("branch") = "minus", py::arg("levels") = py::none(),
      py::arg("grid") = py::none(), py::arg("tol") = py::none(), py::arg("seed") = 0, py::arg("threads") = 0);

  py::class_<ModelFile>(m, "Model")
      .def_static("load", &load_model_file, py::arg("path"))
      .def_static("parse", &parse_model_file, py::arg("text"))
      .def_readonly("name", &ModelFile::name)
      .def_property_readonly("kind", [](const ModelFile& f) { return std::string(to_string(f.kind)); })
      .def_readonly("N", &ModelFile::N)
      .def_readonly("params", &ModelFile::params)
      .def_property_readonly("domain",
                             [](const ModelFile& f) {
                               return py::make_tuple(f.dom.lo(), f.dom.hi(),
                                                     f.dom.boundary() == Boundary::periodic ? "periodic" : "dirichlet");
                             })
      .def(
          "verify",
          [](const ModelFile& f, int samples, double tol, std::uint64_t seed) {
            const VerifyReport r = verify(f.system(), samples, tol, seed);
            py::dict d;
            d["pass"] = r.pass;
            d["max_abs_R1"] = r.max_abs_R1;
            d["max_abs_R2"] = r.max_abs_R2;
            d["max_rel_R1"] = r.max_rel_R1;
            d["max_rel_R2"] = r.max_rel_R2;
            d["samples"] = r.samples;
            return d;
          },
          py::arg("samples") = 64, py::arg("tol") = 1e-9, py::arg("seed") = 0)
      .def(
          "s_matrix",
          [](const ModelFile& f, const std::string& branch) {
            const SMatrix s = s_matrix(f.type_a(), branch_of(branch));
            py::dict d;
            d["entries"] = matrix_rows(s.entries);
            d["charpoly"] = s.charpoly;
            d["roots"] = s.roots;
            d["constancy"] = s.constancy;
            d["certified"] = s.certified;
            return d;
          },
          py::arg("branch") = "minus", "S-matrix of a type A model")
      .def(
          "grid_levels",
          [](const ModelFile& f, const std::string& branch, int levels, int n) {
            const SuperSystem sys = f.system();
            GridSpec spec;
            spec.dom = f.dom;
            spec.n = n;
            const SpectrumReport r =
                grid_spectrum(branch_of(branch) == Branch::minus ? sys.Vminus : sys.Vplus, spec, levels);
            return py::make_tuple(r.eigenvalues, r.richardson);
          },
          py::arg("branch") = "minus", py::arg("levels") = 6, py::arg("n") = 4096,
          "Lowest finite-difference levels and their Richardson extrapolations")
      .def("index", [](const ModelFile& f) { return witten_index(f.type_a()).index; });
}
