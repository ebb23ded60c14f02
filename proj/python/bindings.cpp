#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lqml/config.hpp"
#include "lqml/cost_model.hpp"
#include "lqml/errors.hpp"
#include "lqml/gauge.hpp"
#include "lqml/halo.hpp"
#include "lqml/odd_even.hpp"
#include "lqml/oracle.hpp"
#include "lqml/perf_model.hpp"
#include "lqml/solver.hpp"
#include "lqml/wilson_dirac.hpp"

namespace py = pybind11;
using namespace lqml;

namespace {

using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

// Spinors cross the boundary as (sites, 12, b) complex arrays.
BlockSpinorField from_numpy(const CArray& a, Layout layout, std::size_t expected_sites) {
  if (a.ndim() != 3 || a.shape(1) != kSpinorComponents) {
    throw ValidationError("spinor arrays must have shape (sites, 12, b)");
  }
  const auto sites = static_cast<std::size_t>(a.shape(0));
  if (sites != expected_sites) {
    throw ValidationError("spinor has " + std::to_string(sites) + " sites, operator expects " +
                          std::to_string(expected_sites));
  }
  const int b = static_cast<int>(a.shape(2));
  BlockSpinorField f(sites, kSpinorComponents, {layout, b});
  auto r = a.unchecked<3>();
  for (std::size_t x = 0; x < sites; ++x)
    for (int k = 0; k < kSpinorComponents; ++k)
      for (int i = 0; i < b; ++i) f.at(x, k, i) = r(x, k, i);
  return f;
}

CArray to_numpy(const BlockSpinorField& f) {
  CArray out({static_cast<py::ssize_t>(f.sites()), static_cast<py::ssize_t>(f.components()),
              static_cast<py::ssize_t>(f.block())});
  auto w = out.mutable_unchecked<3>();
  for (std::size_t x = 0; x < f.sites(); ++x)
    for (int k = 0; k < f.components(); ++k)
      for (int i = 0; i < f.block(); ++i) w(x, k, i) = f.at(x, k, i);
  return out;
}

/// Owns everything a WilsonDirac refers to.
class Problem {
 public:
  Problem(Extents dims, std::uint64_t seed, double m0, const std::string& gauge_mode,
          const std::string& clover_mode, double clover_scale)
      : geom_(dims),
        gauge_(gen_gauge(geom_, parse_gauge(gauge_mode), seed)),
        clover_(gen_clover(geom_, parse_clover(clover_mode), clover_scale, seed + 1)),
        params_{m0},
        dirac_(geom_, gauge_, clover_, params_) {}

  std::size_t n_sites() const { return geom_.n_sites(); }
  Extents dims() const { return geom_.dims(); }
  double m0() const { return params_.m0; }

  CArray apply(const CArray& psi, int layout) const {
    return to_numpy(dirac_.apply(from_numpy(psi, layout_from_int(layout), n_sites())));
  }

  CArray apply_distributed(const CArray& psi, Extents grid, bool concurrent) const {
    DistributedDirac dd(geom_, gauge_, clover_, params_, grid);
    const auto f = from_numpy(psi, Layout::column_major, n_sites());
    return to_numpy(dd.apply(f, concurrent ? ExecutionMode::concurrent : ExecutionMode::sequential));
  }

  CArray apply_schur(const CArray& v) const {
    const SchurOperator s(dirac_);
    return to_numpy(s.apply(from_numpy(v, Layout::column_major, s.oe().half_sites())));
  }

  py::dict solve(const CArray& eta, double tol, int restart_len, int restarts, bool odd_even,
                 bool fixed_iterations, int layout) const {
    GmresConfig cfg;
    cfg.tol = tol;
    cfg.restart_len = restart_len;
    cfg.restarts = restarts;
    cfg.fixed_iterations = fixed_iterations;
    const auto r =
        solve_wilson(dirac_, from_numpy(eta, layout_from_int(layout), n_sites()), cfg, odd_even);
    py::dict d;
    d["x"] = to_numpy(r.x);
    d["history"] = r.gmres.history;
    d["iterations"] = r.gmres.iterations;
    d["cycles"] = r.gmres.cycles;
    d["converged"] = r.gmres.converged;
    d["stagnated"] = r.gmres.stagnated;
    d["explicit_relres"] = r.explicit_relres;
    return d;
  }

  oracle::DenseMatrix dense() const {
    return oracle::assemble_dirac(geom_, gauge_, clover_, params_);
  }
  oracle::DenseMatrix dense_schur() const {
    return oracle::assemble_schur(geom_, gauge_, clover_, params_);
  }

  std::uint64_t count_flops(int b) const {
    BlockSpinorField psi(n_sites(), kSpinorComponents, {Layout::column_major, b});
    return dirac_.count_flops(psi);
  }

  CArray gauge() const {
    CArray out({static_cast<py::ssize_t>(n_sites()), py::ssize_t{4}, py::ssize_t{3},
                py::ssize_t{3}});
    std::copy(gauge_.data().begin(), gauge_.data().end(), out.mutable_data());
    return out;
  }

  py::dict link_defects() const {
    const LinkDefects d = check_links(gauge_);
    py::dict out;
    out["max_unitarity"] = d.max_unitarity;
    out["max_det_error"] = d.max_det_error;
    return out;
  }

 private:
  static GaugeMode parse_gauge(const std::string& s) {
    if (s == "random") return GaugeMode::random;
    if (s == "unit") return GaugeMode::unit;
    throw ValidationError("gauge mode must be random or unit");
  }
  static CloverMode parse_clover(const std::string& s) {
    if (s == "random") return CloverMode::random_hermitian;
    if (s == "zero") return CloverMode::zero;
    throw ValidationError("clover mode must be random or zero");
  }

  LatticeGeometry geom_;
  GaugeField gauge_;
  CloverField clover_;
  DiracParams params_;
  WilsonDirac dirac_;
};

py::tuple run_cost_kernel(const std::string& strategy, const oracle::DenseMatrix& a,
                          const oracle::DenseMatrix& m, int svl) {
  if (a.rows() != 3 || a.cols() != 3 || m.rows() != 3) {
    throw ValidationError("run_kernel expects A of shape (3, 3) and M of shape (3, b)");
  }
  std::array<Complex, 9> av{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) av[r * 3 + c] = a(r, c);
  const int b = static_cast<int>(m.cols());
  std::vector<Complex> mv(3 * b);
  for (int r = 0; r < 3; ++r)
    for (int j = 0; j < b; ++j) mv[r * b + j] = m(r, j);
  const auto res = cost::run_kernel(cost::strategy_from_string(strategy), av, mv, b, svl);
  oracle::DenseMatrix o(3, b);
  for (int r = 0; r < 3; ++r)
    for (int j = 0; j < b; ++j) o(r, j) = res.out[r * b + j];
  return py::make_tuple(o, res.histogram.as_map());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wilson-Dirac operator with multiple right-hand sides";
  m.attr("__version__") = kVersion;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<CommError>(m, "CommError", PyExc_RuntimeError);

  py::class_<Problem>(m, "Problem")
      .def(py::init<Extents, std::uint64_t, double, std::string, std::string, double>(),
           py::arg("dims"), py::arg("seed") = 42, py::arg("m0") = -0.5,
           py::arg("gauge") = "random", py::arg("clover") = "random",
           py::arg("clover_scale") = 0.1)
      .def_property_readonly("n_sites", &Problem::n_sites)
      .def_property_readonly("dims", &Problem::dims)
      .def_property_readonly("m0", &Problem::m0)
      .def("apply", &Problem::apply, py::arg("psi"), py::arg("layout") = 1,
           "eta = D psi for psi of shape (sites, 12, b)")
      .def("apply_distributed", &Problem::apply_distributed, py::arg("psi"), py::arg("grid"),
           py::arg("concurrent") = false)
      .def("apply_schur", &Problem::apply_schur, py::arg("v"),
           "Schur complement on the even half, v of shape (sites/2, 12, b)")
      .def("solve", &Problem::solve, py::arg("eta"), py::arg("tol") = 1e-8,
           py::arg("restart_len") = 10, py::arg("restarts") = 10, py::arg("odd_even") = false,
           py::arg("fixed_iterations") = false, py::arg("layout") = 1)
      .def("dense", &Problem::dense, "dense matrix from the independent oracle")
      .def("dense_schur", &Problem::dense_schur)
      .def("count_flops", &Problem::count_flops, py::arg("b") = 1)
      .def("gauge", &Problem::gauge, "links of shape (sites, 4, 3, 3)")
      .def("link_defects", &Problem::link_defects);

  m.def("arithmetic_intensity", &arithmetic_intensity, py::arg("b"));
  m.def("theoretical_perf", &theoretical_perf, py::arg("bandwidth"), py::arg("b"));
  m.def(
      "effective_bandwidth",
      [](double refill, double writeback, double cycles, double frequency, double cache_line,
         double ranks) {
        return effective_bandwidth({refill, writeback, cycles, frequency, cache_line, ranks});
      },
      py::arg("refill"), py::arg("writeback"), py::arg("cycles"), py::arg("frequency"),
      py::arg("cache_line") = 256.0, py::arg("ranks") = 1.0);
  m.def(
      "read_write_ratio",
      [](int b) {
        const Ratio r = read_write_ratio(b);
        return py::make_tuple(r.num, r.den);
      },
      py::arg("b"));

  m.def("run_kernel", &run_cost_kernel, py::arg("strategy"), py::arg("a"), py::arg("m"),
        py::arg("svl") = 512, "returns (A @ M, instruction histogram)");
  m.def(
      "call_cost",
      [](const std::string& s, int b, int svl, const std::string& weights) {
        return cost::call_cost(cost::strategy_from_string(s), b, svl,
                               cost::CostWeights::preset(weights));
      },
      py::arg("strategy"), py::arg("b"), py::arg("svl") = 512, py::arg("weights") = "uniform");

  m.def(
      "config_canonical", [](const std::string& text) { return RunConfig::parse(text).canonical(); },
      py::arg("text"));
  m.def(
      "config_hash", [](const std::string& text) { return RunConfig::parse(text).hash(); },
      py::arg("text"));
}
