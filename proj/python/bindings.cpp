#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fbmpersist/covmodel.hpp"
#include "fbmpersist/curve.hpp"
#include "fbmpersist/errors.hpp"
#include "fbmpersist/geometry.hpp"
#include "fbmpersist/persistence.hpp"
#include "fbmpersist/records.hpp"
#include "fbmpersist/sampler.hpp"
#include "fbmpersist/verify.hpp"

namespace py = pybind11;
using namespace fbmpersist;

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<Point> to_points(const Matrix& m) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Point p;
    p.coords.assign(m.row(i).data(), m.row(i).data() + m.cols());
    pts.push_back(std::move(p));
  }
  return pts;
}

Matrix to_matrix(const std::vector<Point>& pts, int dim) {
  Matrix m(static_cast<Eigen::Index>(pts.size()), dim);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int k = 0; k < dim; ++k) m(static_cast<Eigen::Index>(i), k) = pts[i][static_cast<std::size_t>(k)];
  return m;
}

py::dict proportion_dict(const Proportion& p) {
  py::dict d;
  d["count"] = p.count;
  d["hits"] = p.hits;
  d["p_hat"] = p.p_hat;
  d["std_error"] = p.std_error;
  d["ci_lo"] = p.ci_lo;
  d["ci_hi"] = p.ci_hi;
  return d;
}

RunOptions options(std::size_t cap, unsigned workers) { return RunOptions{cap, workers}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "fbmpersist core bindings";
  m.attr("__version__") = FBMPERSIST_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<CapExceededError>(m, "CapExceededError", PyExc_RuntimeError);

  py::class_<CovarianceModel>(m, "CovarianceModel")
      .def_static("fbm", &CovarianceModel::fbm, py::arg("H"))
      .def_static("perturbed_fbm", &CovarianceModel::perturbed_fbm, py::arg("H"), py::arg("sigma"),
                  py::arg("ell"))
      .def("variogram", &CovarianceModel::variogram)
      .def("covariance",
           [](const CovarianceModel& c, std::vector<double> t, std::vector<double> s) {
             return c.covariance(Point{std::move(t)}, Point{std::move(s)});
           })
      .def("describe", &CovarianceModel::describe)
      .def("__repr__", &CovarianceModel::describe);

  py::class_<Domain>(m, "Domain")
      .def_static(
          "make", [](const std::string& kind, int dim, double size) {
            return Domain::make(domain_kind_from_string(kind), dim, size);
          },
          py::arg("kind"), py::arg("dim"), py::arg("size"))
      .def("scaled", &Domain::scaled)
      .def_property_readonly("dim", &Domain::dim)
      .def_property_readonly("extent", &Domain::extent)
      .def("contains", [](const Domain& d, std::vector<double> p) { return d.contains(Point{std::move(p)}); })
      .def("volume", &Domain::volume);

  m.def(
      "net_points",
      [](const Domain& d, double T, int refinement, std::size_t cap) {
        return to_matrix(persistence_net(d, T, refinement, cap), d.dim());
      },
      py::arg("domain"), py::arg("T"), py::arg("refinement") = 1, py::arg("cap") = kDefaultPointCap);

  m.def(
      "sample",
      [](const CovarianceModel& model, const Matrix& points, std::uint64_t seed, std::size_t count,
         std::size_t first_index, unsigned workers) {
        const auto pts = to_points(points);
        py::gil_scoped_release release;
        return sample(model, pts, seed, count, first_index, workers).values;
      },
      py::arg("model"), py::arg("points"), py::arg("seed"), py::arg("count"), py::arg("first_index") = 0,
      py::arg("workers") = 1);

  m.def(
      "estimate_p",
      [](const CovarianceModel& model, const Domain& domain, double T, double barrier, int refinement,
         std::uint64_t seed, std::size_t N, std::size_t cap, unsigned workers) {
        PersistenceEstimate e;
        {
          py::gil_scoped_release release;
          e = estimate_p(model, domain, T, barrier, refinement, seed, N, options(cap, workers));
        }
        auto d = proportion_dict(e.p);
        d["T"] = e.T;
        d["n_points"] = e.n_points;
        return d;
      },
      py::arg("model"), py::arg("domain"), py::arg("T"), py::arg("barrier") = 1.0, py::arg("refinement") = 1,
      py::arg("seed") = 1, py::arg("N") = 10000, py::arg("cap") = kDefaultPointCap, py::arg("workers") = 1);

  m.def(
      "estimate_EM",
      [](const CovarianceModel& model, const Domain& domain, double T, int refinement, std::uint64_t seed,
         std::size_t N, std::size_t cap, unsigned workers) {
        MaxEstimate e;
        {
          py::gil_scoped_release release;
          e = estimate_EM(model, domain, T, refinement, seed, N, options(cap, workers));
        }
        py::dict d;
        d["T"] = e.T;
        d["n_points"] = e.n_points;
        d["mean"] = e.mean.mean;
        d["std_error"] = e.mean.std_error;
        return d;
      },
      py::arg("model"), py::arg("domain"), py::arg("T"), py::arg("refinement") = 1, py::arg("seed") = 1,
      py::arg("N") = 10000, py::arg("cap") = kDefaultPointCap, py::arg("workers") = 1);

  m.def(
      "fit_exponent",
      [](std::vector<double> T, std::vector<double> p, std::vector<double> se) {
        const auto f = fit_exponent(T, p, se);
        py::dict d;
        d["slope"] = f.slope;
        d["intercept"] = f.intercept;
        d["slope_std_error"] = f.slope_std_error;
        d["weights"] = f.weights;
        return d;
      },
      py::arg("T"), py::arg("p"), py::arg("std_error"));

  m.def(
      "record_trace",
      [](std::vector<double> values) {
        const auto t = record_trace(values);
        py::dict d;
        d["running_max"] = t.running_max;
        d["increments"] = t.increments;
        d["partial_F"] = t.partial_F;
        d["F"] = t.F();
        d["M"] = t.M();
        return d;
      },
      py::arg("values"));

  m.def(
      "build_curve",
      [](int dim, std::int64_t n_max, double eps, int step_bound) {
        const auto c = build_curve(dim, n_max, eps, step_bound);
        Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> pts(
            static_cast<Eigen::Index>(c.size()), dim);
        std::vector<std::int64_t> level;
        std::vector<int> zone;
        std::vector<bool> first;
        for (std::size_t i = 0; i < c.size(); ++i) {
          for (int k = 0; k < dim; ++k)
            pts(static_cast<Eigen::Index>(i), k) = c.entries[i].point.coords[static_cast<std::size_t>(k)];
          level.push_back(c.entries[i].level);
          zone.push_back(c.entries[i].zone);
          first.push_back(c.entries[i].first_visit);
        }
        py::dict d;
        d["points"] = pts;
        d["level"] = level;
        d["zone"] = zone;
        d["first_visit"] = first;
        d["last_first_visit"] = c.last_first_visit;
        return d;
      },
      py::arg("dim"), py::arg("n_max"), py::arg("eps") = 1.0, py::arg("step_bound") = 3);

  m.def(
      "validate_curve",
      [](int dim, std::int64_t n_max, double eps, int step_bound) {
        const auto rep = validate_curve(build_curve(dim, n_max, eps, step_bound));
        py::dict d;
        for (const auto& c : rep.checks) d[py::str(c.name)] = c.passed;
        d["length_ratio"] = rep.length_ratio;
        return d;
      },
      py::arg("dim"), py::arg("n_max"), py::arg("eps") = 1.0, py::arg("step_bound") = 3);

  // Verification suites return their JSON report as a string.
  m.def(
      "lemma2_check",
      [](const CovarianceModel& model, const Domain& domain, double T, double rho, double a, double c, double b,
         std::uint64_t seed, std::size_t N, unsigned workers) {
        py::gil_scoped_release release;
        return lemma2_check(model, domain, T, rho, a, c, b, seed, N, options(kDefaultPointCap, workers))
            .to_json()
            .dump();
      },
      py::arg("model"), py::arg("domain"), py::arg("T"), py::arg("rho"), py::arg("a"), py::arg("c"), py::arg("b"),
      py::arg("seed"), py::arg("N"), py::arg("workers") = 1);

  m.def(
      "corollary3_sweep",
      [](const CovarianceModel& model, const Domain& domain, std::vector<double> Ts, double kappa,
         std::uint64_t seed, std::size_t N, unsigned workers) {
        py::gil_scoped_release release;
        return corollary3_sweep(model, domain, Ts, kappa, seed, N, options(kDefaultPointCap, workers))
            .to_json()
            .dump();
      },
      py::arg("model"), py::arg("domain"), py::arg("T"), py::arg("kappa"), py::arg("seed"), py::arg("N"),
      py::arg("workers") = 1);

  m.def(
      "chain_report",
      [](double H, int dim, std::int64_t n, double q, double eps, std::uint64_t seed, std::size_t N,
         unsigned workers) {
        py::gil_scoped_release release;
        return chain_report(H, dim, n, q, eps, seed, N, options(kDefaultPointCap, workers)).to_json().dump();
      },
      py::arg("H"), py::arg("dim"), py::arg("n"), py::arg("q"), py::arg("eps"), py::arg("seed"), py::arg("N"),
      py::arg("workers") = 1);
}
