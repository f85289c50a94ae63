#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gmtlab/acceptance.hpp"
#include "gmtlab/lcv.hpp"
#include "gmtlab/measure_io.hpp"
#include "gmtlab/potential.hpp"
#include "gmtlab/regularity.hpp"
#include "gmtlab/report.hpp"
#include "gmtlab/transform.hpp"
#include "gmtlab/wolff.hpp"
#include "gmtlab/zoo.hpp"

namespace py = pybind11;
using namespace gmtlab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DiscreteMeasure from_arrays(const Array& points, const Array& weights, bool merge) {
    if (points.ndim() != 2) throw InvalidArgument("points must be an (N, d) array");
    if (weights.ndim() != 1 || weights.shape(0) != points.shape(0))
        throw InvalidArgument("weights must be a length-N array");
    const auto d = static_cast<int>(points.shape(1));
    std::vector<double> c(points.data(), points.data() + points.size());
    std::vector<double> w(weights.data(), weights.data() + weights.size());
    return DiscreteMeasure(d, std::move(c), std::move(w), merge ? Duplicates::merge : Duplicates::reject);
}

Array to_points(const DiscreteMeasure& mu) {
    Array out({static_cast<py::ssize_t>(mu.size()), static_cast<py::ssize_t>(mu.dim())});
    std::copy(mu.coords().begin(), mu.coords().end(), out.mutable_data());
    return out;
}

Array to_array(const std::vector<double>& v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

DyadicLattice lattice_for(const DiscreteMeasure& mu, std::optional<int> kmin, std::optional<int> kmax) {
    std::pair<int, int> w{0, 0};
    if (!kmin || !kmax) w = DyadicLattice::default_window(mu);
    return DyadicLattice(mu.dim(), std::vector<double>(mu.dim(), 0.0), kmin.value_or(w.first), kmax.value_or(w.second));
}

py::tuple cube_tuple(const CubeAddress& q) {
    py::tuple coords(q.dim);
    for (int k = 0; k < q.dim; ++k) coords[k] = q.coords[k];
    return py::make_tuple(q.level, coords);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "gmtlab native core";
    m.attr("__version__") = gmtlab::version();

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<ResourceLimit>(m, "ResourceLimit", PyExc_MemoryError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);
    py::register_exception<CoincidentPoints>(m, "CoincidentPoints", PyExc_ValueError);

    py::class_<DiscreteMeasure>(m, "Measure")
        .def(py::init(&from_arrays), py::arg("points"), py::arg("weights"), py::arg("merge_duplicates") = false)
        .def_property_readonly("dim", &DiscreteMeasure::dim)
        .def("__len__", &DiscreteMeasure::size)
        .def_property_readonly("points", &to_points)
        .def_property_readonly("weights",
                               [](const DiscreteMeasure& mu) {
                                   return to_array({mu.weights().begin(), mu.weights().end()});
                               })
        .def_property_readonly("total_mass", &DiscreteMeasure::total_mass)
        .def_property_readonly("min_spacing", &DiscreteMeasure::min_spacing)
        .def_property_readonly("diameter", &DiscreteMeasure::diameter)
        .def("fingerprint", [](const DiscreteMeasure& mu) { return hex64(mu.fingerprint()); })
        .def(
            "ball_mass",
            [](const DiscreteMeasure& mu, const Array& x, double r) {
                if (x.size() != mu.dim()) throw InvalidArgument("center has the wrong dimension");
                return ball_mass(mu, x.data(), r);
            },
            py::arg("center"), py::arg("radius"));

    m.def("read_measure", [](const std::string& p) { return read_measure(p); });
    m.def("write_measure", &write_measure, py::arg("measure"), py::arg("path"));

    m.def("cantor", &cantor_measure, py::arg("d"), py::arg("lam"), py::arg("levels"));
    m.def("plane", &plane_measure, py::arg("d"), py::arg("s"), py::arg("h"), py::arg("L"));
    m.def("arcsine", &arcsine_measure, py::arg("n"));
    m.def("disc", &disc_lebesgue, py::arg("n"));
    m.def("segment", &segment_measure, py::arg("n"), py::arg("d") = 1);

    m.def("energy", &energy, py::arg("measure"), py::arg("s"));
    m.def("coordinate_energies", &coordinate_energies, py::arg("measure"), py::arg("s"));

    m.def(
        "wolff_at_support",
        [](const DiscreteMeasure& mu, double p, double s, double r_max, bool self_exclusion) {
            return to_array(wolff_at_support(mu, {p, s, r_max}, self_exclusion));
        },
        py::arg("measure"), py::arg("p") = 2.0, py::arg("s") = 1.0,
        py::arg("r_max") = std::numeric_limits<double>::infinity(), py::arg("self_exclusion") = true);
    m.def(
        "dyadic_wolff_sum",
        [](const DiscreteMeasure& mu, double p, double s, std::optional<int> kmin, std::optional<int> kmax) {
            return dyadic_wolff_sum(mu, lattice_for(mu, kmin, kmax), p, s);
        },
        py::arg("measure"), py::arg("p") = 2.0, py::arg("s") = 1.0, py::arg("kmin") = py::none(),
        py::arg("kmax") = py::none());

    py::class_<KernelSpec>(m, "Kernel")
        .def_static("riesz", &KernelSpec::riesz, py::arg("d"), py::arg("s"), py::arg("alpha") = 1.0)
        .def_static("planar_conjugate", &KernelSpec::planar_conjugate, py::arg("alpha") = 1.0)
        .def_property_readonly("dim", &KernelSpec::dim)
        .def_property_readonly("s", &KernelSpec::s)
        .def_property_readonly("codim", &KernelSpec::codim)
        .def_property_readonly("name", &KernelSpec::name)
        .def(
            "__call__",
            [](const KernelSpec& K, const Array& x, double delta) {
                if (x.size() != K.dim()) throw InvalidArgument("point has the wrong dimension");
                std::vector<double> out(K.codim());
                if (delta == 0.0)
                    K.eval(x.data(), out.data());
                else
                    K.eval_regularized(delta, x.data(), out.data());
                return to_array(out);
            },
            py::arg("x"), py::arg("delta") = 0.0);

    m.def(
        "apply_T",
        [](const DiscreteMeasure& mu, const KernelSpec& K, double delta, std::optional<Array> f, bool fast) {
            std::vector<double> fv(mu.size(), 1.0);
            if (f) {
                if (static_cast<std::size_t>(f->size()) != mu.size()) throw InvalidArgument("f has the wrong length");
                fv.assign(f->data(), f->data() + f->size());
            }
            const auto r = fast ? apply_T_fast(mu, K, delta, fv) : apply_T(mu, K, delta, fv);
            Array out({static_cast<py::ssize_t>(mu.size()), static_cast<py::ssize_t>(r.codim)});
            std::copy(r.values.begin(), r.values.end(), out.mutable_data());
            return py::make_tuple(out, r.error_bound);
        },
        py::arg("measure"), py::arg("kernel"), py::arg("delta") = 0.0, py::arg("f") = py::none(),
        py::arg("fast") = false);

    m.def(
        "operator_norm",
        [](const DiscreteMeasure& mu, const KernelSpec& K, double delta, double rtol, std::uint64_t seed) {
            PowerOptions o;
            o.rtol = rtol;
            o.seed = seed;
            const auto e = operator_norm_at(mu, K, delta, o);
            return py::dict(py::arg("norm") = e.norm, py::arg("iterations") = e.iterations,
                            py::arg("residual") = e.residual);
        },
        py::arg("measure"), py::arg("kernel"), py::arg("delta"), py::arg("rtol") = 1e-8,
        py::arg("seed") = acceptance::kDefaultSeed);

    m.def(
        "truncated_bound",
        [](const DiscreteMeasure& mu, const KernelSpec& K, std::vector<double> eps) {
            const auto r = truncated_bound_check(mu, K, std::move(eps));
            std::vector<double> e, l;
            for (const auto& x : r.entries) {
                e.push_back(x.epsilon);
                l.push_back(x.lhs);
            }
            return py::dict(py::arg("rhs") = r.rhs, py::arg("max_ratio") = r.max_ratio,
                            py::arg("epsilon") = to_array(e), py::arg("lhs") = to_array(l));
        },
        py::arg("measure"), py::arg("kernel"), py::arg("epsilons") = std::vector<double>{});

    m.def("smallest_cube_M", &smallest_cube_M, py::arg("d"));
    m.def(
        "chain_check",
        [](const DiscreteMeasure& mu, double s, std::optional<double> M, double p, std::optional<int> kmin,
           std::optional<int> kmax) {
            const auto r = senior_regular_chain_check(mu, lattice_for(mu, kmin, kmax), s,
                                                      M.value_or(smallest_cube_M(mu.dim())), p);
            return py::dict(py::arg("cubes") = r.cubes, py::arg("seniors") = r.seniors,
                            py::arg("violations") = r.violations.size(),
                            py::arg("domination_ratio") = r.domination_ratio,
                            py::arg("domination_bound") = r.domination_bound);
        },
        py::arg("measure"), py::arg("s") = 1.0, py::arg("M") = py::none(), py::arg("p") = 2.0,
        py::arg("kmin") = py::none(), py::arg("kmax") = py::none());

    m.def(
        "non_lcv_cubes",
        [](const DiscreteMeasure& mu, double delta, std::optional<int> kmin, std::optional<int> kmax) {
            const auto r = non_lcv_cubes(mu, lattice_for(mu, kmin, kmax), delta);
            py::list out;
            for (const auto& q : r.flagged) out.append(cube_tuple(q));
            return out;
        },
        py::arg("measure"), py::arg("delta"), py::arg("kmin") = py::none(), py::arg("kmax") = py::none());

    m.def(
        "packing_constant",
        [](const DiscreteMeasure& mu, double delta, double s, std::optional<int> kmin, std::optional<int> kmax) {
            const auto r = non_lcv_cubes(mu, lattice_for(mu, kmin, kmax), delta);
            std::vector<CubeAddress> tops;
            for (const auto& c : r.cubes) tops.push_back(c.cube);
            return carleson_constant(r.flagged, tops, s).constant;
        },
        py::arg("measure"), py::arg("delta"), py::arg("s") = 1.0, py::arg("kmin") = py::none(),
        py::arg("kmax") = py::none());

    m.def(
        "reflectionless_defect",
        [](const DiscreteMeasure& mu, const KernelSpec& K, std::vector<double> centers, double r,
           std::vector<double> anchor, double anchor_r) {
            const auto dict = bump_dictionary(mu, centers, r, anchor, anchor_r);
            if (dict.empty()) throw InvalidArgument("the anchor bump carries no mass");
            return reflectionless_defect(mu, K, dict).defect;
        },
        py::arg("measure"), py::arg("kernel"), py::arg("centers"), py::arg("bump_radius"), py::arg("anchor"),
        py::arg("anchor_radius"));
    m.def(
        "ring_centers",
        [](int dim, std::size_t n, const std::vector<double>& radii) { return ring_centers(dim, n, radii); }, py::arg("dim"), py::arg("n"), py::arg("radii"));

    m.def(
        "divergence_residual",
        [](const DiscreteMeasure& mu, double rho, double h, const std::string& mollifier) {
            DivergenceOptions o;
            o.rho = rho;
            o.h = h;
            if (mollifier != "cone" && mollifier != "smooth") throw InvalidArgument("mollifier is cone or smooth");
            o.mollifier = mollifier == "cone" ? Mollifier::cone : Mollifier::smooth;
            const auto r = riesz_divergence_check(mu, KernelSpec::riesz(mu.dim(), mu.dim() - 1.0), o);
            return py::dict(py::arg("max_residual") = r.max_residual, py::arg("b") = r.b,
                            py::arg("b_analytic") = r.b_analytic);
        },
        py::arg("measure"), py::arg("rho") = 1.0, py::arg("h") = 0.125, py::arg("mollifier") = "cone");

    m.def(
        "run_criterion",
        [](int id, std::uint64_t seed) {
            const auto r = acceptance::run_criterion(id, seed);
            py::dict metrics;
            for (const auto& [k, v] : r.metrics) metrics[py::str(k)] = v;
            return py::dict(py::arg("id") = r.id, py::arg("title") = r.title, py::arg("passed") = r.pass,
                            py::arg("documented_failure") = r.documented_failure, py::arg("seconds") = r.seconds,
                            py::arg("summary") = r.summary, py::arg("metrics") = metrics);
        },
        py::arg("id"), py::arg("seed") = acceptance::kDefaultSeed);
}
