#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qrecycle/experiment.hpp"
#include "qrecycle/metrics.hpp"

namespace py = pybind11;
using namespace qrecycle;

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

Mat4 to_mat4(const CArray& a) {
  if (a.ndim() != 2 || a.shape(0) != 4 || a.shape(1) != 4) throw Error("expected a 4x4 matrix");
  Mat4 m;
  auto v = a.unchecked<2>();
  for (py::ssize_t r = 0; r < 4; ++r)
    for (py::ssize_t c = 0; c < 4; ++c) m(r, c) = v(r, c);
  return m;
}

CArray to_array(const Mat4& m) {
  CArray out({4, 4});
  auto v = out.mutable_unchecked<2>();
  for (py::ssize_t r = 0; r < 4; ++r)
    for (py::ssize_t c = 0; c < 4; ++c) v(r, c) = m(r, c);
  return out;
}

DensityMatrix state_arg(const CArray& a, bool normalized = true) {
  return DensityMatrix::from_matrix(
      to_mat4(a), normalized ? DensityMatrix::Normalization::Normalized : DensityMatrix::Normalization::Unnormalized);
}

py::dict solution_dict(const FilterSolution& s) {
  py::dict d;
  d["alpha"] = s.alpha_star;
  d["beta"] = s.beta_star;
  d["survival"] = s.objective_value;
  d["feasible"] = s.feasible;
  d["min_fidelity"] = s.constraint_fidelity;
  py::list parts;
  for (const auto& c : s.contributions) {
    py::dict p;
    p["outcome"] = c.label;
    p["probability"] = c.probability;
    p["fidelity"] = c.fidelity;
    parts.append(p);
  }
  d["outcomes"] = parts;
  return d;
}

py::dict row_dict(const SweepRow& r) {
  py::dict d;
  d["gamma"] = r.gamma;
  d["status"] = to_string(r.status);
  d["alpha_tier1"] = r.alpha_tier1;
  d["alpha_tier2"] = r.alpha_tier2;
  d["benchmark_survival"] = r.benchmark_survival;
  d["recycled_survival"] = r.recycled_survival;
  d["gain_points"] = r.gain_points;
  py::dict per;
  for (const auto& [k, p] : r.per_outcome) per[py::str(k)] = p;
  d["per_outcome"] = per;
  return d;
}

SweepSpec make_spec(const std::string& scheme, double fth, double g0, double g1, double step, bool rr,
                    double refine_step, double refine_window, unsigned threads) {
  SweepSpec s;
  s.scheme = scheme_from_string(scheme);
  s.f_threshold = fth;
  s.gamma_start = g0;
  s.gamma_end = g1;
  s.gamma_step = step;
  s.restricted_rr_only = rr;
  s.refine_step = refine_step;
  s.refine_window = refine_window;
  s.threads = threads;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = R"pbdoc(
        Two-qubit amplitude-damping, Gisin filtering and qubit recycling.

        Matrices are 4x4 complex numpy arrays in the |00>, |01>, |10>, |11>
        basis with Alice as the left qubit.
    )pbdoc";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  m.def("epr_state", [] { return to_array(epr_state().matrix()); });
  m.def("damped_epr_state", [](double gamma) { return to_array(damped_epr_state(gamma).matrix()); },
        py::arg("gamma"), "Closed-form channel output for the EPR pair.");
  m.def(
      "apply_channel",
      [](const CArray& rho, double gamma) {
        return to_array(apply_channel(state_arg(rho), DampingParams(gamma)).matrix());
      },
      py::arg("rho"), py::arg("gamma"));
  m.def("partial_transpose_b", [](const CArray& rho) { return to_array(partial_transpose_b(to_mat4(rho))); });
  m.def("psd_sqrt", [](const CArray& a) { return to_array(psd_sqrt(to_mat4(a))); });
  m.def("bell_fidelity", [](const CArray& rho) { return bell_fidelity(state_arg(rho).matrix()); });
  m.def(
      "fidelity", [](const CArray& target, const CArray& sigma) { return fidelity(state_arg(target), state_arg(sigma)); },
      py::arg("target"), py::arg("sigma"), "Squared Uhlmann fidelity.");
  m.def("concurrence", [](const CArray& rho) { return concurrence(state_arg(rho)); });
  m.def(
      "ppt_report",
      [](const CArray& rho, bool normalized) {
        const PptReport r = ppt_report(state_arg(rho, normalized));
        py::dict d;
        d["eigenvalues"] = r.eigenvalues;
        d["min_eigenvalue"] = r.min_eigenvalue;
        d["is_entangled"] = r.is_entangled;
        return d;
      },
      py::arg("rho"), py::arg("normalized") = true);

  m.def(
      "enumerate_outcomes",
      [](double gamma, double alpha, std::optional<double> alpha2, const std::string& scheme) {
        FilterScheme fs;
        fs.kind = scheme_from_string(scheme);
        fs.tier1 = Povm(alpha);
        if (alpha2) fs.tier2 = Povm(*alpha2);
        py::list out;
        for (const auto& rec : enumerate_outcomes(apply_channel(epr_state(), DampingParams(gamma)), fs)) {
          py::dict d;
          d["label"] = rec.label;
          d["probability"] = rec.probability;
          d["fidelity"] = rec.fidelity;
          d["success"] = rec.in_success_set;
          d["state"] = rec.state ? py::object(to_array(rec.state->matrix())) : py::none();
          out.append(d);
        }
        return out;
      },
      py::arg("gamma"), py::arg("alpha"), py::arg("alpha2") = py::none(), py::arg("scheme") = "full");

  m.def(
      "optimize",
      [](double gamma, double f_threshold, const std::string& scheme, bool restricted_rr, int grid_points) {
        OptimizerConfig cfg;
        cfg.f_threshold = f_threshold;
        cfg.grid_points = grid_points;
        const SchemeKind kind = scheme_from_string(scheme);
        const DensityMatrix rho = apply_channel(epr_state(), DampingParams(gamma));
        const FilterSolution t1 = solve_tier1(rho, kind, cfg);
        py::dict d;
        d["tier1"] = solution_dict(t1);
        d["tier2"] = py::none();
        if (t1.feasible) {
          d["tier2"] = solution_dict(
              solve_tier2(rho, t1, kind, cfg, restricted_rr ? RecycleSet::BothReflectedOnly : RecycleSet::All));
        }
        return d;
      },
      py::arg("gamma"), py::arg("f_threshold"), py::arg("scheme") = "full", py::arg("restricted_rr") = false,
      py::arg("grid_points") = 2001);

  m.def(
      "run_sweep",
      [](const std::string& scheme, double f_threshold, double gamma_start, double gamma_end, double gamma_step,
         bool restricted_rr, double refine_step, double refine_window, unsigned threads) {
        const SweepSpec spec = make_spec(scheme, f_threshold, gamma_start, gamma_end, gamma_step, restricted_rr,
                                         refine_step, refine_window, threads);
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_sweep(spec);
        }
        py::list out;
        for (const auto& r : rows) out.append(row_dict(r));
        return out;
      },
      py::arg("scheme") = "full", py::arg("f_threshold") = 0.7, py::arg("gamma_start") = 0.0,
      py::arg("gamma_end") = 1.0, py::arg("gamma_step") = 1e-3, py::arg("restricted_rr") = false,
      py::arg("refine_step") = 1e-4, py::arg("refine_window") = 0.02, py::arg("threads") = 0u);

  m.def(
      "sweep_document_json",
      [](const std::string& scheme, double f_threshold, double gamma_start, double gamma_end, double gamma_step,
         bool restricted_rr, double refine_step, double refine_window, unsigned threads) {
        const SweepSpec spec = make_spec(scheme, f_threshold, gamma_start, gamma_end, gamma_step, restricted_rr,
                                         refine_step, refine_window, threads);
        std::string doc;
        {
          py::gil_scoped_release release;
          doc = to_json(spec, run_sweep(spec)).dump();
        }
        return doc;
      },
      py::arg("scheme") = "full", py::arg("f_threshold") = 0.7, py::arg("gamma_start") = 0.0,
      py::arg("gamma_end") = 1.0, py::arg("gamma_step") = 1e-3, py::arg("restricted_rr") = false,
      py::arg("refine_step") = 1e-4, py::arg("refine_window") = 0.02, py::arg("threads") = 0u);

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
