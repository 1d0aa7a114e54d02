#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "parsec/core.hpp"
#include "parsec/estimation.hpp"
#include "parsec/inference.hpp"
#include "parsec/metrics.hpp"
#include "parsec/pcs_hub.hpp"
#include "parsec/simgen.hpp"
#include "parsec/uscore.hpp"

namespace py = pybind11;
using namespace parsec;

namespace {

SymmetrizeMode parse_mode(const std::string& name) {
  if (name == "upper") return SymmetrizeMode::UpperTriangle;
  if (name == "min-abs") return SymmetrizeMode::MinAbs;
  if (name == "max-abs") return SymmetrizeMode::MaxAbs;
  if (name == "average") return SymmetrizeMode::Average;
  throw std::invalid_argument("unknown symmetrize mode: " + name);
}

py::list edges_to_list(const EdgeSet& edges) {
  py::list out;
  for (const auto& e : edges)
    out.append(py::make_tuple(e.i, e.j, e.statistic, e.p_value));
  return out;
}

StructureSpec parse_structure(const std::string& kind, int p, int a, int d,
                              double phi1, double rho, int k_stars, int e,
                              double c) {
  StructureSpec spec;
  spec.p = p;
  spec.a = a;
  spec.d = d;
  spec.phi1 = phi1;
  spec.rho = rho;
  spec.k_stars = k_stars;
  spec.e = e;
  spec.c = c;
  if (kind == "diag")
    spec.kind = StructureKind::Diagonal;
  else if (kind == "ar-block")
    spec.kind = StructureKind::ArBlock;
  else if (kind == "block")
    spec.kind = StructureKind::Block;
  else if (kind == "star-connected")
    spec.kind = StructureKind::StarConnected;
  else if (kind == "star-disconnected")
    spec.kind = StructureKind::StarDisconnected;
  else
    throw std::invalid_argument("unknown structure: " + kind);
  return spec;
}

}  // namespace

PYBIND11_MODULE(_parsec, m) {
  m.doc() = "Partial-correlation screening toolkit";

  m.def("uscores", &uscores, py::arg("x"),
        "Standardized scores projected onto the unit sphere; inner products "
        "equal sample correlations.");
  m.def("helmert_basis", &helmert_basis, py::arg("n"));
  m.def(
      "partial_correlations",
      [](const Matrix& x, const std::string& method, int threads,
         const std::string& symmetrize_mode) {
        const Matrix u = uscores(x);
        Matrix h;
        if (method == "parsec-base")
          h = parsec_base(u);
        else if (method == "parsec-scalable")
          h = parsec_scalable(u, threads);
        else if (method == "pcs-hub")
          return pcs_hub_matrix(u);
        else
          throw std::invalid_argument("unknown method: " + method);
        return symmetrize(h, parse_mode(symmetrize_mode));
      },
      py::arg("x"), py::arg("method") = "parsec-scalable",
      py::arg("threads") = 1, py::arg("symmetrize") = "upper",
      "Symmetric scaled partial-correlation estimate from raw data.");

  m.def("pvalue", &pvalue, py::arg("h"), py::arg("n"));
  m.def("cap_probability", &spherical_cap_p0, py::arg("rho"), py::arg("n"));
  m.def("level_for_cap", &solve_rho_for_p0, py::arg("target"), py::arg("n"));
  m.def(
      "control_level",
      [](const std::string& control, double alpha, std::int64_t k, int n,
         std::int64_t p) {
        ErrorControlSpec spec;
        spec.alpha = alpha;
        spec.k = k;
        if (control == "fwer")
          spec.kind = ControlKind::FWER;
        else if (control == "kfwer")
          spec.kind = ControlKind::KFWER;
        else
          throw std::invalid_argument("control must be fwer or kfwer");
        const LevelResult r = fwer_kfwer_level(spec, n, p);
        py::dict out;
        out["rho"] = r.rho;
        out["eta"] = r.eta;
        out["vacuous"] = r.vacuous;
        return out;
      },
      py::arg("control"), py::arg("alpha"), py::arg("k"), py::arg("n"),
      py::arg("p"));
  m.def(
      "screen",
      [](const Matrix& h_sym, int n, const std::string& control, double alpha,
         std::int64_t k, double rho) {
        ScreenResult result;
        if (control == "rho") {
          result = threshold_screen(h_sym, rho, n);
        } else if (control == "fwer" || control == "kfwer") {
          ErrorControlSpec spec;
          spec.kind = control == "fwer" ? ControlKind::FWER : ControlKind::KFWER;
          spec.alpha = alpha;
          spec.k = k;
          result = threshold_screen(h_sym, fwer_kfwer_level(spec, n,
                                                            h_sym.rows()).rho,
                                    n);
        } else if (control == "fdr-bh") {
          result = fdr_screen(h_sym, ControlKind::FDR_BH, alpha, n);
        } else if (control == "fdr-by") {
          result = fdr_screen(h_sym, ControlKind::FDR_BY, alpha, n);
        } else if (control == "pfdr") {
          result = pfdr_screen(h_sym, alpha, n);
        } else {
          throw std::invalid_argument("unknown control: " + control);
        }
        py::dict out;
        out["level"] = result.level;
        out["edges"] = edges_to_list(result.edges);
        return out;
      },
      py::arg("h_sym"), py::arg("n"), py::arg("control") = "fwer",
      py::arg("alpha") = 0.05, py::arg("k") = 0, py::arg("rho") = 0.0,
      "Edge screening on a symmetric estimate; returns the achieved level "
      "and (i, j, statistic, p_value) tuples (0-based).");

  m.def(
      "simulate",
      [](const std::string& structure, int n, int p, int a, int d, double phi1,
         double rho, int k_stars, int e, double c, const std::string& dist,
         double nu, std::uint64_t seed) {
        const CovarianceModel model = build_structure(
            parse_structure(structure, p, a, d, phi1, rho, k_stars, e, c));
        Matrix x;
        if (dist == "gaussian")
          x = sample_gaussian(model, n, seed);
        else if (dist == "t")
          x = sample_mvt(model, nu, n, seed);
        else
          throw std::invalid_argument("dist must be gaussian or t");
        py::dict out;
        out["x"] = x;
        out["sigma"] = model.sigma;
        out["omega"] = model.omega;
        out["true_edges"] = model.true_edges;
        return out;
      },
      py::arg("structure"), py::arg("n"), py::arg("p"), py::arg("a") = 0,
      py::arg("d") = 1, py::arg("phi1") = 0.0, py::arg("rho") = 0.0,
      py::arg("k_stars") = 0, py::arg("e") = 0, py::arg("c") = 0.0,
      py::arg("dist") = "gaussian", py::arg("nu") = 3.0, py::arg("seed") = 1);

  m.def(
      "auc",
      [](const Matrix& estimate, const std::vector<std::pair<int, int>>& truth,
         double fpr_cap) { return auc(estimate, truth, fpr_cap); },
      py::arg("estimate"), py::arg("true_edges"), py::arg("fpr_cap") = 1.0);

  m.def(
      "estimate_precision",
      [](const Matrix& s, const std::vector<std::pair<int, int>>& edges,
         const std::string& method, double eps, int max_iter) {
        const int p = static_cast<int>(s.rows());
        EdgeSet es;
        for (auto& [i, j] : edges) es.push_back({i, j, 0.0, 0.0});
        const EdgeStructure structure = EdgeStructure::from_edges(p, es);
        PrecisionEstimate r;
        if (method == "concord")
          r = concord_estimate(s, structure, eps, max_iter);
        else if (method == "gaussian")
          r = gaussian_estimate(s, structure, eps, max_iter);
        else
          throw std::invalid_argument("method must be concord or gaussian");
        py::dict out;
        out["omega"] = r.omega_hat;
        out["sigma"] = r.sigma_hat;
        out["converged"] = r.converged;
        out["iterations"] = r.iterations;
        return out;
      },
      py::arg("s"), py::arg("edges"), py::arg("method") = "concord",
      py::arg("eps") = 1e-8, py::arg("max_iter") = 10000,
      "Structured precision-matrix estimation restricted to the given edges "
      "(0-based pairs).");

  m.def("mvp_weights", &mvp_weights, py::arg("sigma_inv"),
        "Minimum-variance portfolio weights from a precision matrix.");
}
