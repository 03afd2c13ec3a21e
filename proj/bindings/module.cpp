#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "infogeo/crbound.hpp"
#include "infogeo/fisher.hpp"
#include "infogeo/job.hpp"
#include "infogeo/simplex.hpp"
#include "infogeo/zoo.hpp"

namespace py = pybind11;
using namespace infogeo;

namespace {

const std::pair<Estimator, FeatureMap>& find_cell(const ZooEntry& entry, const std::string& name) {
  for (const auto& cell : entry.estimator_suite) {
    if (cell.first.name == name) return cell;
  }
  throw std::invalid_argument("no estimator named '" + name + "' in the suite");
}

SimplexPoint point(const Eigen::VectorXd& mu, bool constrained) {
  return SimplexPoint(mu, constrained);
}

}  // namespace

PYBIND11_MODULE(_infogeo, m) {
  m.doc() = "Fisher information, reduced metrics on singular models, and Cramer-Rao gap checks";
  m.attr("__version__") = kToolVersion;

  py::class_<EssentialDecomposition>(m, "EssentialDecomposition")
      .def_readonly("eigenvalues", &EssentialDecomposition::eigenvalues)
      .def_readonly("eigenvectors", &EssentialDecomposition::eigenvectors)
      .def_readonly("rank", &EssentialDecomposition::rank)
      .def_readonly("essential_basis", &EssentialDecomposition::essential_basis)
      .def_readonly("kernel_basis", &EssentialDecomposition::kernel_basis);

  py::class_<ReducedMetric>(m, "ReducedMetric")
      .def_readonly("reduced", &ReducedMetric::reduced)
      .def_readonly("reduced_inv", &ReducedMetric::reduced_inv)
      .def_readonly("pinv", &ReducedMetric::pinv);

  py::class_<EstimatorStats>(m, "EstimatorStats")
      .def_readonly("phi_hat", &EstimatorStats::phi_hat)
      .def_readonly("bias", &EstimatorStats::bias)
      .def_readonly("V", &EstimatorStats::V)
      .def_readonly("MSE", &EstimatorStats::MSE)
      .def_readonly("d_phi_hat", &EstimatorStats::d_phi_hat)
      .def_readonly("msevb_residual", &EstimatorStats::msevb_residual);

  py::class_<CRGapReport>(m, "CRGapReport")
      .def_readonly("V", &CRGapReport::V)
      .def_readonly("bound", &CRGapReport::bound)
      .def_readonly("gap", &CRGapReport::gap)
      .def_readonly("min_gap_eig", &CRGapReport::min_gap_eig)
      .def_readonly("tol", &CRGapReport::tol)
      .def_readonly("psd_certified", &CRGapReport::psd_certified);

  py::class_<ScalarBiasedBound>(m, "ScalarBiasedBound")
      .def_readonly("mse_lhs", &ScalarBiasedBound::mse_lhs)
      .def_readonly("rhs", &ScalarBiasedBound::rhs)
      .def_readonly("holds", &ScalarBiasedBound::holds);

  py::class_<ZooEntry>(m, "Model")
      .def_property_readonly("name", [](const ZooEntry& e) { return e.name; })
      .def_property_readonly("dim", [](const ZooEntry& e) { return e.model.dim; })
      .def_property_readonly("n_points", [](const ZooEntry& e) { return e.model.space->size(); })
      .def_property_readonly("statistical", [](const ZooEntry& e) { return e.model.is_statistical; })
      .def_property_readonly("estimators",
                             [](const ZooEntry& e) {
                               std::vector<std::string> names;
                               for (const auto& [est, feat] : e.estimator_suite) names.push_back(est.name);
                               return names;
                             })
      .def_property_readonly("default_points",
                             [](const ZooEntry& e) { return e.default_points; })
      .def("density",
           [](const ZooEntry& e, const Eigen::VectorXd& xi) {
             return density_at(e.model, xi).density;
           })
      .def("mass",
           [](const ZooEntry& e, const Eigen::VectorXd& xi) {
             return density_at(e.model, xi).total_mass();
           })
      .def("score", [](const ZooEntry& e, const Eigen::VectorXd& xi) { return score_at(e.model, xi); })
      .def("fisher",
           [](const ZooEntry& e, const Eigen::VectorXd& xi) { return fisher_matrix(e.model, xi).G; })
      .def(
          "essential",
          [](const ZooEntry& e, const Eigen::VectorXd& xi, double rel_threshold) {
            return essential_decomposition(fisher_matrix(e.model, xi), rel_threshold);
          },
          py::arg("xi"), py::arg("rel_threshold") = defaults::kRankRelThreshold)
      .def(
          "rank",
          [](const ZooEntry& e, const Eigen::VectorXd& xi, double rel_threshold) {
            return essential_decomposition(fisher_matrix(e.model, xi), rel_threshold).rank;
          },
          py::arg("xi"), py::arg("rel_threshold") = defaults::kRankRelThreshold)
      .def(
          "reduced_metric",
          [](const ZooEntry& e, const Eigen::VectorXd& xi, double rel_threshold) {
            const FisherMatrix F = fisher_matrix(e.model, xi);
            return reduced_metric(essential_decomposition(F, rel_threshold), F);
          },
          py::arg("xi"), py::arg("rel_threshold") = defaults::kRankRelThreshold)
      .def(
          "stats",
          [](const ZooEntry& e, const std::string& estimator, const Eigen::VectorXd& xi) {
            const auto& [est, feat] = find_cell(e, estimator);
            return estimator_stats(e.model, est, feat, xi);
          },
          py::arg("estimator"), py::arg("xi"))
      .def(
          "cr_gap",
          [](const ZooEntry& e, const std::string& estimator, const Eigen::VectorXd& xi,
             std::optional<double> tol, double rel_threshold) {
            const auto& [est, feat] = find_cell(e, estimator);
            return cr_gap(e.model, est, feat, xi, tol, rel_threshold);
          },
          py::arg("estimator"), py::arg("xi"), py::arg("tol") = std::nullopt,
          py::arg("rel_threshold") = defaults::kRankRelThreshold)
      .def(
          "cr_gap_mc",
          [](const ZooEntry& e, const std::string& estimator, const Eigen::VectorXd& xi,
             std::size_t samples, std::uint64_t seed, double rel_threshold) {
            const auto& [est, feat] = find_cell(e, estimator);
            return cr_gap_mc(e.model, est, feat, xi, samples, seed, rel_threshold);
          },
          py::arg("estimator"), py::arg("xi"), py::arg("samples"), py::arg("seed"),
          py::arg("rel_threshold") = defaults::kRankRelThreshold)
      .def(
          "scalar_biased_bound",
          [](const ZooEntry& e, const std::string& estimator, const Eigen::VectorXd& xi) {
            return scalar_biased_bound(e.model, find_cell(e, estimator).first, xi);
          },
          py::arg("estimator"), py::arg("xi"))
      .def(
          "borovkov_bound",
          [](const ZooEntry& e, const std::string& estimator, const Eigen::VectorXd& xi,
             double rel_threshold) {
            return borovkov_bound(e.model, find_cell(e, estimator).first, xi, rel_threshold);
          },
          py::arg("estimator"), py::arg("xi"), py::arg("rel_threshold") = defaults::kRankRelThreshold)
      .def(
          "integrability",
          [](const ZooEntry& e, const Eigen::VectorXd& from, const Eigen::VectorXd& to, double t0,
             double t1, double k, std::size_t t_samples) {
            Curve curve;
            curve.t0 = t0;
            curve.t1 = t1;
            curve.position = [from, to, t0, t1](double t) -> Eigen::VectorXd {
              return from + (t - t0) / (t1 - t0) * (to - from);
            };
            curve.velocity = [from, to, t0, t1](double) -> Eigen::VectorXd {
              return (to - from) / (t1 - t0);
            };
            const IntegrabilityReport rep = integrability_diagnostic(e.model, curve, k, t_samples);
            std::vector<std::tuple<double, double, double>> rows;
            for (const auto& s : rep.samples) rows.emplace_back(s.t, s.norm, s.norm_pow);
            return rows;
          },
          py::arg("from_point"), py::arg("to_point"), py::arg("t0"), py::arg("t1"), py::arg("k"),
          py::arg("t_samples"));

  m.def("bernoulli", &make_bernoulli);
  m.def("multinomial", &make_multinomial, py::arg("n"));
  m.def("full_simplex", &make_full_simplex, py::arg("n"));
  m.def("gaussian_location", &make_gaussian_location, py::arg("lo") = -12.0, py::arg("hi") = 12.0,
        py::arg("points") = 3001);
  m.def("normal_mixture", &make_normal_mixture, py::arg("lo") = -12.0, py::arg("hi") = 12.0,
        py::arg("points") = 4001);
  m.def(
      "pathology",
      [](double alpha, double beta) {
        PathologyConfig cfg;
        cfg.alpha = alpha;
        cfg.beta = beta;
        return make_pathology(cfg);
      },
      py::arg("alpha") = 2.0, py::arg("beta") = 4.0);
  m.def("product", &make_product, py::arg("base"), py::arg("copies"));

  m.def(
      "fisher_metric_full",
      [](const Eigen::VectorXd& mu) { return fisher_metric_full(point(mu, false)); }, py::arg("mu"));
  m.def(
      "inverse_pairing_full",
      [](const Eigen::VectorXd& mu, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
        return inverse_pairing_full(point(mu, false), f, g);
      },
      py::arg("mu"), py::arg("f"), py::arg("g"));
  m.def(
      "inverse_pairing_simplex",
      [](const Eigen::VectorXd& mu, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
        return inverse_pairing_simplex(point(mu, true), f, g);
      },
      py::arg("mu"), py::arg("f"), py::arg("g"));
  m.def(
      "fisher_gradient_full",
      [](const Eigen::VectorXd& mu, const Eigen::VectorXd& partials) {
        return fisher_gradient_full(point(mu, false), partials);
      },
      py::arg("mu"), py::arg("partials"));
  m.def(
      "fisher_gradient_simplex",
      [](const Eigen::VectorXd& mu, const Eigen::VectorXd& partials) {
        return fisher_gradient_simplex(point(mu, true), partials);
      },
      py::arg("mu"), py::arg("partials"));

  m.def(
      "run_job",
      [](const std::string& spec_text, std::optional<std::uint64_t> seed,
         std::optional<double> rank_threshold, std::optional<double> psd_tol, unsigned threads) {
        JobOverrides ov;
        ov.seed = seed;
        ov.rank_threshold = rank_threshold;
        ov.psd_tol = psd_tol;
        if (threads > 0) ov.threads = threads;
        const JobOutcome out = run_job(nlohmann::json::parse(spec_text), ov);
        return py::make_tuple(render_report(out.report, "json"), out.exit_code);
      },
      py::arg("spec_json"), py::arg("seed") = std::nullopt, py::arg("rank_threshold") = std::nullopt,
      py::arg("psd_tol") = std::nullopt, py::arg("threads") = 0,
      "Validate and execute a JSON job spec; returns (report_json, exit_code).");

  m.def(
      "validate_job",
      [](const std::string& spec_text) { validate_job(nlohmann::json::parse(spec_text)); },
      py::arg("spec_json"), "Throws ValueError with a field path when the spec is malformed.");
}
