#include "infogeo/job.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "infogeo/crbound.hpp"
#include "infogeo/estimation.hpp"
#include "infogeo/fisher.hpp"
#include "infogeo/simplex.hpp"
#include "infogeo/zoo.hpp"

namespace infogeo {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Spec access with field-path error messages
// ---------------------------------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw std::invalid_argument(path + ": " + message);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail(path + "." + it.key(), "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "required field missing");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

Eigen::VectorXd as_vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of numbers");
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = as_number(v[i], path);
  return out;
}

Eigen::MatrixXd as_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of rows");
  const Eigen::VectorXd first = as_vector(v[0], path + "[0]");
  Eigen::MatrixXd out(v.size(), first.size());
  out.row(0) = first.transpose();
  for (std::size_t r = 1; r < v.size(); ++r) {
    const Eigen::VectorXd row = as_vector(v[r], path + "[" + std::to_string(r) + "]");
    if (row.size() != first.size()) fail(path, "rows differ in length");
    out.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON encoding of numeric values
// ---------------------------------------------------------------------------

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return json{{"dims", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

// Matrices in reports must be finite or explicitly flagged; no silent NaN.
json mat_json_checked(const Eigen::MatrixXd& m, json& cell) {
  if (!m.allFinite()) cell["divergent"] = true;
  Eigen::MatrixXd clean = m;
  for (Eigen::Index r = 0; r < clean.rows(); ++r) {
    for (Eigen::Index c = 0; c < clean.cols(); ++c) {
      if (!std::isfinite(clean(r, c))) clean(r, c) = 0.0;
    }
  }
  return mat_json(clean);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// ---------------------------------------------------------------------------
// Model specs
// ---------------------------------------------------------------------------

ParamModel make_tabulated(const json& spec, const std::string& path);

ZooEntry model_from_spec(const json& spec, const std::string& path) {
  if (!spec.is_object()) fail(path, "expected an object");
  const std::string name = as_string(require(spec, path, "name"), path + ".name");
  if (name == "bernoulli") {
    check_keys(spec, path, {"name"});
    return make_bernoulli();
  }
  if (name == "multinomial") {
    check_keys(spec, path, {"name", "n"});
    return make_multinomial(as_int(require(spec, path, "n"), path + ".n"));
  }
  if (name == "simplex") {
    check_keys(spec, path, {"name", "n"});
    return make_full_simplex(as_int(require(spec, path, "n"), path + ".n"));
  }
  if (name == "gaussian-location") {
    check_keys(spec, path, {"name", "lo", "hi", "points"});
    const double lo = spec.contains("lo") ? as_number(spec["lo"], path + ".lo") : -12.0;
    const double hi = spec.contains("hi") ? as_number(spec["hi"], path + ".hi") : 12.0;
    const int pts = spec.contains("points") ? as_int(spec["points"], path + ".points") : 3001;
    return make_gaussian_location(lo, hi, static_cast<std::size_t>(pts));
  }
  if (name == "normal-mixture") {
    check_keys(spec, path, {"name", "lo", "hi", "points"});
    const double lo = spec.contains("lo") ? as_number(spec["lo"], path + ".lo") : -12.0;
    const double hi = spec.contains("hi") ? as_number(spec["hi"], path + ".hi") : 12.0;
    const int pts = spec.contains("points") ? as_int(spec["points"], path + ".points") : 4001;
    return make_normal_mixture(lo, hi, static_cast<std::size_t>(pts));
  }
  if (name == "pathology") {
    check_keys(spec, path, {"name", "alpha", "beta"});
    PathologyConfig cfg;
    if (spec.contains("alpha")) cfg.alpha = as_number(spec["alpha"], path + ".alpha");
    if (spec.contains("beta")) cfg.beta = as_number(spec["beta"], path + ".beta");
    return make_pathology(cfg);
  }
  if (name == "product") {
    check_keys(spec, path, {"name", "base", "copies"});
    ZooEntry base = model_from_spec(require(spec, path, "base"), path + ".base");
    return make_product(base, as_int(require(spec, path, "copies"), path + ".copies"));
  }
  if (name == "tabulated") {
    ZooEntry entry;
    entry.name = "tabulated";
    entry.model = make_tabulated(spec, path);
    return entry;
  }
  fail(path + ".name", "unknown model '" + name + "'");
}

// Tabulated finite model: densities per (parameter grid node, outcome) with
// multilinear interpolation between nodes.  Experimental surface.
ParamModel make_tabulated(const json& spec, const std::string& path) {
  check_keys(spec, path, {"name", "outcomes", "axes", "densities", "statistical"});
  const int outcomes = as_int(require(spec, path, "outcomes"), path + ".outcomes");
  if (outcomes < 1) fail(path + ".outcomes", "must be positive");
  const json& axes_json = require(spec, path, "axes");
  if (!axes_json.is_array() || axes_json.empty()) fail(path + ".axes", "expected axis arrays");
  std::vector<std::vector<double>> axes;
  for (std::size_t a = 0; a < axes_json.size(); ++a) {
    const Eigen::VectorXd axis = as_vector(axes_json[a], path + ".axes[" + std::to_string(a) + "]");
    if (axis.size() < 2) fail(path + ".axes", "each axis needs at least two nodes");
    for (Eigen::Index i = 1; i < axis.size(); ++i) {
      if (!(axis[i] > axis[i - 1])) fail(path + ".axes", "axis nodes must be strictly increasing");
    }
    axes.emplace_back(axis.data(), axis.data() + axis.size());
  }
  const int d = static_cast<int>(axes.size());
  if (d > 4) fail(path + ".axes", "tabulated models support at most 4 parameters");

  std::size_t nodes = 1;
  for (const auto& axis : axes) nodes *= axis.size();
  const json& dens_json = require(spec, path, "densities");
  if (!dens_json.is_array() || dens_json.size() != nodes * static_cast<std::size_t>(outcomes)) {
    fail(path + ".densities", "expected " + std::to_string(nodes * outcomes) + " values (node-major, outcome fastest)");
  }
  auto table = std::make_shared<std::vector<double>>();
  table->reserve(dens_json.size());
  for (std::size_t i = 0; i < dens_json.size(); ++i) {
    const double v = as_number(dens_json[i], path + ".densities[" + std::to_string(i) + "]");
    if (!(v >= 0.0) || !std::isfinite(v)) fail(path + ".densities", "densities must be nonnegative and finite");
    table->push_back(v);
  }

  ParamModel m;
  m.name = "tabulated";
  m.space = SampleSpace::finite(static_cast<std::size_t>(outcomes));
  m.dim = d;
  Eigen::VectorXd lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = axes[a].front();
    hi[a] = axes[a].back();
  }
  m.domain = Domain::box(lo, hi);
  m.is_statistical = spec.contains("statistical") && spec["statistical"].is_boolean()
                         ? spec["statistical"].get<bool>()
                         : false;

  auto axes_ptr = std::make_shared<std::vector<std::vector<double>>>(std::move(axes));
  m.density = [axes_ptr, table, outcomes](std::size_t point, const Eigen::VectorXd& xi) {
    const auto& ax = *axes_ptr;
    const int d = static_cast<int>(ax.size());
    std::vector<std::size_t> cell(d);
    std::vector<double> frac(d);
    for (int a = 0; a < d; ++a) {
      const auto& axis = ax[a];
      auto it = std::upper_bound(axis.begin(), axis.end(), xi[a]);
      std::size_t idx = it == axis.begin() ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
      idx = std::min(idx, axis.size() - 2);
      cell[a] = idx;
      frac[a] = (xi[a] - axis[idx]) / (axis[idx + 1] - axis[idx]);
      frac[a] = std::clamp(frac[a], 0.0, 1.0);
    }
    double value = 0.0;
    for (unsigned corner = 0; corner < (1u << d); ++corner) {
      double weight = 1.0;
      std::size_t flat = 0;
      for (int a = 0; a < d; ++a) {
        const bool high = (corner >> a) & 1u;
        weight *= high ? frac[a] : 1.0 - frac[a];
        flat = flat * ax[a].size() + (cell[a] + (high ? 1 : 0));
      }
      value += weight * (*table)[flat * static_cast<std::size_t>(outcomes) + point];
    }
    return value;
  };
  return m;
}

// ---------------------------------------------------------------------------
// Points, estimators, features
// ---------------------------------------------------------------------------

std::vector<Eigen::VectorXd> points_from_spec(const json& spec, const std::string& path,
                                              const ZooEntry& entry) {
  if (spec.is_string()) {
    if (spec.get<std::string>() != "default") fail(path, "expected point rows, a grid, or \"default\"");
    if (entry.default_points.empty()) fail(path, "model has no default points");
    return entry.default_points;
  }
  if (spec.is_object()) {
    check_keys(spec, path, {"grid"});
    const json& g = require(spec, path, "grid");
    check_keys(g, path + ".grid", {"min", "max", "count"});
    const Eigen::VectorXd mins = as_vector(require(g, path + ".grid", "min"), path + ".grid.min");
    const Eigen::VectorXd maxs = as_vector(require(g, path + ".grid", "max"), path + ".grid.max");
    const json& count_json = require(g, path + ".grid", "count");
    if (mins.size() != maxs.size()) fail(path + ".grid", "min and max differ in length");
    std::vector<int> counts;
    for (std::size_t i = 0; i < count_json.size(); ++i) {
      counts.push_back(as_int(count_json[i], path + ".grid.count"));
      if (counts.back() < 1) fail(path + ".grid.count", "counts must be positive");
    }
    if (static_cast<Eigen::Index>(counts.size()) != mins.size()) {
      fail(path + ".grid", "count and min differ in length");
    }
    std::size_t total = 1;
    for (int c : counts) total *= static_cast<std::size_t>(c);
    if (total > 1000000) fail(path + ".grid", "grid too large");
    std::vector<Eigen::VectorXd> points;
    points.reserve(total);
    const int d = static_cast<int>(counts.size());
    std::vector<int> idx(d, 0);
    for (std::size_t n = 0; n < total; ++n) {
      Eigen::VectorXd p(d);
      for (int a = 0; a < d; ++a) {
        p[a] = counts[a] == 1 ? mins[a]
                              : mins[a] + (maxs[a] - mins[a]) * idx[a] / double(counts[a] - 1);
      }
      points.push_back(std::move(p));
      for (int a = d - 1; a >= 0; --a) {
        if (++idx[a] < counts[a]) break;
        idx[a] = 0;
      }
    }
    return points;
  }
  if (spec.is_array()) {
    std::vector<Eigen::VectorXd> points;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      points.push_back(as_vector(spec[i], path + "[" + std::to_string(i) + "]"));
    }
    return points;
  }
  fail(path, "expected point rows, a grid, or \"default\"");
}

std::vector<std::pair<Estimator, FeatureMap>> estimators_from_spec(const json* est_spec,
                                                                   const json* feat_spec,
                                                                   const std::string& path,
                                                                   const ZooEntry& entry) {
  FeatureMap feature = FeatureMap::identity(entry.model.dim);
  if (feat_spec != nullptr) {
    if (feat_spec->is_string()) {
      if (feat_spec->get<std::string>() != "identity") fail(path + ".feature", "unknown feature");
    } else if (feat_spec->is_object()) {
      check_keys(*feat_spec, path + ".feature", {"affine"});
      const json& aff = require(*feat_spec, path + ".feature", "affine");
      check_keys(aff, path + ".feature.affine", {"A", "b"});
      const Eigen::MatrixXd A = as_matrix(require(aff, path + ".feature.affine", "A"),
                                          path + ".feature.affine.A");
      const Eigen::VectorXd b = as_vector(require(aff, path + ".feature.affine", "b"),
                                          path + ".feature.affine.b");
      if (A.cols() != entry.model.dim) fail(path + ".feature.affine.A", "column count must match model dimension");
      feature = FeatureMap::affine(A, b);
    } else {
      fail(path + ".feature", "expected \"identity\" or an affine object");
    }
  }

  std::vector<std::pair<Estimator, FeatureMap>> cells;
  if (est_spec == nullptr || (est_spec->is_string() && est_spec->get<std::string>() == "suite")) {
    if (entry.estimator_suite.empty()) fail(path + ".estimator", "model has no estimator suite");
    for (const auto& [est, suite_feat] : entry.estimator_suite) {
      cells.emplace_back(est, feat_spec ? feature : suite_feat);
    }
    return cells;
  }
  if (est_spec->is_string()) {
    const std::string name = est_spec->get<std::string>();
    for (const auto& [est, suite_feat] : entry.estimator_suite) {
      if (est.name == name) {
        cells.emplace_back(est, feat_spec ? feature : suite_feat);
        return cells;
      }
    }
    fail(path + ".estimator", "no estimator named '" + name + "' in the suite");
  }
  if (est_spec->is_object()) {
    check_keys(*est_spec, path + ".estimator", {"table", "name"});
    Eigen::MatrixXd table = as_matrix(require(*est_spec, path + ".estimator", "table"),
                                      path + ".estimator.table");
    if (static_cast<std::size_t>(table.rows()) != entry.model.space->size()) {
      fail(path + ".estimator.table", "row count must match the sample space size");
    }
    if (table.cols() != entry.model.dim) {
      fail(path + ".estimator.table", "column count must match the model dimension");
    }
    std::string name = est_spec->contains("name")
                           ? as_string((*est_spec)["name"], path + ".estimator.name")
                           : "inline";
    cells.emplace_back(Estimator(std::move(name), std::move(table)), feature);
    return cells;
  }
  fail(path + ".estimator", "expected a suite name or an inline table");
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

const char* kCommands[] = {"fisher", "scan", "crbound", "verify", "simplex", "integrability", "regularity"};

void validate_common(const json& spec) {
  if (!spec.is_object()) fail("$", "job spec must be an object");
  const std::string cmd = as_string(require(spec, "$", "command"), "$.command");
  bool known = false;
  for (const char* c : kCommands) known = known || cmd == c;
  if (!known) fail("$.command", "unknown command '" + cmd + "'");

  if (spec.contains("thresholds")) {
    const json& t = spec["thresholds"];
    if (!t.is_object()) fail("$.thresholds", "expected an object");
    check_keys(t, "$.thresholds", {"rank_rel", "psd_tol"});
    if (t.contains("rank_rel")) as_number(t["rank_rel"], "$.thresholds.rank_rel");
    if (t.contains("psd_tol")) as_number(t["psd_tol"], "$.thresholds.psd_tol");
  }
  if (spec.contains("output")) {
    const json& o = spec["output"];
    if (!o.is_object()) fail("$.output", "expected an object");
    check_keys(o, "$.output", {"path", "format"});
    if (o.contains("format")) {
      const std::string f = as_string(o["format"], "$.output.format");
      if (f != "json" && f != "csv") fail("$.output.format", "expected \"json\" or \"csv\"");
    }
    if (o.contains("path")) as_string(o["path"], "$.output.path");
  }
  if (spec.contains("seed")) {
    if (!spec["seed"].is_number_unsigned() && !spec["seed"].is_number_integer()) {
      fail("$.seed", "expected an integer");
    }
  }
  if (spec.contains("mc")) {
    const json& mc = spec["mc"];
    if (!mc.is_object()) fail("$.mc", "expected an object");
    check_keys(mc, "$.mc", {"samples"});
    const int s = as_int(require(mc, "$.mc", "samples"), "$.mc.samples");
    if (s < 2) fail("$.mc.samples", "need at least two samples");
    if (!spec.contains("seed")) fail("$.seed", "seed required for Monte Carlo");
  }
}

}  // namespace

void validate_job(const json& spec) {
  validate_common(spec);
  const std::string cmd = spec["command"].get<std::string>();

  if (cmd == "fisher" || cmd == "scan") {
    check_keys(spec, "$", {"command", "model", "points", "thresholds", "seed", "output"});
    ZooEntry entry = model_from_spec(require(spec, "$", "model"), "$.model");
    points_from_spec(require(spec, "$", "points"), "$.points", entry);
    return;
  }
  if (cmd == "crbound") {
    check_keys(spec, "$", {"command", "model", "points", "estimator", "feature", "thresholds",
                           "seed", "output", "mc"});
    ZooEntry entry = model_from_spec(require(spec, "$", "model"), "$.model");
    points_from_spec(require(spec, "$", "points"), "$.points", entry);
    const json* est = spec.contains("estimator") ? &spec["estimator"] : nullptr;
    const json* feat = spec.contains("feature") ? &spec["feature"] : nullptr;
    estimators_from_spec(est, feat, "$", entry);
    return;
  }
  if (cmd == "verify") {
    check_keys(spec, "$", {"command", "models", "thresholds", "seed", "output", "mc"});
    const json& models = require(spec, "$", "models");
    if (!models.is_array() || models.empty()) fail("$.models", "expected a non-empty array");
    for (std::size_t i = 0; i < models.size(); ++i) {
      const std::string path = "$.models[" + std::to_string(i) + "]";
      const json& m = models[i];
      if (!m.is_object()) fail(path, "expected an object");
      check_keys(m, path, {"model", "points", "estimator", "feature"});
      ZooEntry entry = model_from_spec(require(m, path, "model"), path + ".model");
      if (m.contains("points")) points_from_spec(m["points"], path + ".points", entry);
      const json* est = m.contains("estimator") ? &m["estimator"] : nullptr;
      const json* feat = m.contains("feature") ? &m["feature"] : nullptr;
      estimators_from_spec(est, feat, path, entry);
    }
    return;
  }
  if (cmd == "simplex") {
    check_keys(spec, "$", {"command", "mu", "constrained", "f", "g", "partials", "seed", "output"});
    const Eigen::VectorXd mu = as_vector(require(spec, "$", "mu"), "$.mu");
    bool constrained = false;
    if (spec.contains("constrained")) {
      if (!spec["constrained"].is_boolean()) fail("$.constrained", "expected a boolean");
      constrained = spec["constrained"].get<bool>();
    }
    SimplexPoint p(mu, constrained);  // validates positivity / unit mass
    for (const char* key : {"f", "g", "partials"}) {
      if (spec.contains(key)) {
        const Eigen::VectorXd v = as_vector(spec[key], std::string("$.") + key);
        if (v.size() != mu.size()) fail(std::string("$.") + key, "length must match mu");
      }
    }
    return;
  }
  if (cmd == "integrability") {
    check_keys(spec, "$", {"command", "model", "curve", "k", "t_samples", "thresholds", "seed", "output"});
    ZooEntry entry = model_from_spec(require(spec, "$", "model"), "$.model");
    const json& curve = require(spec, "$", "curve");
    if (!curve.is_object()) fail("$.curve", "expected an object");
    check_keys(curve, "$.curve", {"from", "to", "t0", "t1"});
    const Eigen::VectorXd from = as_vector(require(curve, "$.curve", "from"), "$.curve.from");
    const Eigen::VectorXd to = as_vector(require(curve, "$.curve", "to"), "$.curve.to");
    if (from.size() != entry.model.dim || to.size() != entry.model.dim) {
      fail("$.curve", "curve endpoints must match the model dimension");
    }
    const double k = as_number(require(spec, "$", "k"), "$.k");
    if (!(k > 1.0)) fail("$.k", "k must exceed 1");
    const int t_samples = as_int(require(spec, "$", "t_samples"), "$.t_samples");
    if (t_samples < 3) fail("$.t_samples", "need at least 3 samples");
    return;
  }
  if (cmd == "regularity") {
    check_keys(spec, "$", {"command", "model", "f", "k", "xi0", "radii", "samples_per_radius",
                           "thresholds", "seed", "output"});
    ZooEntry entry = model_from_spec(require(spec, "$", "model"), "$.model");
    const json& f = require(spec, "$", "f");
    if (f.is_object()) {
      check_keys(f, "$.f", {"pathology_phi"});
      const json& pp = require(f, "$.f", "pathology_phi");
      check_keys(pp, "$.f.pathology_phi", {"beta"});
      as_number(require(pp, "$.f.pathology_phi", "beta"), "$.f.pathology_phi.beta");
    } else {
      const Eigen::VectorXd fv = as_vector(f, "$.f");
      if (static_cast<std::size_t>(fv.size()) != entry.model.space->size()) {
        fail("$.f", "length must match the sample space size");
      }
    }
    const double k = as_number(require(spec, "$", "k"), "$.k");
    if (!(k > 1.0)) fail("$.k", "k must exceed 1");
    const Eigen::VectorXd xi0 = as_vector(require(spec, "$", "xi0"), "$.xi0");
    if (xi0.size() != entry.model.dim) fail("$.xi0", "length must match the model dimension");
    as_vector(require(spec, "$", "radii"), "$.radii");
    if (spec.contains("samples_per_radius")) {
      if (as_int(spec["samples_per_radius"], "$.samples_per_radius") < 1) {
        fail("$.samples_per_radius", "must be positive");
      }
    }
    return;
  }
}

namespace {

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct RunContext {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double rank_threshold = defaults::kRankRelThreshold;
  std::optional<double> psd_tol;
  std::optional<std::size_t> mc_samples;
};

void parallel_cells(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& work) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(count));
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
    });
  }
  for (auto& th : pool) th.join();
}

json fisher_point_result(const ZooEntry& entry, const Eigen::VectorXd& xi, const RunContext& ctx,
                         bool scan_only) {
  json cell;
  cell["point"] = vec_json(xi);
  try {
    const FisherMatrix F = fisher_matrix(entry.model, xi);
    const EssentialDecomposition E = essential_decomposition(F, ctx.rank_threshold);
    cell["rank"] = E.rank;
    cell["eigenvalues"] = vec_json(E.eigenvalues);
    if (entry.model.is_statistical) {
      cell["mass_residual"] = std::abs(density_at(entry.model, xi).total_mass() - 1.0);
    }
    if (scan_only) return cell;
    cell["G"] = mat_json_checked(F.G, cell);
    cell["essential_basis"] = mat_json(E.essential_basis);
    cell["kernel_basis"] = mat_json(E.kernel_basis);
    const ReducedMetric R = reduced_metric(E, F);
    cell["reduced"] = mat_json(R.reduced);
    cell["reduced_inv"] = mat_json(R.reduced_inv);
    cell["pinv"] = mat_json(R.pinv);
  } catch (const std::exception& e) {
    cell["error"] = e.what();
  }
  return cell;
}

json crbound_cell_result(const ZooEntry& entry, const Estimator& est, const FeatureMap& feat,
                         const Eigen::VectorXd& xi, const RunContext& ctx, std::uint64_t cell_seed) {
  json cell;
  cell["model"] = entry.name;
  cell["estimator"] = est.name;
  cell["feature"] = feat.name;
  cell["point"] = vec_json(xi);
  try {
    const EstimatorStats st = estimator_stats(entry.model, est, feat, xi);
    const CRGapReport gap = cr_gap(entry.model, est, feat, xi, ctx.psd_tol, ctx.rank_threshold);
    cell["phi_hat"] = vec_json(st.phi_hat);
    cell["bias"] = vec_json(st.bias);
    cell["V"] = mat_json_checked(st.V, cell);
    cell["MSE"] = mat_json_checked(st.MSE, cell);
    cell["d_phi_hat"] = mat_json_checked(st.d_phi_hat, cell);
    cell["msevb_residual"] = st.msevb_residual;
    cell["bound"] = mat_json_checked(gap.bound, cell);
    cell["gap"] = mat_json_checked(gap.gap, cell);
    cell["min_gap_eig"] = gap.min_gap_eig;
    cell["tol"] = gap.tol;
    cell["psd_certified"] = gap.psd_certified;
    cell["mass_residual"] = std::abs(density_at(entry.model, xi).total_mass() - 1.0);
    if (ctx.mc_samples) {
      const CRGapReport mc =
          cr_gap_mc(entry.model, est, feat, xi, *ctx.mc_samples, cell_seed, ctx.rank_threshold);
      json m;
      m["V"] = mat_json(mc.V);
      m["min_gap_eig"] = mc.min_gap_eig;
      m["tol"] = mc.tol;
      m["psd_certified"] = mc.psd_certified;
      m["samples"] = *ctx.mc_samples;
      m["cell_seed"] = cell_seed;
      cell["mc"] = std::move(m);
    }
  } catch (const std::exception& e) {
    cell["error"] = e.what();
  }
  return cell;
}

// The tabulated model surface is experimental; reports say so explicitly.
bool uses_tabulated_model(const json& node) {
  if (node.is_object()) {
    if (node.contains("name") && node["name"] == "tabulated") return true;
    for (const auto& child : node) {
      if (uses_tabulated_model(child)) return true;
    }
  } else if (node.is_array()) {
    for (const auto& child : node) {
      if (uses_tabulated_model(child)) return true;
    }
  }
  return false;
}

json run_simplex(const json& spec) {
  const Eigen::VectorXd mu = as_vector(spec["mu"], "$.mu");
  const bool constrained = spec.contains("constrained") && spec["constrained"].get<bool>();
  SimplexPoint p(mu, constrained);
  json out;
  out["metric_full"] = mat_json(fisher_metric_full(p));
  if (spec.contains("f") && spec.contains("g")) {
    const Eigen::VectorXd f = as_vector(spec["f"], "$.f");
    const Eigen::VectorXd g = as_vector(spec["g"], "$.g");
    out["inverse_pairing_full"] = inverse_pairing_full(p, f, g);
    if (constrained) out["inverse_pairing_simplex"] = inverse_pairing_simplex(p, f, g);
  }
  if (spec.contains("partials")) {
    const Eigen::VectorXd partials = as_vector(spec["partials"], "$.partials");
    out["gradient_full"] = vec_json(fisher_gradient_full(p, partials));
    if (constrained) out["gradient_simplex"] = vec_json(fisher_gradient_simplex(p, partials));
  }
  return json::array({out});
}

}  // namespace

JobOutcome run_job(const json& spec, const JobOverrides& overrides) {
  validate_job(spec);
  const std::string cmd = spec["command"].get<std::string>();

  RunContext ctx;
  if (spec.contains("seed")) ctx.seed = spec["seed"].get<std::uint64_t>();
  if (overrides.seed) ctx.seed = *overrides.seed;
  if (spec.contains("thresholds")) {
    const json& t = spec["thresholds"];
    if (t.contains("rank_rel")) ctx.rank_threshold = t["rank_rel"].get<double>();
    if (t.contains("psd_tol")) ctx.psd_tol = t["psd_tol"].get<double>();
  }
  if (overrides.rank_threshold) ctx.rank_threshold = *overrides.rank_threshold;
  if (overrides.psd_tol) ctx.psd_tol = *overrides.psd_tol;
  if (overrides.threads) ctx.threads = std::max(1u, *overrides.threads);
  if (spec.contains("mc")) {
    ctx.mc_samples = static_cast<std::size_t>(spec["mc"]["samples"].get<int>());
    if (overrides.seed) {
      // keep explicit seed precedence; already applied above
    }
  }

  json results = json::array();
  bool all_certified = true;
  bool has_cells = false;

  if (cmd == "fisher" || cmd == "scan") {
    ZooEntry entry = model_from_spec(spec["model"], "$.model");
    const auto points = points_from_spec(spec["points"], "$.points", entry);
    std::vector<json> cells(points.size());
    parallel_cells(points.size(), ctx.threads, [&](std::size_t i) {
      cells[i] = fisher_point_result(entry, points[i], ctx, cmd == "scan");
    });
    for (auto& c : cells) results.push_back(std::move(c));
  } else if (cmd == "crbound") {
    ZooEntry entry = model_from_spec(spec["model"], "$.model");
    const auto points = points_from_spec(spec["points"], "$.points", entry);
    const json* est = spec.contains("estimator") ? &spec["estimator"] : nullptr;
    const json* feat = spec.contains("feature") ? &spec["feature"] : nullptr;
    const auto cells_spec = estimators_from_spec(est, feat, "$", entry);
    std::vector<json> cells(points.size() * cells_spec.size());
    parallel_cells(cells.size(), ctx.threads, [&](std::size_t i) {
      const std::size_t pi = i / cells_spec.size();
      const auto& [e, f] = cells_spec[i % cells_spec.size()];
      cells[i] = crbound_cell_result(entry, e, f, points[pi], ctx, splitmix64(ctx.seed + i));
    });
    has_cells = true;
    for (auto& c : cells) {
      if (!c.contains("psd_certified") || !c["psd_certified"].get<bool>()) all_certified = false;
      results.push_back(std::move(c));
    }
  } else if (cmd == "verify") {
    struct Cell {
      ZooEntry entry;
      Estimator est;
      FeatureMap feat;
      Eigen::VectorXd xi;
    };
    std::vector<Cell> cells;
    for (const json& mspec : spec["models"]) {
      ZooEntry entry = model_from_spec(mspec["model"], "$.models[].model");
      const auto points = mspec.contains("points")
                              ? points_from_spec(mspec["points"], "$.models[].points", entry)
                              : entry.default_points;
      const json* est = mspec.contains("estimator") ? &mspec["estimator"] : nullptr;
      const json* feat = mspec.contains("feature") ? &mspec["feature"] : nullptr;
      const auto pairs = estimators_from_spec(est, feat, "$.models[]", entry);
      for (const auto& xi : points) {
        for (const auto& [e, f] : pairs) cells.push_back({entry, e, f, xi});
      }
    }
    std::vector<json> out(cells.size());
    parallel_cells(cells.size(), ctx.threads, [&](std::size_t i) {
      out[i] = crbound_cell_result(cells[i].entry, cells[i].est, cells[i].feat, cells[i].xi, ctx,
                                   splitmix64(ctx.seed + i));
    });
    has_cells = true;
    for (auto& c : out) {
      if (!c.contains("psd_certified") || !c["psd_certified"].get<bool>()) all_certified = false;
      results.push_back(std::move(c));
    }
  } else if (cmd == "simplex") {
    results = run_simplex(spec);
  } else if (cmd == "integrability") {
    ZooEntry entry = model_from_spec(spec["model"], "$.model");
    const json& cj = spec["curve"];
    const Eigen::VectorXd from = as_vector(cj["from"], "$.curve.from");
    const Eigen::VectorXd to = as_vector(cj["to"], "$.curve.to");
    Curve curve;
    curve.t0 = cj.contains("t0") ? cj["t0"].get<double>() : 0.0;
    curve.t1 = cj.contains("t1") ? cj["t1"].get<double>() : 1.0;
    const double t0 = curve.t0, t1 = curve.t1;
    curve.position = [from, to, t0, t1](double t) -> Eigen::VectorXd {
      return from + (t - t0) / (t1 - t0) * (to - from);
    };
    curve.velocity = [from, to, t0, t1](double) -> Eigen::VectorXd { return (to - from) / (t1 - t0); };
    const IntegrabilityReport rep = integrability_diagnostic(
        entry.model, curve, spec["k"].get<double>(), spec["t_samples"].get<std::size_t>());
    json cell;
    cell["k"] = rep.k;
    cell["max_jump"] = std::isfinite(rep.max_jump) ? json(rep.max_jump) : json("divergent");
    json samples = json::array();
    for (const auto& s : rep.samples) {
      json e;
      e["t"] = s.t;
      e["norm"] = std::isfinite(s.norm) ? json(s.norm) : json("divergent");
      e["norm_pow"] = std::isfinite(s.norm_pow) ? json(s.norm_pow) : json("divergent");
      samples.push_back(std::move(e));
    }
    cell["samples"] = std::move(samples);
    results.push_back(std::move(cell));
  } else if (cmd == "regularity") {
    ZooEntry entry = model_from_spec(spec["model"], "$.model");
    Eigen::VectorXd f;
    if (spec["f"].is_object()) {
      f = pathology_feature(*entry.model.space, spec["f"]["pathology_phi"]["beta"].get<double>());
    } else {
      f = as_vector(spec["f"], "$.f");
    }
    const Eigen::VectorXd xi0 = as_vector(spec["xi0"], "$.xi0");
    const Eigen::VectorXd radii_v = as_vector(spec["radii"], "$.radii");
    std::vector<double> radii(radii_v.data(), radii_v.data() + radii_v.size());
    const std::size_t spr = spec.contains("samples_per_radius")
                                ? spec["samples_per_radius"].get<std::size_t>()
                                : 32;
    const RegularityReport rep =
        regularity_diagnostic(entry.model, f, spec["k"].get<double>(), xi0, radii, spr);
    json cell;
    json rows = json::array();
    for (std::size_t i = 0; i < rep.radii.size(); ++i) {
      json e;
      e["radius"] = rep.radii[i];
      e["sup_norm"] = std::isfinite(rep.sup_norms[i]) ? json(rep.sup_norms[i]) : json("divergent");
      rows.push_back(std::move(e));
    }
    cell["entries"] = std::move(rows);
    results.push_back(std::move(cell));
  }

  json report;
  report["schema_version"] = kSchemaVersion;
  report["tool"] = {{"name", "infogeo"}, {"version", kToolVersion}};
  report["command"] = cmd;
  report["seed"] = ctx.seed;
  report["rank_threshold"] = ctx.rank_threshold;
  report["spec"] = spec;
  if (uses_tabulated_model(spec)) report["experimental"] = true;
  report["results"] = std::move(results);
  {
    json errors = json::array();
    for (const auto& cell : report["results"]) {
      if (cell.contains("error")) {
        errors.push_back({{"point", cell.contains("point") ? cell["point"] : json()},
                          {"message", cell["error"]}});
      }
    }
    report["diagnostics"] = {{"errors", std::move(errors)}};
  }
  if (has_cells) report["summary"] = {{"all_certified", all_certified}};

  JobOutcome outcome;
  outcome.exit_code = (cmd == "verify" && !all_certified) ? 2 : 0;
  outcome.report = std::move(report);
  return outcome;
}

namespace {

std::string num_csv(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void csv_point_columns(const json& point, std::string& row) {
  for (const auto& c : point) {
    row += num_csv(c.get<double>());
    row += ",";
  }
}

}  // namespace

std::string render_report(const json& report, const std::string& format) {
  if (format == "json") return report.dump(2) + "\n";
  if (format != "csv") throw std::invalid_argument("unknown format '" + format + "'");

  const std::string cmd = report["command"].get<std::string>();
  std::string out;
  const json& results = report["results"];
  const auto scalar = [](const json& v) -> std::string {
    return v.is_number() ? num_csv(v.get<double>()) : "divergent";
  };

  if (cmd == "scan" || cmd == "fisher") {
    out = "point,rank,lambda_max,lambda_min,error\n";
    for (const auto& cell : results) {
      std::string row;
      csv_point_columns(cell["point"], row);
      row.pop_back();
      row = "\"" + row + "\"";
      if (cell.contains("error")) {
        row += ",,,," + cell["error"].get<std::string>();
      } else {
        const json& ev = cell["eigenvalues"];
        row += "," + std::to_string(cell["rank"].get<int>());
        row += "," + scalar(ev.front()) + "," + scalar(ev.back()) + ",";
      }
      out += row + "\n";
    }
    return out;
  }
  if (cmd == "crbound" || cmd == "verify") {
    out = "model,estimator,point,min_gap_eig,tol,psd_certified,msevb_residual,error\n";
    for (const auto& cell : results) {
      std::string point;
      csv_point_columns(cell["point"], point);
      point.pop_back();
      std::string row = cell["model"].get<std::string>() + "," +
                        cell["estimator"].get<std::string>() + ",\"" + point + "\"";
      if (cell.contains("error")) {
        row += ",,,,," + cell["error"].get<std::string>();
      } else {
        row += "," + scalar(cell["min_gap_eig"]) + "," + scalar(cell["tol"]);
        row += std::string(",") + (cell["psd_certified"].get<bool>() ? "true" : "false");
        row += "," + scalar(cell["msevb_residual"]) + ",";
      }
      out += row + "\n";
    }
    return out;
  }
  if (cmd == "integrability") {
    out = "t,norm,norm_pow\n";
    for (const auto& s : results.at(0)["samples"]) {
      out += num_csv(s["t"].get<double>()) + "," + scalar(s["norm"]) + "," + scalar(s["norm_pow"]) + "\n";
    }
    return out;
  }
  if (cmd == "regularity") {
    out = "radius,sup_norm\n";
    for (const auto& e : results.at(0)["entries"]) {
      out += num_csv(e["radius"].get<double>()) + "," + scalar(e["sup_norm"]) + "\n";
    }
    return out;
  }
  throw std::invalid_argument("csv export is only available for per-point scalar sweeps");
}

}  // namespace infogeo
