#include "smp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace smp {

namespace {

[[noreturn]] void fail(const std::string& what, const std::string& msg) {
  throw std::runtime_error(what + ": " + msg);
}

const Json& need(const Json& j, const char* field, const std::string& what) {
  if (!j.is_object()) fail(what, "expected an object");
  auto it = j.find(field);
  if (it == j.end()) fail(what, std::string("missing field '") + field + "'");
  return *it;
}

double num(const Json& j, const std::string& what) {
  if (!j.is_number()) fail(what, "expected a number");
  return j.get<double>();
}

Index idx(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) fail(what, "expected an integer");
  return j.get<Index>();
}

std::string str(const Json& j, const std::string& what) {
  if (!j.is_string()) fail(what, "expected a string");
  return j.get<std::string>();
}

std::vector<Vec> vec_list(const Json& j, const std::string& what) {
  if (!j.is_array()) fail(what, "expected an array of vectors");
  std::vector<Vec> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(vec_from_json(j[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<Mat> mat_list(const Json& j, const std::string& what) {
  if (!j.is_array()) fail(what, "expected an array of matrices");
  std::vector<Mat> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(mat_from_json(j[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

Json mat_list_to_json(const std::vector<Mat>& ms) {
  Json a = Json::array();
  for (const Mat& M : ms) a.push_back(mat_to_json(M));
  return a;
}

}  // namespace

// ---- primitives ----------------------------------------------------------

Json mat_to_json(const Mat& M) {
  Json rows = Json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vec_to_json(const Vec& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Mat mat_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) fail(what, "expected a non-empty array of rows");
  const size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) fail(what, "rows must be non-empty arrays");
  const size_t cols = j[0].size();
  Mat M(static_cast<Index>(rows), static_cast<Index>(cols));
  for (size_t i = 0; i < rows; ++i) {
    const Json& row = j[i];
    if (!row.is_array() || row.size() != cols)
      fail(what, "row " + std::to_string(i) + " has inconsistent length");
    for (size_t c = 0; c < cols; ++c)
      M(Index(i), Index(c)) = num(row[c], what + "[" + std::to_string(i) + "][" + std::to_string(c) + "]");
  }
  return M;
}

Vec vec_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) fail(what, "expected an array");
  Vec v(Index(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(Index(i)) = num(j[i], what + "[" + std::to_string(i) + "]");
  return v;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open for reading");
  try {
    return Json::parse(in);  // parse errors carry byte position context
  } catch (const Json::parse_error& e) {
    fail(path, e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << j.dump(2) << "\n";
  if (!out) fail(path, "write failed");
}

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// ---- enum spellings --------------------------------------------------------

CertificateFamily family_from_string(const std::string& s) {
  if (s == "per-vertex") return CertificateFamily::PerVertex;
  if (s == "identical") return CertificateFamily::Identical;
  throw std::invalid_argument("unknown certificate family '" + s +
                              "' (expected per-vertex or identical)");
}

CovarianceLaw covariance_law_from_string(const std::string& s) {
  if (s == "affine") return CovarianceLaw::Affine;
  if (s == "independent-vertices") return CovarianceLaw::IndependentVertices;
  throw std::invalid_argument("unknown covariance law '" + s +
                              "' (expected affine or independent-vertices)");
}

const char* to_string(CovarianceLaw law) {
  return law == CovarianceLaw::Affine ? "affine" : "independent-vertices";
}

const char* to_string(TimeVariation tv) { return tv == TimeVariation::TI ? "TI" : "TV"; }

const char* to_string(WeightKind k) {
  switch (k) {
    case WeightKind::Unit: return "unit";
    case WeightKind::Identity: return "identity";
    case WeightKind::QuadraticOuter: return "quadratic-outer";
  }
  return "unknown";
}

namespace {

WeightKind weight_kind_from_string(const std::string& s, const std::string& what) {
  if (s == "unit") return WeightKind::Unit;
  if (s == "identity") return WeightKind::Identity;
  if (s == "quadratic-outer") return WeightKind::QuadraticOuter;
  fail(what, "unknown weights '" + s + "' (expected unit, identity, or quadratic-outer)");
}

TimeVariation time_variation_from_string(const std::string& s, const std::string& what) {
  if (s == "TI") return TimeVariation::TI;
  if (s == "TV") return TimeVariation::TV;
  fail(what, "unknown time_variation '" + s + "' (expected TI or TV)");
}

}  // namespace

// ---- model ------------------------------------------------------------------

SmpVertexSet model_from_json(const Json& j) {
  const std::string what = "model";
  const std::string kind = str(need(j, "kind", what), what + ".kind");
  const Index n = idx(need(j, "n", what), what + ".n");
  const Index m = idx(need(j, "m", what), what + ".m");
  if (n < 1 || m < 0) fail(what, "need n >= 1 and m >= 0");

  SmpVertexSet s;
  if (kind == "vertex-set") {
    s.n = n;
    s.m = m;
    s.vertices = mat_list(need(j, "vertices", what), what + ".vertices");
    s.weight_kind =
        weight_kind_from_string(str(need(j, "weights", what), what + ".weights"), what + ".weights");
    s.d_theta = idx(need(j, "d_theta", what), what + ".d_theta");
  } else if (kind == "iid") {
    s = from_iid(mat_from_json(need(j, "second_moment", what), what + ".second_moment"), n, m);
  } else if (kind == "deterministic-polytope") {
    s = from_deterministic_polytope(
        vec_list(need(j, "vertex_vectors", what), what + ".vertex_vectors"), n, m);
  } else if (kind == "random-polytope") {
    if (j.contains("cross_moments")) {
      const Json& grid = j["cross_moments"];
      if (!grid.is_array()) fail(what, "cross_moments must be an array of rows");
      std::vector<std::vector<Mat>> C;
      for (size_t i = 0; i < grid.size(); ++i)
        C.push_back(mat_list(grid[i], what + ".cross_moments[" + std::to_string(i) + "]"));
      s = from_random_polytope(C, n, m);
    } else {
      // Independent per-vertex sampling: the grid follows from means + covs.
      auto means = vec_list(need(j, "means", what), what + ".means");
      auto covs = mat_list(need(j, "covariances", what), what + ".covariances");
      s = from_random_polytope(independent_cross_moments(means, covs), n, m);
    }
  } else if (kind == "uncertain-mean-cov") {
    UncertainMeanCov u;
    u.n = n;
    u.m = m;
    u.means = vec_list(need(j, "means", what), what + ".means");
    u.covariances = mat_list(need(j, "covariances", what), what + ".covariances");
    u.d_theta = Index(u.means.size());
    s = from_uncertain_mean_cov(u);
  } else if (kind == "mean-cov-polytope") {
    s = from_mean_cov_polytope(vec_from_json(need(j, "mean", what), what + ".mean"),
                               mat_list(need(j, "covariances", what), what + ".covariances"), n, m);
  } else {
    fail(what, "unknown kind '" + kind + "'");
  }

  if (j.contains("time_variation"))
    s.time_variation = time_variation_from_string(str(j["time_variation"], what + ".time_variation"),
                                                  what + ".time_variation");
  return s;
}

Json model_to_json(const SmpVertexSet& s) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "vertex-set";
  j["n"] = s.n;
  j["m"] = s.m;
  j["d_theta"] = s.d_theta;
  j["weights"] = to_string(s.weight_kind);
  j["time_variation"] = to_string(s.time_variation);
  j["vertices"] = mat_list_to_json(s.vertices);
  return j;
}

SmpVertexSet load_model(const std::string& path) { return model_from_json(load_json_file(path)); }

void save_model(const std::string& path, const SmpVertexSet& s) {
  write_json_file(path, model_to_json(s));
}

// ---- sampling distribution ----------------------------------------------------

ParametricGaussian distribution_from_json(const Json& j) {
  const std::string what = "distribution";
  const std::string kind = str(need(j, "kind", what), what + ".kind");
  if (kind != "parametric-gaussian") fail(what, "unknown kind '" + kind + "'");
  ParametricGaussian d;
  d.n = idx(need(j, "n", what), what + ".n");
  d.m = idx(need(j, "m", what), what + ".m");
  d.law = covariance_law_from_string(str(need(j, "covariance_law", what), what + ".covariance_law"));
  d.means = vec_list(need(j, "means", what), what + ".means");
  d.covariances = mat_list(need(j, "covariances", what), what + ".covariances");
  d.d_theta = Index(d.means.size());
  if (d.means.size() != d.covariances.size()) fail(what, "means/covariances count mismatch");
  const Index dim = d.vdim();
  for (const Vec& mu : d.means)
    if (mu.size() != dim) fail(what, "mean length does not match n(n+m)");
  for (const Mat& S : d.covariances)
    if (S.rows() != dim || S.cols() != dim) fail(what, "covariance size does not match n(n+m)");
  return d;
}

Json distribution_to_json(const ParametricGaussian& d) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "parametric-gaussian";
  j["n"] = d.n;
  j["m"] = d.m;
  j["d_theta"] = d.d_theta;
  j["covariance_law"] = to_string(d.law);
  Json means = Json::array();
  for (const Vec& mu : d.means) means.push_back(vec_to_json(mu));
  j["means"] = std::move(means);
  j["covariances"] = mat_list_to_json(d.covariances);
  return j;
}

ParametricGaussian load_distribution(const std::string& path) {
  return distribution_from_json(load_json_file(path));
}

void save_distribution(const std::string& path, const ParametricGaussian& d) {
  write_json_file(path, distribution_to_json(d));
}

// ---- gain -----------------------------------------------------------------------

Mat gain_from_json(const Json& j) {
  if (j.is_array()) return mat_from_json(j, "gain");
  return mat_from_json(need(j, "K", "gain"), "gain.K");
}

Json gain_to_json(const Mat& K) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["K"] = mat_to_json(K);
  return j;
}

Mat load_gain(const std::string& path) { return gain_from_json(load_json_file(path)); }

void save_gain(const std::string& path, const Mat& K) { write_json_file(path, gain_to_json(K)); }

// ---- results ----------------------------------------------------------------------

Json certificate_to_json(const GainCertificate& c, const Mat& K) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["certified"] = c.certified;
  j["beta_tilde"] = c.beta_tilde;
  j["ms_rate"] = c.ms_rate;
  j["margin"] = c.margin;
  j["family"] = to_string(c.family);
  j["solver_status"] = to_string(c.solver_status);
  j["newton_iters"] = c.newton_iters;
  j["K"] = mat_to_json(K);
  j["P"] = mat_list_to_json(c.P);
  j["G"] = mat_to_json(c.G);
  return j;
}

Json synthesis_to_json(const SynthesisResult& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["status"] = to_string(r.status);
  j["condition"] = to_string(r.condition);
  j["condition_margin"] = r.condition_margin;
  j["family"] = to_string(r.family);
  j["K"] = mat_to_json(r.K);
  j["H"] = mat_to_json(r.H);
  j["L"] = mat_to_json(r.L);
  j["Q"] = mat_list_to_json(r.Q);
  j["lambda1"] = r.candidate.lambda1;
  j["eps"] = r.candidate.eps;
  j["quality"] = r.candidate.quality;
  Json iters = Json::array();
  for (const IterationRecord& it : r.candidate.iterations) {
    Json row;
    row["ell"] = it.ell;
    row["eps"] = it.eps;
    row["objective"] = it.objective;
    row["trace_Z"] = it.trace_Z;
    // An absent phase-1 pass is tracked as NaN internally; write an explicit
    // null so the in-memory document matches the serialized text.
    row["phase1_margin"] =
        std::isnan(it.phase1_margin) ? Json(nullptr) : Json(it.phase1_margin);
    row["solver_status"] = to_string(it.status);
    row["optimality_held"] = it.optimality_held;
    iters.push_back(std::move(row));
  }
  j["iterations"] = std::move(iters);
  j["certificate"] = certificate_to_json(r.certificate, r.K);
  return j;
}

// ---- run manifests --------------------------------------------------------------------

Json manifest_to_json(const RunManifest& mf) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["command"] = mf.command;
  j["inputs"] = mf.inputs;
  j["outputs"] = mf.outputs;
  j["config"] = mf.config;
  if (mf.has_seed) j["seed"] = mf.seed;
  j["wall_seconds"] = mf.wall_seconds;
  return j;
}

void write_manifest(const std::string& path, const RunManifest& mf) {
  write_json_file(path, manifest_to_json(mf));
}

}  // namespace smp
