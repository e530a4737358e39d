#ifndef SMPSTAB_IO_HPP
#define SMPSTAB_IO_HPP

#include "smp/certify.hpp"
#include "smp/model.hpp"
#include "smp/simulate.hpp"
#include "smp/synthesis.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

// File formats used by the CLI: JSON for structured inputs/outputs, CSV for
// time series. Every document carries schema_version so downstream consumers
// can detect format drift. Matrices are row-major nested arrays; vectors are
// flat arrays.
//
// Model file ("kind" selects the constructor; "time_variation" is optional,
// default "TI", and may be set on any kind):
//   {"schema_version":1, "kind":"vertex-set", "n":2, "m":1,
//    "weights":"unit"|"identity"|"quadratic-outer", "d_theta":3,
//    "vertices":[ [[...],...], ... ]}
//   {"kind":"iid",                    "n","m", "second_moment":[[...]]}
//   {"kind":"deterministic-polytope", "n","m", "vertex_vectors":[[...],...]}
//   {"kind":"random-polytope",        "n","m", "cross_moments":[[M,...],...]
//                                      or "means" + "covariances"}
//   {"kind":"uncertain-mean-cov",     "n","m", "means":[...], "covariances":[...]}
//   {"kind":"mean-cov-polytope",      "n","m", "mean":[...],  "covariances":[...]}
// Raw vertex-set matrices are loaded as written — validate() reports
// asymmetry rather than the loader papering over it.
//
// Distribution file:
//   {"schema_version":1, "kind":"parametric-gaussian", "n","m","d_theta",
//    "covariance_law":"affine"|"independent-vertices",
//    "means":[...], "covariances":[...]}
//
// Gain file: {"schema_version":1, "K":[[...]]} (a bare nested array is also
// accepted).

namespace smp {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// ---- primitives ----------------------------------------------------------

Json mat_to_json(const Mat& M);
Json vec_to_json(const Vec& v);
// `what` names the field in error messages ("model.vertices[2]" etc).
Mat mat_from_json(const Json& j, const std::string& what);
Vec vec_from_json(const Json& j, const std::string& what);

// Throws std::runtime_error with the path and the parser's line/byte context.
Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// Full round-trip decimal formatting ("%.17g") for CSV cells.
std::string format_full(double x);

// ---- enum spellings (shared by JSON and CLI flags) ------------------------

CertificateFamily family_from_string(const std::string& s);  // "per-vertex" | "identical"
CovarianceLaw covariance_law_from_string(const std::string& s);
const char* to_string(CovarianceLaw law);
const char* to_string(TimeVariation tv);
const char* to_string(WeightKind k);

// ---- model ----------------------------------------------------------------

SmpVertexSet model_from_json(const Json& j);
Json model_to_json(const SmpVertexSet& s);  // always emitted as kind "vertex-set"
SmpVertexSet load_model(const std::string& path);
void save_model(const std::string& path, const SmpVertexSet& s);

// ---- sampling distribution -------------------------------------------------

ParametricGaussian distribution_from_json(const Json& j);
Json distribution_to_json(const ParametricGaussian& d);
ParametricGaussian load_distribution(const std::string& path);
void save_distribution(const std::string& path, const ParametricGaussian& d);

// ---- gain -------------------------------------------------------------------

Mat gain_from_json(const Json& j);
Json gain_to_json(const Mat& K);
Mat load_gain(const std::string& path);
void save_gain(const std::string& path, const Mat& K);

// ---- results ----------------------------------------------------------------

// K rides along: the certificate proves a property *of a gain*, and the
// struct itself does not carry it.
Json certificate_to_json(const GainCertificate& c, const Mat& K);
Json synthesis_to_json(const SynthesisResult& r);

// ---- run manifests ------------------------------------------------------------

// Enough to replay the run: command, inputs, resolved config, seed, outputs.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  Json config = Json::object();
  bool has_seed = false;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

Json manifest_to_json(const RunManifest& mf);  // adds tool_version
void write_manifest(const std::string& path, const RunManifest& mf);

}  // namespace smp

#endif
