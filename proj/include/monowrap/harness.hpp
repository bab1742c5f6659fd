#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "monowrap/core.hpp"

namespace monowrap {

enum class Mode { kCurve, kVerifyLg, kVerifyC1C2, kVerifyLemma1, kScheduleAudit };

const char* to_string(Mode mode);
std::optional<Mode> parse_mode(const std::string& text);

// Class-conditional isotropic Gaussians in R^dim: y ~ priors, x ~ N(means[y], sigma^2 I).
struct GaussianSource {
  int dim = 1;
  std::vector<double> priors;
  std::vector<std::vector<double>> means;
  double sigma = 1.0;

  Example draw(Rng& rng) const;
};

struct VerifySettings {
  std::vector<int> ks = {2, 3, 5};          // verify-lg
  std::size_t instances = 0;                // 0: per-mode default
  std::size_t n_max = 10;                   // verify-lg
  std::vector<std::size_t> n_values;        // verify-c1c2 / verify-lemma1
  std::vector<std::size_t> corner_n_values; // verify-lemma1
  std::size_t max_domain = 3;
  std::uint64_t range_begin = 9;            // schedule-audit
  std::uint64_t range_end = 1000000;
};

struct ExperimentConfig {
  Mode mode = Mode::kCurve;
  int k = 2;
  std::shared_ptr<const DiscreteDistribution> distribution;
  std::optional<GaussianSource> gaussian;
  nlohmann::json learner;  // validated by make_learner
  std::vector<std::uint64_t> sizes;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t eval_size = 100000;
  std::uint64_t budget = 0;  // 0: default_budget()
  VerifySettings verify;
};

// Validates a parsed config document. Relative distribution paths resolve
// against base_dir. seed_override replaces (or supplies) the seed; a config
// with neither is rejected. Errors are kInvalidConfig naming the field.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir,
                              std::optional<std::uint64_t> seed_override = std::nullopt);

// Parses JSON text; syntax errors carry line and column.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);

// Learner specs:
//   {"kind": "constant", "label": 0}
//   {"kind": "finite_erm", "class": [{"x0": 0, ...}, ...]}
//   {"kind": "finite_erm", "all_tables": true}
//   {"kind": "knn", "neighbors": 3}
//   {"kind": "sabotaged", "inner": {...}}
// Tables are keyed by the point names of dist, which finite_erm requires.
std::shared_ptr<const Learner> make_learner(const nlohmann::json& spec, int k,
                                            const DiscreteDistribution* dist,
                                            const std::string& where = "learner");

struct CurvePoint {
  std::uint64_t m = 0;
  std::string algo;  // "base" or "wrapped"
  double mean_loss = 0.0;
  double stderr_loss = 0.0;  // sample standard deviation / sqrt(trials)
  std::size_t trials = 0;
};

struct CurveResult {
  std::string evaluation;  // "exact" or "holdout"
  std::uint64_t seed = 0;
  std::string learner;
  int k = 2;
  std::vector<CurvePoint> points;  // ordered by m, then base before wrapped
};

// Trial i draws one sample of the largest size from stream (seed, i, 0) and
// every size uses its prefix; the wrapper's coins come from a fresh copy of
// stream (seed, i, 1) at every size. Results do not depend on jobs.
CurveResult run_curve(const ExperimentConfig& config, unsigned jobs = 1);
std::string curve_to_csv(const CurveResult& result);
nlohmann::json curve_to_json(const CurveResult& result);

struct CheckRecord {
  std::string instance;
  std::size_t n = 0;
  std::string bound;
  nlohmann::json quantities = nlohmann::json::object();
  double lhs = 0.0;
  double rhs = 0.0;
  bool applicable = true;
  bool vacuous = false;
  bool holds = true;
  std::optional<std::string> error;  // e.g. enumeration budget exceeded

  double slack() const { return rhs - lhs; }
};

struct VerifyReport {
  Mode mode = Mode::kVerifyLg;
  std::vector<CheckRecord> records;
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::size_t vacuous = 0;
  std::size_t not_applicable = 0;
  std::size_t errors = 0;
  nlohmann::json summary = nlohmann::json::object();

  bool passed() const { return failures == 0; }
};

// Dispatches verify-lg, verify-c1c2, verify-lemma1 and schedule-audit.
VerifyReport run_verify(const ExperimentConfig& config, unsigned jobs = 1);
VerifyReport schedule_audit(std::uint64_t begin, std::uint64_t end);

// CSV rows instance_id,n,lhs,rhs,slack for applicable, error-free records.
std::string verify_to_csv(const VerifyReport& report);
nlohmann::json verify_to_json(const VerifyReport& report);

}  // namespace monowrap
