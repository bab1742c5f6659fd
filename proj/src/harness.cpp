#include "monowrap/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "monowrap/json_io.hpp"
#include "monowrap/learners.hpp"
#include "monowrap/oracle.hpp"
#include "monowrap/wrapper.hpp"

namespace monowrap {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorKind::kInvalidConfig, where + ": " + what);
}

// Runs body(0..count-1) on up to `jobs` threads. Exceptions are collected per
// index and the lowest index is rethrown, as a serial loop would.
template <class Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body) {
  const auto workers = static_cast<std::size_t>(std::max(1u, jobs));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::uint64_t get_unsigned(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    bad(where, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<std::size_t> get_size_list(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) bad(where, "expected a non-empty array of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(get_unsigned(v[i], where + "/" + std::to_string(i)));
  }
  return out;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) bad(where + "/" + key, "unknown field");
  }
}

json read_json_file(const std::filesystem::path& path, const std::string& where) {
  std::ifstream in(path);
  if (!in) bad(where, "cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path.string());
}

GaussianSource parse_gaussian(const json& doc, int k) {
  const std::string where = "/source";
  if (!doc.is_object()) bad(where, "must be an object");
  reject_unknown_keys(doc, {"kind", "means", "priors", "sigma"}, where);
  if (doc.value("kind", "") != "gaussian") bad(where + "/kind", "only \"gaussian\" is supported");
  GaussianSource g;
  if (!doc.contains("means") || !doc["means"].is_array() ||
      doc["means"].size() != static_cast<std::size_t>(k)) {
    bad(where + "/means", "need one mean vector per label");
  }
  for (std::size_t y = 0; y < doc["means"].size(); ++y) {
    const auto& m = doc["means"][y];
    const std::string at = where + "/means/" + std::to_string(y);
    if (!m.is_array() || m.empty()) bad(at, "expected a non-empty array of numbers");
    std::vector<double> mean;
    for (const auto& c : m) {
      if (!c.is_number()) bad(at, "coordinates must be numbers");
      mean.push_back(c.get<double>());
    }
    if (!g.means.empty() && mean.size() != g.means.front().size()) bad(at, "dimension mismatch");
    g.means.push_back(std::move(mean));
  }
  g.dim = static_cast<int>(g.means.front().size());
  if (doc.contains("priors")) {
    const auto& p = doc["priors"];
    if (!p.is_array() || p.size() != static_cast<std::size_t>(k)) {
      bad(where + "/priors", "need one prior per label");
    }
    double total = 0.0;
    for (const auto& v : p) {
      if (!v.is_number() || v.get<double>() < 0.0) bad(where + "/priors", "priors must be non-negative");
      g.priors.push_back(v.get<double>());
      total += g.priors.back();
    }
    if (std::abs(total - 1.0) > 1e-12) bad(where + "/priors", "priors must sum to 1");
  } else {
    g.priors.assign(static_cast<std::size_t>(k), 1.0 / k);
  }
  g.sigma = doc.value("sigma", 1.0);
  if (!(g.sigma > 0.0)) bad(where + "/sigma", "must be positive");
  return g;
}

VerifySettings parse_verify(const json& doc, Mode mode) {
  const std::string where = "/verify";
  VerifySettings v;
  switch (mode) {
    case Mode::kVerifyLg: v.instances = 500; break;
    case Mode::kVerifyC1C2:
      v.instances = 200;
      v.n_values = {1, 2, 3};
      break;
    case Mode::kVerifyLemma1:
      v.instances = 200;
      v.n_values = {1, 2, 3, 4, 8, 16, 32, 64, 128};
      v.corner_n_values = {4, 64, 512};
      break;
    default: break;
  }
  if (doc.is_null()) return v;
  if (!doc.is_object()) bad(where, "must be an object");
  reject_unknown_keys(doc,
                      {"ks", "instances", "n_max", "n_values", "corner_n_values",
                       "max_domain", "range"},
                      where);
  if (doc.contains("ks")) {
    v.ks.clear();
    for (auto n : get_size_list(doc["ks"], where + "/ks")) {
      if (n < 2 || n > 64) bad(where + "/ks", "label counts must lie in [2, 64]");
      v.ks.push_back(static_cast<int>(n));
    }
  }
  if (doc.contains("instances")) v.instances = get_unsigned(doc["instances"], where + "/instances");
  if (doc.contains("n_max")) v.n_max = get_unsigned(doc["n_max"], where + "/n_max");
  if (doc.contains("n_values")) v.n_values = get_size_list(doc["n_values"], where + "/n_values");
  if (doc.contains("corner_n_values")) {
    v.corner_n_values = get_size_list(doc["corner_n_values"], where + "/corner_n_values");
  }
  for (auto n : v.n_values) {
    if (n == 0) bad(where + "/n_values", "sample sizes must be positive");
  }
  for (auto n : v.corner_n_values) {
    if (n == 0) bad(where + "/corner_n_values", "sample sizes must be positive");
  }
  if (doc.contains("max_domain")) {
    v.max_domain = get_unsigned(doc["max_domain"], where + "/max_domain");
    if (v.max_domain == 0) bad(where + "/max_domain", "must be positive");
  }
  if (doc.contains("range")) {
    const auto r = get_size_list(doc["range"], where + "/range");
    if (r.size() != 2 || r[0] < kMinScheduledSize || r[1] < r[0]) {
      bad(where + "/range", "expected [begin, end] with 9 <= begin <= end");
    }
    v.range_begin = r[0];
    v.range_end = r[1];
  }
  return v;
}

// ---------------------------------------------------------------------------

void tally(VerifyReport& report) {
  for (const auto& r : report.records) {
    if (r.error) {
      ++report.errors;
    } else if (!r.applicable) {
      ++report.not_applicable;
    } else {
      ++report.checked;
      if (r.vacuous) ++report.vacuous;
      if (!r.holds && !r.vacuous) ++report.failures;
    }
  }
}

CheckRecord budget_failure(std::string instance, std::size_t n, std::string bound,
                           const Error& err) {
  CheckRecord r;
  r.instance = std::move(instance);
  r.n = n;
  r.bound = std::move(bound);
  r.applicable = false;
  r.holds = false;
  r.error = err.what();
  return r;
}

// Evaluates tasks in parallel and concatenates their records in task order.
VerifyReport collect(Mode mode, std::vector<std::function<std::vector<CheckRecord>()>> tasks,
                     unsigned jobs) {
  std::vector<std::vector<CheckRecord>> parts(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) { parts[i] = tasks[i](); });
  VerifyReport report;
  report.mode = mode;
  for (auto& part : parts) {
    for (auto& r : part) report.records.push_back(std::move(r));
  }
  tally(report);
  return report;
}

json cells_json(const CellDistribution& c) {
  return json(std::vector<double>(c.probabilities().begin(), c.probabilities().end()));
}

VerifyReport verify_lg(const ExperimentConfig& config, unsigned jobs) {
  const auto& v = config.verify;
  const std::uint64_t budget = config.budget;
  std::vector<std::function<std::vector<CheckRecord>()>> tasks;
  for (int k : v.ks) {
    Rng rng = derive_stream(config.seed, {10, static_cast<std::uint64_t>(k)});
    const double alpha = static_cast<double>(k - 1) / k;
    for (std::size_t i = 0; i < v.instances; ++i) {
      const std::string id = "k" + std::to_string(k) + "-" + std::to_string(i);
      tasks.push_back([cells = random_cells(k, rng), id, alpha, n_max = v.n_max, budget] {
        std::vector<CheckRecord> out;
        CheckRecord base;
        base.instance = id + "/alpha";
        base.bound = "|LG_0 - (k-1)/k| <= 1e-12";
        base.quantities = {{"p", cells_json(cells)}};
        double previous = exact_lg(cells, 0, budget);
        base.lhs = std::abs(previous - alpha);
        base.rhs = 1e-12;
        base.holds = base.lhs <= base.rhs;
        out.push_back(base);
        for (std::size_t n = 0; n < n_max; ++n) {
          try {
            const double next = exact_lg(cells, n + 1, budget);
            CheckRecord r;
            r.instance = id + "/lg";
            r.n = n;
            r.bound = "LG_{n+1} <= LG_n";
            r.quantities = {{"lg_n", previous}, {"lg_next", next}};
            r.lhs = next;
            r.rhs = previous;
            r.holds = next <= previous + 1e-12;
            out.push_back(r);
            previous = next;
          } catch (const Error& err) {
            if (err.kind() != ErrorKind::kBudgetExceeded) throw;
            out.push_back(budget_failure(id + "/lg", n, "LG_{n+1} <= LG_n", err));
            break;
          }
        }
        return out;
      });
    }
  }
  auto report = collect(Mode::kVerifyLg, std::move(tasks), jobs);
  json per_k = json::object();
  for (int k : v.ks) {
    double worst = -1.0;
    const std::string prefix = "k" + std::to_string(k) + "-";
    for (const auto& r : report.records) {
      if (!r.error && r.bound == "LG_{n+1} <= LG_n" && r.instance.starts_with(prefix)) {
        worst = std::max(worst, r.lhs - r.rhs);
      }
    }
    per_k[std::to_string(k)] = {{"max_increase", worst}};
  }
  report.summary = {{"ks", v.ks}, {"instances_per_k", v.instances}, {"n_max", v.n_max},
                    {"per_k", per_k}};
  return report;
}

std::vector<HypothesisPairInstance> pair_instances(const ExperimentConfig& config,
                                                   std::uint64_t tag) {
  Rng rng = derive_stream(config.seed, {tag, static_cast<std::uint64_t>(config.k)});
  std::vector<HypothesisPairInstance> out;
  for (std::size_t i = 0; i < config.verify.instances; ++i) {
    auto inst = random_pair_instance(config.k, config.verify.max_domain, rng);
    inst.label = "random-" + std::to_string(i);
    out.push_back(std::move(inst));
  }
  for (auto& inst : corner_pair_instances(config.k)) out.push_back(std::move(inst));
  return out;
}

VerifyReport verify_c1c2(const ExperimentConfig& config, unsigned jobs) {
  const auto instances = pair_instances(config, 11);
  const WrapperParams params = WrapperParams::standard(config.k);
  const std::uint64_t budget = config.budget;
  std::vector<std::function<std::vector<CheckRecord>()>> tasks;
  for (const auto& inst : instances) {
    const auto joint = JointCellDistribution::from(inst.h0, inst.h1, inst.dist);
    for (std::size_t n : config.verify.n_values) {
      tasks.push_back([joint, label = inst.label, n, &params, budget] {
        std::vector<CheckRecord> out;
        try {
          const auto c1 = check_c1(joint, n, params, budget);
          CheckRecord r;
          r.instance = label + "/C1";
          r.n = n;
          r.bound = "p_N LR_N(h1) + (1-p_N) LR_N(h0) <= LR_n(h0), N = 4n";
          r.quantities = {{"N", 4 * n}, {"joint", std::vector<double>(joint.cells().begin(), joint.cells().end())}};
          r.lhs = c1.lhs;
          r.rhs = c1.rhs;
          r.holds = c1.holds;
          out.push_back(r);
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::kBudgetExceeded) throw;
          out.push_back(budget_failure(label + "/C1", n, "C1", err));
        }
        try {
          const auto c2 = check_c2(joint, n, params, budget);
          CheckRecord r;
          r.instance = label + "/C2";
          r.n = n;
          r.bound = "p_n LR_n(h1) + (1-p_n) LR_n(h0) <= Err(h1) + 2 eta_n + 3 eps_n";
          r.quantities = {{"err_h1", joint.candidate_cells().q(0)},
                          {"cost", params.competitive_cost(n)}};
          r.lhs = c2.lhs;
          r.rhs = c2.rhs;
          r.holds = c2.holds;
          r.vacuous = c2.vacuous;
          out.push_back(r);
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::kBudgetExceeded) throw;
          out.push_back(budget_failure(label + "/C2", n, "C2", err));
        }
        return out;
      });
    }
  }
  auto report = collect(Mode::kVerifyC1C2, std::move(tasks), jobs);
  report.summary = {{"k", config.k},
                    {"random_instances", config.verify.instances},
                    {"corner_instances", instances.size() - config.verify.instances},
                    {"n_values", config.verify.n_values}};
  return report;
}

VerifyReport verify_lemma1(const ExperimentConfig& config, unsigned jobs) {
  const auto instances = pair_instances(config, 12);
  const WrapperParams params = WrapperParams::standard(config.k);
  const std::uint64_t budget = config.budget;
  std::vector<std::function<std::vector<CheckRecord>()>> tasks;
  for (std::size_t idx = 0; idx < instances.size(); ++idx) {
    const auto& inst = instances[idx];
    const bool corner = idx >= config.verify.instances;
    std::vector<std::size_t> ns = config.verify.n_values;
    if (corner) {
      ns.insert(ns.end(), config.verify.corner_n_values.begin(),
                config.verify.corner_n_values.end());
      std::sort(ns.begin(), ns.end());
      ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    }
    const auto joint = JointCellDistribution::from(inst.h0, inst.h1, inst.dist);
    for (std::size_t n : ns) {
      tasks.push_back([joint, label = inst.label, n, &params, budget] {
        std::vector<CheckRecord> out;
        try {
          const auto rep = lemma1_bound_check(joint, n, params, budget);
          const json q = {{"p_n", rep.update_prob},
                          {"lr_h0", rep.lr_current},
                          {"lr_h1", rep.lr_candidate},
                          {"eps_n", params.epsilon(n)}};
          if (rep.upper_applicable) {
            CheckRecord r;
            r.instance = label + "/upper";
            r.n = n;
            r.bound = "p_n <= 1/(2 sqrt n)";
            r.quantities = q;
            r.lhs = rep.update_prob;
            r.rhs = rep.upper_bound;
            r.holds = rep.upper_holds;
            out.push_back(r);
          }
          if (rep.lower_applicable) {
            CheckRecord r;
            r.instance = label + "/lower";
            r.n = n;
            r.bound = "p_n >= 1 - 4 exp(-n u_n^2 / 2)";
            r.quantities = q;
            r.lhs = rep.lower_bound;
            r.rhs = rep.update_prob;
            r.holds = rep.lower_holds;
            out.push_back(r);
          }
          if (!rep.applicable()) {
            CheckRecord r;
            r.instance = label + "/none";
            r.n = n;
            r.bound = "not applicable";
            r.quantities = q;
            r.lhs = rep.update_prob;
            r.applicable = false;
            out.push_back(r);
          }
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::kBudgetExceeded) throw;
          out.push_back(budget_failure(label, n, "update bounds", err));
        }
        return out;
      });
    }
  }
  auto report = collect(Mode::kVerifyLemma1, std::move(tasks), jobs);
  std::size_t upper = 0, lower = 0;
  for (const auto& r : report.records) {
    if (r.error || !r.applicable) continue;
    if (r.instance.ends_with("/upper")) ++upper;
    if (r.instance.ends_with("/lower")) ++lower;
  }
  report.summary = {{"k", config.k},
                    {"upper_bound_checks", upper},
                    {"lower_bound_checks", lower},
                    {"lower_bound", lower == 0 ? "vacuous" : "checked"},
                    {"n_values", config.verify.n_values},
                    {"corner_n_values", config.verify.corner_n_values}};
  return report;
}

}  // namespace

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::kCurve: return "curve";
    case Mode::kVerifyLg: return "verify-lg";
    case Mode::kVerifyC1C2: return "verify-c1c2";
    case Mode::kVerifyLemma1: return "verify-lemma1";
    case Mode::kScheduleAudit: return "schedule-audit";
  }
  return "?";
}

std::optional<Mode> parse_mode(const std::string& text) {
  for (Mode m : {Mode::kCurve, Mode::kVerifyLg, Mode::kVerifyC1C2, Mode::kVerifyLemma1,
                 Mode::kScheduleAudit}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

Example GaussianSource::draw(Rng& rng) const {
  const double u = uniform01(rng);
  Label y = static_cast<Label>(priors.size()) - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    acc += priors[i];
    if (u < acc) {
      y = static_cast<Label>(i);
      break;
    }
  }
  EuclideanPoint x;
  x.coords.resize(static_cast<std::size_t>(dim));
  for (std::size_t c = 0; c < x.coords.size(); ++c) {
    // Box-Muller, cosine branch only.
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    x.coords[c] = means[static_cast<std::size_t>(y)][c] + sigma * z;
  }
  return {std::move(x), y};
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& err) {
    fail(ErrorKind::kInvalidConfig, origin + ": " + err.what());
  }
}

std::shared_ptr<const Learner> make_learner(const json& spec, int k,
                                            const DiscreteDistribution* dist,
                                            const std::string& where) {
  if (!spec.is_object()) bad(where, "learner spec must be an object");
  if (!spec.contains("kind") || !spec["kind"].is_string()) bad(where + "/kind", "missing kind");
  const auto kind = spec["kind"].get<std::string>();
  try {
    if (kind == "constant") {
      reject_unknown_keys(spec, {"kind", "label"}, where);
      const json label = spec.value("label", json(0));
      if (!label.is_number_integer()) bad(where + "/label", "expected an integer");
      return std::make_shared<ConstantLearner>(label.get<int>(), k);
    }
    if (kind == "finite_erm") {
      reject_unknown_keys(spec, {"kind", "class", "all_tables"}, where);
      if (dist == nullptr || dist->domain().size() == 0) {
        bad(where, "finite_erm needs a distribution over named points");
      }
      const bool all = spec.value("all_tables", false);
      if (all == spec.contains("class")) {
        bad(where, "give exactly one of \"class\" or \"all_tables\": true");
      }
      if (all) return std::make_shared<FiniteErmLearner>(FiniteErmLearner::all_tables(dist->domain().size(), k));
      const auto& cls = spec["class"];
      if (!cls.is_array() || cls.empty()) bad(where + "/class", "expected a non-empty array");
      std::vector<Hypothesis> hs;
      for (std::size_t i = 0; i < cls.size(); ++i) {
        try {
          hs.push_back(hypothesis_from_json(cls[i], dist->domain(), k));
        } catch (const Error& err) {
          bad(where + "/class/" + std::to_string(i), err.what());
        }
      }
      return std::make_shared<FiniteErmLearner>(std::move(hs));
    }
    if (kind == "knn") {
      reject_unknown_keys(spec, {"kind", "neighbors"}, where);
      const json nb = spec.value("neighbors", json(1));
      if (!nb.is_number_integer()) bad(where + "/neighbors", "expected an integer");
      return std::make_shared<KnnLearner>(nb.get<int>(), k);
    }
    if (kind == "sabotaged") {
      reject_unknown_keys(spec, {"kind", "inner"}, where);
      if (!spec.contains("inner")) bad(where + "/inner", "missing inner learner");
      return std::make_shared<SabotagedLearner>(make_learner(spec["inner"], k, dist, where + "/inner"));
    }
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::kInvalidConfig && std::string(err.what()).starts_with(where)) throw;
    bad(where, err.what());
  }
  bad(where + "/kind", "unknown learner kind '" + kind + "'");
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir,
                              std::optional<std::uint64_t> seed_override) {
  if (!doc.is_object()) bad("/", "config must be a JSON object");
  reject_unknown_keys(doc,
                      {"mode", "k", "distribution", "source", "learner", "sizes", "trials",
                       "seed", "eval_size", "budget", "verify"},
                      "");
  ExperimentConfig c;
  if (!doc.contains("mode") || !doc["mode"].is_string()) bad("/mode", "missing mode");
  const auto mode = parse_mode(doc["mode"].get<std::string>());
  if (!mode) {
    bad("/mode", "expected one of curve, verify-lg, verify-c1c2, verify-lemma1, schedule-audit");
  }
  c.mode = *mode;

  if (seed_override) {
    c.seed = *seed_override;
  } else if (doc.contains("seed")) {
    c.seed = get_unsigned(doc["seed"], "/seed");
  } else {
    bad("/seed", "a seed is mandatory");
  }

  if (doc.contains("distribution")) {
    json dist_doc = doc["distribution"];
    if (dist_doc.is_string()) {
      std::filesystem::path path = dist_doc.get<std::string>();
      if (path.is_relative()) path = base_dir / path;
      dist_doc = read_json_file(path, "/distribution");
    }
    try {
      c.distribution = std::make_shared<DiscreteDistribution>(distribution_from_json(dist_doc));
    } catch (const Error& err) {
      bad("/distribution", err.what());
    }
  }

  if (doc.contains("k")) {
    const auto k = get_unsigned(doc["k"], "/k");
    if (k < 2 || k > 1024) bad("/k", "label count must lie in [2, 1024]");
    c.k = static_cast<int>(k);
    if (c.distribution && c.distribution->num_labels() != c.k) {
      bad("/k", "disagrees with the distribution's k");
    }
  } else if (c.distribution) {
    c.k = c.distribution->num_labels();
  }

  if (doc.contains("source")) c.gaussian = parse_gaussian(doc["source"], c.k);
  if (doc.contains("budget")) {
    c.budget = get_unsigned(doc["budget"], "/budget");
    if (c.budget == 0) bad("/budget", "must be positive");
  } else {
    c.budget = default_budget();
  }

  if (c.mode == Mode::kCurve) {
    if (static_cast<bool>(c.distribution) == c.gaussian.has_value()) {
      bad("/", "curve mode needs exactly one of \"distribution\" or \"source\"");
    }
    if (!doc.contains("learner")) bad("/learner", "missing learner");
    c.learner = doc["learner"];
    make_learner(c.learner, c.k, c.distribution.get(), "/learner");

    if (!doc.contains("sizes")) bad("/sizes", "missing sizes");
    for (auto m : get_size_list(doc["sizes"], "/sizes")) c.sizes.push_back(m);
    for (std::size_t i = 1; i < c.sizes.size(); ++i) {
      if (c.sizes[i] <= c.sizes[i - 1]) bad("/sizes", "sizes must be strictly increasing");
    }
    c.trials = doc.contains("trials") ? get_unsigned(doc["trials"], "/trials") : 1;
    if (c.trials == 0) bad("/trials", "need at least one trial");
    if (doc.contains("eval_size")) {
      c.eval_size = get_unsigned(doc["eval_size"], "/eval_size");
      if (c.eval_size == 0) bad("/eval_size", "must be positive");
    }
  }
  c.verify = parse_verify(doc.contains("verify") ? doc["verify"] : json(), c.mode);
  return c;
}

CurveResult run_curve(const ExperimentConfig& config, unsigned jobs) {
  if (config.mode != Mode::kCurve) fail(ErrorKind::kInvalidConfig, "/mode: not a curve config");
  const auto learner = make_learner(config.learner, config.k, config.distribution.get());
  const WrapperParams params = WrapperParams::standard(config.k);
  const auto* dist = config.distribution.get();
  const std::size_t sizes = config.sizes.size();
  const std::uint64_t largest = config.sizes.back();

  Sample holdout;
  if (!dist) {
    Rng rng = derive_stream(config.seed, {2});
    holdout.reserve(config.eval_size);
    for (std::size_t i = 0; i < config.eval_size; ++i) holdout.push_back(config.gaussian->draw(rng));
  }
  auto loss = [&](const Hypothesis& h) {
    if (dist) return population_loss(h, *dist);
    return static_cast<double>(boost::rational_cast<long double>(empirical_loss(h, holdout)));
  };

  // losses[trial][2 * size_index + wrapped]
  std::vector<std::vector<double>> losses(config.trials, std::vector<double>(2 * sizes));
  parallel_for(config.trials, jobs, [&](std::size_t trial) {
    Rng sample_rng = derive_stream(config.seed, {trial, 0});
    Sample sample;
    sample.reserve(largest);
    for (std::uint64_t i = 0; i < largest; ++i) {
      sample.push_back(dist ? dist->draw(sample_rng) : config.gaussian->draw(sample_rng));
    }
    for (std::size_t s = 0; s < sizes; ++s) {
      const SampleView view = SampleView(sample).first(config.sizes[s]);
      Rng coins = derive_stream(config.seed, {trial, 1});
      losses[trial][2 * s] = loss(learner->train(view));
      losses[trial][2 * s + 1] = loss(monotonize(*learner, view, params, coins).hypothesis);
    }
  });

  CurveResult result;
  result.evaluation = dist ? "exact" : "holdout";
  result.seed = config.seed;
  result.learner = learner->name();
  result.k = config.k;
  const auto trials = static_cast<double>(config.trials);
  for (std::size_t s = 0; s < sizes; ++s) {
    for (int wrapped = 0; wrapped < 2; ++wrapped) {
      double sum = 0.0;
      for (const auto& row : losses) sum += row[2 * s + wrapped];
      const double mean = sum / trials;
      double ss = 0.0;
      for (const auto& row : losses) {
        const double d = row[2 * s + wrapped] - mean;
        ss += d * d;
      }
      const double se = config.trials > 1 ? std::sqrt(ss / (trials - 1.0) / trials) : 0.0;
      result.points.push_back(
          {config.sizes[s], wrapped ? "wrapped" : "base", mean, se, config.trials});
    }
  }
  return result;
}

std::string curve_to_csv(const CurveResult& result) {
  std::string out = "# evaluation: " + result.evaluation + "\n";
  out += "m,algo,mean_loss,stderr,trials,seed\n";
  for (const auto& p : result.points) {
    out += std::to_string(p.m) + "," + p.algo + "," + format_number(p.mean_loss) + "," +
           format_number(p.stderr_loss) + "," + std::to_string(p.trials) + "," +
           std::to_string(result.seed) + "\n";
  }
  return out;
}

json curve_to_json(const CurveResult& result) {
  json points = json::array();
  for (const auto& p : result.points) {
    points.push_back({{"m", p.m},
                      {"algo", p.algo},
                      {"mean_loss", p.mean_loss},
                      {"stderr", p.stderr_loss},
                      {"trials", p.trials},
                      {"seed", result.seed}});
  }
  return {{"metadata",
           {{"evaluation", result.evaluation},
            {"seed", result.seed},
            {"learner", result.learner},
            {"k", result.k}}},
          {"points", points}};
}

VerifyReport schedule_audit(std::uint64_t begin, std::uint64_t end) {
  if (begin < kMinScheduledSize || end < begin) {
    fail(ErrorKind::kInvalidArgument, "audit range must satisfy 9 <= begin <= end");
  }
  VerifyReport report;
  report.mode = Mode::kScheduleAudit;
  double worst_last = 1e300;
  double worst_prefix = 1e300;
  for (std::uint64_t m = begin; m <= end; ++m) {
    const Schedule s = *block_schedule(m);
    const unsigned closed = closed_form_stage_count(m);
    const std::uint64_t last = s.block_sizes[s.stages - 1];
    const std::uint64_t prefix = s.prefix_size(s.stages - 2);
    worst_last = std::min(worst_last, static_cast<double>(last) / static_cast<double>(m));
    worst_prefix = std::min(worst_prefix, static_cast<double>(prefix) / static_cast<double>(m));
    report.checked += 3;

    auto violation = [&](const std::string& what, double lhs, double rhs) {
      CheckRecord r;
      r.instance = "m=" + std::to_string(m) + "/" + what;
      r.n = m;
      r.bound = what;
      r.lhs = lhs;
      r.rhs = rhs;
      r.holds = false;
      report.records.push_back(r);
      ++report.failures;
    };
    if (closed != s.stages) violation("closed-form T", closed, s.stages);
    // b(T-1) >= m/10 and sum_{t<=T-2} b(t) >= m/30 - 1, in integers.
    if (10 * last < m) violation("b(T-1) >= m/10", m / 10.0, static_cast<double>(last));
    if (30 * prefix + 30 < m) {
      violation("sum b(t), t <= T-2, >= m/30 - 1", m / 30.0 - 1.0, static_cast<double>(prefix));
    }
  }
  report.summary = {{"begin", begin},
                    {"end", end},
                    {"sizes", end - begin + 1},
                    {"min_last_block_ratio", worst_last},
                    {"min_prefix_ratio", worst_prefix}};
  return report;
}

VerifyReport run_verify(const ExperimentConfig& config, unsigned jobs) {
  switch (config.mode) {
    case Mode::kVerifyLg: return verify_lg(config, jobs);
    case Mode::kVerifyC1C2: return verify_c1c2(config, jobs);
    case Mode::kVerifyLemma1: return verify_lemma1(config, jobs);
    case Mode::kScheduleAudit:
      return schedule_audit(config.verify.range_begin, config.verify.range_end);
    case Mode::kCurve: break;
  }
  fail(ErrorKind::kInvalidConfig, "/mode: curve configs are not verification sweeps");
}

std::string verify_to_csv(const VerifyReport& report) {
  std::string out = std::string("# mode: ") + to_string(report.mode) +
                    " checked=" + std::to_string(report.checked) +
                    " failures=" + std::to_string(report.failures) +
                    " vacuous=" + std::to_string(report.vacuous) +
                    " not_applicable=" + std::to_string(report.not_applicable) +
                    " errors=" + std::to_string(report.errors) + "\n";
  out += "instance_id,n,lhs,rhs,slack\n";
  for (const auto& r : report.records) {
    if (r.error || !r.applicable) continue;
    out += r.instance + "," + std::to_string(r.n) + "," + format_number(r.lhs) + "," +
           format_number(r.rhs) + "," + format_number(r.slack()) + "\n";
  }
  return out;
}

json verify_to_json(const VerifyReport& report) {
  json reports = json::array();
  for (const auto& r : report.records) {
    json q = r.quantities;
    json entry = {{"instance", r.instance}, {"n", r.n}, {"bound", r.bound}};
    if (r.error) {
      entry["error"] = *r.error;
    } else {
      q["lhs"] = r.lhs;
      if (r.applicable) {
        q["rhs"] = r.rhs;
        entry["holds"] = r.holds;
        entry["slack"] = r.slack();
        entry["vacuous"] = r.vacuous;
      } else {
        entry["applicable"] = false;
      }
    }
    entry["quantities"] = q;
    reports.push_back(std::move(entry));
  }
  json summary = report.summary;
  summary["mode"] = to_string(report.mode);
  summary["checked"] = report.checked;
  summary["failures"] = report.failures;
  summary["vacuous"] = report.vacuous;
  summary["not_applicable"] = report.not_applicable;
  summary["errors"] = report.errors;
  summary["passed"] = report.passed();
  return {{"summary", summary}, {"reports", reports}};
}

}  // namespace monowrap
