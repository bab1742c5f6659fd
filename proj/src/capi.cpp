#include "monowrap/monowrap.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "monowrap/harness.hpp"
#include "monowrap/json_io.hpp"
#include "monowrap/oracle.hpp"
#include "monowrap/wrapper.hpp"

struct mw_distribution {
  monowrap::DiscreteDistribution dist;
};
struct mw_learner {
  std::shared_ptr<const monowrap::Learner> learner;
};
struct mw_sample {
  monowrap::Sample sample;
};
struct mw_hypothesis {
  monowrap::Hypothesis h;
};

namespace {

thread_local std::string last_error;

mw_status status_of(monowrap::ErrorKind kind) {
  using monowrap::ErrorKind;
  switch (kind) {
    case ErrorKind::kInvalidArgument: return MW_INVALID_ARGUMENT;
    case ErrorKind::kDomainMismatch: return MW_DOMAIN_MISMATCH;
    case ErrorKind::kEmptySample: return MW_EMPTY_SAMPLE;
    case ErrorKind::kInvalidArity: return MW_INVALID_ARITY;
    case ErrorKind::kInvalidConfig: return MW_INVALID_CONFIG;
    case ErrorKind::kBudgetExceeded: return MW_BUDGET_EXCEEDED;
    case ErrorKind::kLearnerFailure: return MW_LEARNER_FAILURE;
  }
  return MW_INTERNAL_ERROR;
}

template <class Body>
mw_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return MW_OK;
  } catch (const monowrap::Error& err) {
    last_error = err.what();
    return status_of(err.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return MW_INTERNAL_ERROR;
  } catch (const std::exception& err) {
    last_error = err.what();
    return MW_INTERNAL_ERROR;
  }
}

void require(bool ok, const char* what) {
  if (!ok) monowrap::fail(monowrap::ErrorKind::kInvalidArgument, what);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* mw_last_error(void) { return last_error.c_str(); }

const char* mw_status_name(mw_status status) {
  switch (status) {
    case MW_OK: return "ok";
    case MW_INVALID_ARGUMENT: return "invalid argument";
    case MW_DOMAIN_MISMATCH: return "domain mismatch";
    case MW_EMPTY_SAMPLE: return "empty sample";
    case MW_INVALID_ARITY: return "invalid arity";
    case MW_INVALID_CONFIG: return "invalid config";
    case MW_BUDGET_EXCEEDED: return "budget exceeded";
    case MW_LEARNER_FAILURE: return "learner failure";
    case MW_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

void mw_string_free(char* s) { std::free(s); }

mw_status mw_distribution_from_json(const char* json, mw_distribution** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    const auto doc = monowrap::parse_json_text(json, "distribution");
    *out = new mw_distribution{monowrap::distribution_from_json(doc)};
  });
}

int mw_distribution_num_labels(const mw_distribution* dist) {
  return dist == nullptr ? 0 : dist->dist.num_labels();
}

void mw_distribution_free(mw_distribution* dist) { delete dist; }

mw_status mw_learner_from_json(const char* spec, int num_labels, const mw_distribution* dist,
                               mw_learner** out) {
  return guarded([&] {
    require(spec != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    const auto doc = monowrap::parse_json_text(spec, "learner");
    auto learner = monowrap::make_learner(doc, num_labels, dist ? &dist->dist : nullptr);
    *out = new mw_learner{std::move(learner)};
  });
}

void mw_learner_free(mw_learner* learner) { delete learner; }

mw_status mw_sample_draw(const mw_distribution* dist, size_t n, uint64_t seed,
                         mw_sample** out) {
  return guarded([&] {
    require(dist != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    monowrap::Rng rng = monowrap::derive_stream(seed, {0});
    *out = new mw_sample{monowrap::sample_iid(dist->dist, n, rng)};
  });
}

size_t mw_sample_size(const mw_sample* sample) {
  return sample == nullptr ? 0 : sample->sample.size();
}

void mw_sample_free(mw_sample* sample) { delete sample; }

mw_status mw_learner_train(const mw_learner* learner, const mw_sample* sample,
                           mw_hypothesis** out) {
  return guarded([&] {
    require(learner != nullptr && sample != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new mw_hypothesis{learner->learner->train(sample->sample)};
  });
}

mw_status mw_monotonize(const mw_learner* learner, const mw_sample* sample,
                        uint64_t coin_seed, mw_hypothesis** out, char** trace_jsonl) {
  return guarded([&] {
    require(learner != nullptr && sample != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    if (trace_jsonl != nullptr) *trace_jsonl = nullptr;
    const auto params = monowrap::WrapperParams::standard(learner->learner->num_labels());
    monowrap::Rng coins = monowrap::derive_stream(coin_seed, {1});
    auto result = monowrap::monotonize(*learner->learner, sample->sample, params, coins);
    char* trace = trace_jsonl != nullptr ? copy_string(result.trace.to_jsonl()) : nullptr;
    *out = new mw_hypothesis{std::move(result.hypothesis)};
    if (trace_jsonl != nullptr) *trace_jsonl = trace;
  });
}

mw_status mw_population_loss(const mw_hypothesis* h, const mw_distribution* dist,
                             double* out) {
  return guarded([&] {
    require(h != nullptr && dist != nullptr && out != nullptr, "null argument");
    *out = monowrap::population_loss(h->h, dist->dist);
  });
}

mw_status mw_hypothesis_describe(const mw_hypothesis* h, char** out) {
  return guarded([&] {
    require(h != nullptr && out != nullptr, "null argument");
    *out = copy_string(h->h.describe());
  });
}

void mw_hypothesis_free(mw_hypothesis* h) { delete h; }

mw_status mw_expected_loss(const mw_learner* learner, const mw_distribution* dist,
                           uint64_t m, int wrapped, double* out) {
  return guarded([&] {
    require(learner != nullptr && dist != nullptr && out != nullptr, "null argument");
    if (wrapped) {
      const auto params = monowrap::WrapperParams::standard(learner->learner->num_labels());
      *out = monowrap::monotonize_mixture(*learner->learner, dist->dist, m, params);
    } else {
      *out = monowrap::exact_learner_loss(*learner->learner, dist->dist, m);
    }
  });
}

mw_status mw_exact_lg(const double* p, int k, size_t n, double* out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr && k >= 0, "null argument");
    *out = monowrap::exact_lg(monowrap::CellDistribution({p, p + k}), n);
  });
}

mw_status mw_exact_lr(const double* p, int k, size_t n, double* out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr && k >= 0, "null argument");
    const monowrap::CellDistribution cells({p, p + k});
    *out = monowrap::exact_lr(cells, n, monowrap::WrapperParams::standard(cells.k()));
  });
}

mw_status mw_block_schedule(uint64_t m, unsigned* stages, uint64_t* discarded,
                            uint64_t* sizes, size_t capacity, size_t* count) {
  return guarded([&] {
    require(stages != nullptr && discarded != nullptr && count != nullptr, "null argument");
    const auto s = monowrap::block_schedule(m);
    if (!s) monowrap::fail(monowrap::ErrorKind::kInvalidArgument, "schedules need m >= 9");
    *stages = s->stages;
    *discarded = s->discarded;
    *count = s->block_sizes.size();
    if (sizes != nullptr) {
      for (size_t i = 0; i < s->block_sizes.size() && i < capacity; ++i) sizes[i] = s->block_sizes[i];
    }
  });
}

mw_status mw_run_config(const char* config_json, const char* config_dir,
                        const char* expected_kind, const mw_run_options* options,
                        char** output, int* passed) {
  return guarded([&] {
    require(config_json != nullptr && output != nullptr && passed != nullptr, "null argument");
    *output = nullptr;
    *passed = 0;
    const mw_run_options defaults{0, 0, 1, 0};
    const mw_run_options& opt = options != nullptr ? *options : defaults;
    const unsigned jobs = opt.jobs == 0 ? 1 : opt.jobs;
    const std::string kind = expected_kind != nullptr ? expected_kind : "";

    auto doc = monowrap::parse_json_text(config_json, "config");
    if (doc.is_object() && !doc.contains("mode") &&
        (kind == "curve" || kind == "schedule-audit")) {
      doc["mode"] = kind;
    }
    const auto config = monowrap::parse_config(
        doc, config_dir != nullptr ? config_dir : ".",
        opt.has_seed ? std::optional<uint64_t>(opt.seed) : std::nullopt);

    const bool is_curve = config.mode == monowrap::Mode::kCurve;
    const bool is_audit = config.mode == monowrap::Mode::kScheduleAudit;
    const bool fits = kind.empty() || (kind == "curve" && is_curve) ||
                      (kind == "verify" && !is_curve) ||
                      (kind == "schedule-audit" && is_audit);
    if (!fits) {
      monowrap::fail(monowrap::ErrorKind::kInvalidConfig,
                     std::string("/mode: '") + monowrap::to_string(config.mode) +
                         "' cannot run under '" + kind + "'");
    }

    std::string text;
    if (is_curve) {
      const auto result = monowrap::run_curve(config, jobs);
      text = opt.json ? monowrap::curve_to_json(result).dump(2) + "\n"
                      : monowrap::curve_to_csv(result);
      *passed = 1;
    } else {
      const auto report = monowrap::run_verify(config, jobs);
      text = opt.json ? monowrap::verify_to_json(report).dump(2) + "\n"
                      : monowrap::verify_to_csv(report);
      *passed = report.passed() ? 1 : 0;
    }
    *output = copy_string(text);
  });
}

mw_status mw_schedule_audit(uint64_t begin, uint64_t end, int json, char** output,
                            int* passed) {
  return guarded([&] {
    require(output != nullptr && passed != nullptr, "null argument");
    *output = nullptr;
    const auto report = monowrap::schedule_audit(begin, end);
    *output = copy_string(json ? monowrap::verify_to_json(report).dump(2) + "\n"
                               : monowrap::verify_to_csv(report));
    *passed = report.passed() ? 1 : 0;
  });
}

}  // extern "C"
