#include "monowrap/wrapper.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace monowrap {

WrapperParams WrapperParams::standard(int k) {
  if (k < 2) fail(ErrorKind::kInvalidArity, "wrapper needs k >= 2");
  WrapperParams p;
  p.num_labels = k;
  p.rate_constant = k == 2 ? 1.0 : 36.0;
  return p;
}

double WrapperParams::eta(std::size_t n) const {
  if (eta_override) return eta_override(n);
  return 1.0 / (2.0 * std::sqrt(static_cast<double>(n)));
}

double WrapperParams::uniform_rate(std::size_t n) const {
  return rate_constant / std::sqrt(static_cast<double>(n));
}

double WrapperParams::epsilon(std::size_t n) const {
  if (epsilon_override) return epsilon_override(n);
  const auto x = static_cast<double>(n);
  return std::sqrt(std::log(64.0 * x) / x) + 2.0 * uniform_rate(n);
}

double WrapperParams::competitive_cost(std::size_t n) const {
  return 2.0 * eta(n) + 3.0 * epsilon(n);
}

double WrapperParams::alpha() const {
  return static_cast<double>(num_labels - 1) / static_cast<double>(num_labels);
}

std::uint64_t Schedule::block_begin(unsigned t) const {
  std::uint64_t offset = 0;
  for (unsigned i = 0; i < t && i < block_sizes.size(); ++i) offset += block_sizes[i];
  return offset;
}

std::optional<Schedule> block_schedule(std::uint64_t m) {
  if (m < kMinScheduledSize) return std::nullopt;
  // Required length for T stages: b(T-1) + sum_{t<T} b(t).
  auto required = [](unsigned stages) {
    std::uint64_t sum = 0;
    for (unsigned t = 0; t < stages; ++t) sum += block_size(t);
    return block_size(stages - 1) + sum;
  };
  unsigned stages = 2;
  while (stages < 31 && required(stages + 1) <= m) ++stages;

  Schedule s;
  s.m = m;
  s.stages = stages;
  for (unsigned t = 0; t < stages; ++t) s.block_sizes.push_back(block_size(t));
  s.block_sizes.push_back(block_size(stages - 1));
  s.discarded = m - required(stages);
  return s;
}

unsigned closed_form_stage_count(std::uint64_t m) {
  // floor(log4(x)) of x = (3m + 1) / 7 equals the largest j with 7 * 4^j <= 3m + 1.
  const std::uint64_t numerator = 3 * m + 1;
  unsigned j = 0;
  while (7 * block_size(j + 1) <= numerator) ++j;
  return 1 + j;
}

std::string RunTrace::to_jsonl() const {
  std::string out;
  for (const auto& s : stages) {
    nlohmann::json line = {
        {"t", s.t},
        {"update_taken", s.update_taken},
        {"emp_min_f", to_string(s.emp_min_current)},
        {"emp_min_h", to_string(s.emp_min_candidate)},
        {"eps", s.epsilon},
    };
    out += line.dump();
    out += '\n';
  }
  return out;
}

Hypothesis regularize(const Hypothesis& h, SampleView sample,
                      const WrapperParams& params, Rng& rng) {
  const int k = params.num_labels;
  if (sample.empty()) return randomized_erm(h, {}, k, rng);
  if (uniform01(rng) < params.eta(sample.size())) {
    return randomized_erm(h, {}, k, rng);
  }
  return randomized_erm(h, sample, k, rng);
}

Mixture regularize_mixture(const Hypothesis& h, SampleView sample,
                           const WrapperParams& params) {
  const int k = params.num_labels;
  if (sample.empty()) return randomized_erm_mixture(h, {}, k);
  const BaseClass base(h, k);
  const auto erm = erm_set(base, sample);
  const double eta = params.eta(sample.size());
  std::vector<double> weights(static_cast<std::size_t>(k), eta / k);
  for (int i : erm.minimizers) {
    weights[static_cast<std::size_t>(i)] +=
        (1.0 - eta) / static_cast<double>(erm.minimizers.size());
  }
  std::vector<MixtureAtom> atoms;
  for (int i = 0; i < k; ++i) {
    if (weights[static_cast<std::size_t>(i)] > 0.0) {
      atoms.push_back({base.member(i), weights[static_cast<std::size_t>(i)]});
    }
  }
  return Mixture(std::move(atoms));
}

bool prefers_candidate(const Rational& current_min, const Rational& candidate_min,
                       double epsilon) {
  const Rational diff = current_min - candidate_min;
  // diff < epsilon  <=>  num < epsilon * den, den > 0.
  const bool keeps_current =
      static_cast<long double>(diff.numerator()) <
      static_cast<long double>(epsilon) * static_cast<long double>(diff.denominator());
  return !keeps_current;
}

UpdateDecision update_decision(const Hypothesis& current,
                               const Hypothesis& candidate, SampleView sample,
                               const WrapperParams& params) {
  if (sample.empty()) fail(ErrorKind::kEmptySample, "update on an empty block");
  UpdateDecision d;
  d.current_min = class_min_empirical_loss(current, sample);
  d.candidate_min = class_min_empirical_loss(candidate, sample);
  d.epsilon = params.epsilon(sample.size());
  d.take_candidate = prefers_candidate(d.current_min, d.candidate_min, d.epsilon);
  return d;
}

Hypothesis update(const Hypothesis& current, const Hypothesis& candidate,
                  SampleView sample, const WrapperParams& params) {
  return update_decision(current, candidate, sample, params).take_candidate
             ? candidate
             : current;
}

namespace {

Hypothesis train_at_stage(const Learner& learner, SampleView sample, unsigned t) {
  try {
    return learner.train(sample);
  } catch (const std::exception& err) {
    fail(ErrorKind::kLearnerFailure,
         "learner '" + learner.name() + "' failed at stage " + std::to_string(t) +
             " on " + std::to_string(sample.size()) + " examples: " + err.what());
  }
}

struct StagesOutcome {
  Hypothesis current;
  SampleView final_block;
  RunTrace trace;
};

StagesOutcome run_stages(const Learner& learner, SampleView sample,
                         const WrapperParams& params) {
  if (learner.num_labels() != params.num_labels) {
    fail(ErrorKind::kInvalidArity, "learner and wrapper disagree on k");
  }
  Hypothesis current = train_at_stage(learner, {}, 0);
  RunTrace trace;
  auto schedule = block_schedule(sample.size());
  if (!schedule) {
    SampleView first = sample.first(sample.empty() ? 0 : 1);
    trace.final_block_size = first.size();
    return {current, first, std::move(trace)};
  }

  const unsigned stages = schedule->stages;
  for (unsigned t = 1; t < stages; ++t) {
    SampleView prefix = sample.first(schedule->prefix_size(t - 1));
    Hypothesis candidate = train_at_stage(learner, prefix, t);
    SampleView block =
        sample.subspan(schedule->block_begin(t), schedule->block_sizes[t]);
    const auto d = update_decision(current, candidate, block, params);
    Hypothesis chosen = d.take_candidate ? candidate : current;
    trace.stages.push_back(StageRecord{t, candidate, chosen, d.take_candidate,
                                       d.current_min, d.candidate_min, d.epsilon});
    current = chosen;
  }
  SampleView final_block =
      sample.subspan(schedule->block_begin(stages), schedule->block_sizes[stages]);
  trace.final_block_size = final_block.size();
  trace.schedule = std::move(schedule);
  return {current, final_block, std::move(trace)};
}

}  // namespace

MonotonizeResult monotonize(const Learner& learner, SampleView sample,
                            const WrapperParams& params, Rng& rng) {
  auto run = run_stages(learner, sample, params);
  return {regularize(run.current, run.final_block, params, rng), std::move(run.trace)};
}

MonotonizeMixtureResult monotonize_output(const Learner& learner, SampleView sample,
                                          const WrapperParams& params) {
  auto run = run_stages(learner, sample, params);
  return {regularize_mixture(run.current, run.final_block, params),
          std::move(run.trace)};
}

double monotonize_mixture(const Learner& learner, const DiscreteDistribution& dist,
                          std::uint64_t m, const WrapperParams& params,
                          std::uint64_t budget) {
  std::uint64_t length = 0;
  if (m >= kMinScheduledSize) {
    length = block_schedule(m)->used();
  } else if (m >= 1) {
    length = 1;
  }
  double total = 0.0;
  for_each_sequence(dist, length, budget, [&](SampleView s, double weight) {
    total += weight * mixture_loss(monotonize_output(learner, s, params).output, dist);
  });
  return total;
}

}  // namespace monowrap
