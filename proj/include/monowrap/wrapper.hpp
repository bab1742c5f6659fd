#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "monowrap/base_class.hpp"
#include "monowrap/core.hpp"

namespace monowrap {

// Parameters of the regularizer and updater.
//
//   eta(n)     = 1 / (2 sqrt(n))                     noise rate of R
//   rate(n)    = C / sqrt(n)                         uniform convergence rate
//   epsilon(n) = sqrt(ln(64 n) / n) + 2 rate(n)      update margin of U
//   cost(n)    = 2 eta(n) + 3 epsilon(n)             competitiveness cost
//
// with C = 1 for k = 2 and C = 36 otherwise. None of these are clamped to
// [0, 1]; epsilon(1) is about 4.04 for k = 2.
struct WrapperParams {
  int num_labels = 2;
  double rate_constant = 1.0;
  // Replace eta / epsilon for experiments; the monotonicity guarantees only
  // cover the defaults.
  std::function<double(std::size_t)> eta_override;
  std::function<double(std::size_t)> epsilon_override;

  static WrapperParams standard(int k);

  double eta(std::size_t n) const;
  double uniform_rate(std::size_t n) const;
  double epsilon(std::size_t n) const;
  double competitive_cost(std::size_t n) const;
  double alpha() const;
};

// Block sizes b(t) = 4^t.
constexpr std::uint64_t block_size(unsigned t) { return std::uint64_t{1} << (2 * t); }

// Below this size the wrapper falls back to regularizing A(empty).
constexpr std::uint64_t kMinScheduledSize = 2 * block_size(1) + block_size(0);

struct Schedule {
  std::uint64_t m = 0;
  unsigned stages = 0;                     // T
  std::vector<std::uint64_t> block_sizes;  // b(0), ..., b(T-1), b(T-1)
  std::uint64_t discarded = 0;

  std::uint64_t used() const { return m - discarded; }
  // Offset of block t inside the sample.
  std::uint64_t block_begin(unsigned t) const;
  // |S_t|, the size of the union of blocks 0..t.
  std::uint64_t prefix_size(unsigned t) const { return block_begin(t + 1); }
};

// Maximal T >= 2 with b(T-1) + sum_{t<T} b(t) <= m, found by search.
// Returns nullopt when m < 9.
std::optional<Schedule> block_schedule(std::uint64_t m);

// 1 + floor(log4((3m + 1) / 7)) in exact integer arithmetic; m >= 9.
unsigned closed_form_stage_count(std::uint64_t m);

struct StageRecord {
  unsigned t;
  Hypothesis candidate;
  Hypothesis chosen;
  bool update_taken;
  Rational emp_min_current;
  Rational emp_min_candidate;
  double epsilon;
};

struct RunTrace {
  std::optional<Schedule> schedule;
  std::vector<StageRecord> stages;
  std::size_t final_block_size = 0;

  // One JSON object per stage:
  // {"t","update_taken","emp_min_f","emp_min_h","eps"}
  std::string to_jsonl() const;
};

// Coin protocol: draw u; u < eta(n) selects the uniform branch over all of
// B_h, otherwise the ERM branch. Then, if the selected set has more than one
// member, draw one index. The empty sample goes straight to the uniform
// branch without a coin.
Hypothesis regularize(const Hypothesis& h, SampleView sample,
                      const WrapperParams& params, Rng& rng);
Mixture regularize_mixture(const Hypothesis& h, SampleView sample,
                           const WrapperParams& params);

// True iff the update rule switches to the candidate: the comparison
// current_min < candidate_min + epsilon fails. Exact rational difference
// against a real margin; equality switches.
bool prefers_candidate(const Rational& current_min, const Rational& candidate_min,
                       double epsilon);

struct UpdateDecision {
  bool take_candidate = false;
  Rational current_min;
  Rational candidate_min;
  double epsilon = 0.0;
};

UpdateDecision update_decision(const Hypothesis& current,
                               const Hypothesis& candidate, SampleView sample,
                               const WrapperParams& params);
Hypothesis update(const Hypothesis& current, const Hypothesis& candidate,
                  SampleView sample, const WrapperParams& params);

struct MonotonizeResult {
  Hypothesis hypothesis;
  RunTrace trace;
};

struct MonotonizeMixtureResult {
  Mixture output;
  RunTrace trace;
};

// The monotonizing algorithm. All coins are drawn by the final
// regularization, so the update stages are a deterministic function of the
// sample and the learner.
MonotonizeResult monotonize(const Learner& learner, SampleView sample,
                            const WrapperParams& params, Rng& rng);

// Same run with the final regularization integrated exactly.
MonotonizeMixtureResult monotonize_output(const Learner& learner, SampleView sample,
                                          const WrapperParams& params);

// Exact E_{S ~ D^m} Err(M(S)) by enumerating every sequence of the used
// prefix of S and integrating the regularizer's coins. Trailing discarded
// examples do not influence the output and are marginalized out.
double monotonize_mixture(const Learner& learner, const DiscreteDistribution& dist,
                          std::uint64_t m, const WrapperParams& params,
                          std::uint64_t budget = default_budget());

}  // namespace monowrap
