#pragma once

#include <vector>

#include "monowrap/core.hpp"

namespace monowrap {

// The k cyclic label shifts of a hypothesis: member i is x -> (h(x) + i) mod k.
// Every example (x, y) is classified correctly by exactly one member, namely
// i = (y - h(x)) mod k.
class BaseClass {
 public:
  BaseClass(const Hypothesis& h, int k);

  int size() const { return static_cast<int>(members_.size()); }
  const Hypothesis& member(int i) const { return members_.at(static_cast<std::size_t>(i)); }
  std::span<const Hypothesis> members() const { return members_; }

  int correct_member(const Example& z) const;

  // hits[i] = number of examples of the sample that member i gets right.
  std::vector<std::int64_t> hit_counts(SampleView sample) const;

 private:
  std::vector<Hypothesis> members_;
};

BaseClass build_base_class(const Hypothesis& h, int k);

struct ErmOutcome {
  std::vector<int> minimizers;  // ascending member indices
  Rational min_empirical_loss;
};

ErmOutcome erm_set(const BaseClass& base, SampleView sample);

// min over the base class of the empirical loss.
Rational class_min_empirical_loss(const Hypothesis& h, SampleView sample);

// Uniform draw from the empirical minimizers of B_h (from all of B_h on the
// empty sample). Draws one index only when more than one candidate exists.
Hypothesis randomized_erm(const Hypothesis& h, SampleView sample, int k, Rng& rng);
Mixture randomized_erm_mixture(const Hypothesis& h, SampleView sample, int k);

// max over members of |empirical loss - population loss|.
double uniform_convergence_gap(const BaseClass& base,
                               const DiscreteDistribution& dist,
                               SampleView sample);

}  // namespace monowrap
