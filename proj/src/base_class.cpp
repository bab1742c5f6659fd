#include "monowrap/base_class.hpp"

#include <algorithm>
#include <cmath>

namespace monowrap {

BaseClass::BaseClass(const Hypothesis& h, int k) {
  if (k < 2) fail(ErrorKind::kInvalidArity, "base class needs k >= 2");
  if (h.num_labels() != k) {
    fail(ErrorKind::kInvalidArity,
         "hypothesis has " + std::to_string(h.num_labels()) +
             " labels, base class built for k=" + std::to_string(k));
  }
  members_.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) members_.push_back(h.shifted(i));
}

int BaseClass::correct_member(const Example& z) const {
  const int k = size();
  return ((z.label - members_[0](z.point)) % k + k) % k;
}

std::vector<std::int64_t> BaseClass::hit_counts(SampleView sample) const {
  std::vector<std::int64_t> hits(members_.size(), 0);
  for (const auto& z : sample) ++hits[static_cast<std::size_t>(correct_member(z))];
  return hits;
}

BaseClass build_base_class(const Hypothesis& h, int k) { return BaseClass(h, k); }

ErmOutcome erm_set(const BaseClass& base, SampleView sample) {
  if (sample.empty()) fail(ErrorKind::kEmptySample, "ERM over an empty sample");
  const auto hits = base.hit_counts(sample);
  const auto best = *std::max_element(hits.begin(), hits.end());
  ErmOutcome out;
  for (int i = 0; i < base.size(); ++i) {
    if (hits[static_cast<std::size_t>(i)] == best) out.minimizers.push_back(i);
  }
  const auto n = static_cast<std::int64_t>(sample.size());
  out.min_empirical_loss = Rational(n - best, n);
  return out;
}

Rational class_min_empirical_loss(const Hypothesis& h, SampleView sample) {
  return erm_set(BaseClass(h, h.num_labels()), sample).min_empirical_loss;
}

namespace {

std::vector<int> candidate_members(const BaseClass& base, SampleView sample) {
  if (sample.empty()) {
    std::vector<int> all(static_cast<std::size_t>(base.size()));
    for (int i = 0; i < base.size(); ++i) all[static_cast<std::size_t>(i)] = i;
    return all;
  }
  return erm_set(base, sample).minimizers;
}

}  // namespace

Hypothesis randomized_erm(const Hypothesis& h, SampleView sample, int k, Rng& rng) {
  const BaseClass base(h, k);
  const auto set = candidate_members(base, sample);
  const std::size_t pick = set.size() == 1 ? 0 : uniform_index(rng, set.size());
  return base.member(set[pick]);
}

Mixture randomized_erm_mixture(const Hypothesis& h, SampleView sample, int k) {
  const BaseClass base(h, k);
  const auto set = candidate_members(base, sample);
  std::vector<MixtureAtom> atoms;
  const double w = 1.0 / static_cast<double>(set.size());
  for (int i : set) atoms.push_back({base.member(i), w});
  return Mixture(std::move(atoms));
}

double uniform_convergence_gap(const BaseClass& base,
                               const DiscreteDistribution& dist,
                               SampleView sample) {
  if (sample.empty()) {
    fail(ErrorKind::kEmptySample, "uniform convergence gap of an empty sample");
  }
  double gap = 0.0;
  for (const auto& f : base.members()) {
    const double emp = boost::rational_cast<double>(empirical_loss(f, sample));
    gap = std::max(gap, std::abs(emp - population_loss(f, dist)));
  }
  return gap;
}

}  // namespace monowrap
