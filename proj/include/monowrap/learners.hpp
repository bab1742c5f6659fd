#pragma once

#include <memory>
#include <vector>

#include "monowrap/core.hpp"

namespace monowrap {

// Ignores the sample.
class ConstantLearner final : public Learner {
 public:
  ConstantLearner(Label label, int num_labels);
  Hypothesis train(SampleView sample) const override;
  int num_labels() const override { return num_labels_; }
  std::string name() const override;

 private:
  Label label_;
  int num_labels_;
};

// Empirical risk minimizer over a finite list of hypotheses; ties go to the
// lowest index and the empty sample returns member 0.
class FiniteErmLearner final : public Learner {
 public:
  explicit FiniteErmLearner(std::vector<Hypothesis> hypotheses);

  // All k^n tables over a domain of n points. Member index encodes the
  // table in base k with point 0 as the least significant digit, so member 0
  // is the constant-0 table.
  static FiniteErmLearner all_tables(std::size_t domain_size, int num_labels);

  Hypothesis train(SampleView sample) const override;
  int num_labels() const override { return num_labels_; }
  std::string name() const override;

  std::span<const Hypothesis> hypotheses() const { return hypotheses_; }

 private:
  std::vector<Hypothesis> hypotheses_;
  int num_labels_;
};

// kappa-nearest-neighbour rule over Euclidean points. Neighbours are ordered
// by squared distance, then lexicographically by coordinates, then by sample
// index; the vote goes to the most frequent label, smallest label on ties.
// The empty sample yields the constant-0 hypothesis.
class KnnLearner final : public Learner {
 public:
  KnnLearner(int neighbors, int num_labels);
  Hypothesis train(SampleView sample) const override;
  int num_labels() const override { return num_labels_; }
  std::string name() const override;

 private:
  int neighbors_;
  int num_labels_;
};

// Deliberately non-monotone: on odd sample sizes returns the inner output
// shifted by one label.
class SabotagedLearner final : public Learner {
 public:
  explicit SabotagedLearner(std::shared_ptr<const Learner> inner);
  Hypothesis train(SampleView sample) const override;
  int num_labels() const override { return inner_->num_labels(); }
  std::string name() const override;

 private:
  std::shared_ptr<const Learner> inner_;
};

}  // namespace monowrap
