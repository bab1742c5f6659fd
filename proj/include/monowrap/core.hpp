#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <boost/rational.hpp>

#include "monowrap/errors.hpp"
#include "monowrap/rng.hpp"

namespace monowrap {

using Label = int;
using Rational = boost::rational<std::int64_t>;

// Opaque identifier of a point in a finite domain.
struct PointId {
  std::uint32_t value = 0;
  friend bool operator==(PointId, PointId) = default;
  friend auto operator<=>(PointId, PointId) = default;
};

// Fixed-dimension real vector; only the k-NN learner interprets these.
struct EuclideanPoint {
  std::vector<double> coords;
  friend bool operator==(const EuclideanPoint&, const EuclideanPoint&) = default;
};

using Point = std::variant<PointId, EuclideanPoint>;

struct Example {
  Point point;
  Label label = 0;
  friend bool operator==(const Example&, const Example&) = default;
};

using Sample = std::vector<Example>;
using SampleView = std::span<const Example>;

std::string to_string(const Point& point);
std::string to_string(const Rational& r);

// Names of the points of a finite domain, interned to dense ids.
class Domain {
 public:
  PointId intern(const std::string& name);
  std::optional<PointId> find(const std::string& name) const;
  const std::string& name(PointId id) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

class HypothesisImpl {
 public:
  virtual ~HypothesisImpl() = default;
  virtual Label predict(const Point& x) const = 0;
  virtual std::string describe() const = 0;
};

// A deterministic map from points to labels in [0, k). The shift is applied
// lazily: (base, i) evaluates x -> (base(x) + i) mod k.
class Hypothesis {
 public:
  Hypothesis(std::shared_ptr<const HypothesisImpl> base, int num_labels,
             int shift = 0);

  static Hypothesis table(std::vector<Label> labels, int num_labels);
  static Hypothesis constant(Label label, int num_labels);

  Label operator()(const Point& x) const;

  int num_labels() const { return num_labels_; }
  int shift() const { return shift_; }
  const std::shared_ptr<const HypothesisImpl>& base() const { return base_; }

  // Composes with the cyclic label shift y -> (y + by) mod k.
  Hypothesis shifted(int by) const;

  // Same base object and same shift; a sufficient, not necessary, test for
  // extensional equality.
  bool same_as(const Hypothesis& other) const {
    return base_ == other.base_ && shift_ == other.shift_;
  }

  std::string describe() const;

 private:
  std::shared_ptr<const HypothesisImpl> base_;
  int num_labels_;
  int shift_;
};

// Pointwise equality on the given points.
bool agree_on(const Hypothesis& a, const Hypothesis& b,
              std::span<const Point> points);

struct MixtureAtom {
  Hypothesis hypothesis;
  double weight;
};

// Finitely supported distribution over hypotheses: the exact form of a
// randomized output.
class Mixture {
 public:
  explicit Mixture(std::vector<MixtureAtom> atoms);
  static Mixture single(Hypothesis h);

  std::span<const MixtureAtom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  // Splits atom i into two atoms of half the weight each.
  Mixture split_atom(std::size_t i) const;

 private:
  std::vector<MixtureAtom> atoms_;
};

struct WeightedExample {
  Example example;
  double probability;
};

// Finitely supported joint distribution over (point, label) pairs.
class DiscreteDistribution {
 public:
  DiscreteDistribution(int num_labels, std::vector<WeightedExample> support,
                       Domain domain = {});

  int num_labels() const { return num_labels_; }
  std::span<const WeightedExample> support() const { return support_; }
  const Domain& domain() const { return domain_; }

  // Index into support() of one draw.
  std::size_t draw_index(Rng& rng) const;
  const Example& draw(Rng& rng) const { return support_[draw_index(rng)].example; }

 private:
  int num_labels_;
  std::vector<WeightedExample> support_;
  std::vector<double> cumulative_;
  Domain domain_;
};

// Black-box learning rule. Implementations must accept the empty sample and
// be deterministic functions of the sample.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual Hypothesis train(SampleView sample) const = 0;
  virtual int num_labels() const = 0;
  virtual std::string name() const = 0;
};

double population_loss(const Hypothesis& h, const DiscreteDistribution& dist);
double mixture_loss(const Mixture& mixture, const DiscreteDistribution& dist);
Rational empirical_loss(const Hypothesis& h, SampleView sample);
Sample sample_iid(const DiscreteDistribution& dist, std::size_t n, Rng& rng);

// Enumeration budget for exact computations. MONOWRAP_BUDGET overrides the
// built-in default of 5e7 terms.
std::uint64_t default_budget();

// Calls visit(sample, probability) for every length-n sequence over the
// support of dist, in lexicographic order of support indices. Throws
// kBudgetExceeded if |support|^n exceeds budget.
void for_each_sequence(
    const DiscreteDistribution& dist, std::size_t n, std::uint64_t budget,
    const std::function<void(SampleView, double)>& visit);

}  // namespace monowrap
