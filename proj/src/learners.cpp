#include "monowrap/learners.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace monowrap {

ConstantLearner::ConstantLearner(Label label, int num_labels)
    : label_(label), num_labels_(num_labels) {
  if (num_labels < 2) fail(ErrorKind::kInvalidArity, "learner needs k >= 2");
  if (label < 0 || label >= num_labels) {
    fail(ErrorKind::kInvalidConfig, "constant label outside [0,k)");
  }
}

Hypothesis ConstantLearner::train(SampleView) const {
  return Hypothesis::constant(label_, num_labels_);
}

std::string ConstantLearner::name() const {
  return "constant(" + std::to_string(label_) + ")";
}

FiniteErmLearner::FiniteErmLearner(std::vector<Hypothesis> hypotheses)
    : hypotheses_(std::move(hypotheses)) {
  if (hypotheses_.empty()) {
    fail(ErrorKind::kInvalidConfig, "finite ERM needs a non-empty class");
  }
  num_labels_ = hypotheses_.front().num_labels();
  for (const auto& h : hypotheses_) {
    if (h.num_labels() != num_labels_) {
      fail(ErrorKind::kInvalidConfig, "class members disagree on k");
    }
  }
}

FiniteErmLearner FiniteErmLearner::all_tables(std::size_t domain_size,
                                              int num_labels) {
  if (num_labels < 2) fail(ErrorKind::kInvalidArity, "learner needs k >= 2");
  std::size_t count = 1;
  for (std::size_t i = 0; i < domain_size; ++i) {
    count *= static_cast<std::size_t>(num_labels);
    if (count > (std::size_t{1} << 20)) {
      fail(ErrorKind::kInvalidConfig, "too many tables for an exhaustive class");
    }
  }
  std::vector<Hypothesis> tables;
  tables.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    std::vector<Label> labels(domain_size);
    std::size_t rest = code;
    for (auto& y : labels) {
      y = static_cast<Label>(rest % static_cast<std::size_t>(num_labels));
      rest /= static_cast<std::size_t>(num_labels);
    }
    tables.push_back(Hypothesis::table(std::move(labels), num_labels));
  }
  return FiniteErmLearner(std::move(tables));
}

Hypothesis FiniteErmLearner::train(SampleView sample) const {
  if (sample.empty()) return hypotheses_.front();

  // Collapse the sample into (point, label) multiplicities when every point
  // is a domain id; each member then costs O(distinct points).
  const bool indexed = std::all_of(sample.begin(), sample.end(), [](const Example& z) {
    return std::holds_alternative<PointId>(z.point);
  });
  struct Cell {
    Point point;
    Label label;
    std::int64_t count;
  };
  std::vector<Cell> cells;
  if (indexed) {
    std::vector<std::pair<std::uint32_t, Label>> keys;
    keys.reserve(sample.size());
    for (const auto& z : sample) keys.emplace_back(std::get<PointId>(z.point).value, z.label);
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size();) {
      std::size_t j = i;
      while (j < keys.size() && keys[j] == keys[i]) ++j;
      cells.push_back({PointId{keys[i].first}, keys[i].second,
                       static_cast<std::int64_t>(j - i)});
      i = j;
    }
  } else {
    for (const auto& z : sample) cells.push_back({z.point, z.label, 1});
  }

  std::size_t best = 0;
  std::int64_t best_errors = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 0; i < hypotheses_.size(); ++i) {
    std::int64_t errors = 0;
    for (const auto& c : cells) {
      if (hypotheses_[i](c.point) != c.label) errors += c.count;
      if (errors >= best_errors) break;
    }
    if (errors < best_errors) {
      best_errors = errors;
      best = i;
    }
  }
  return hypotheses_[best];
}

std::string FiniteErmLearner::name() const {
  return "finite_erm(" + std::to_string(hypotheses_.size()) + ")";
}

namespace {

class KnnImpl final : public HypothesisImpl {
 public:
  KnnImpl(std::vector<EuclideanPoint> points, std::vector<Label> labels,
          int neighbors, int num_labels)
      : points_(std::move(points)),
        labels_(std::move(labels)),
        neighbors_(neighbors),
        num_labels_(num_labels) {}

  Label predict(const Point& x) const override {
    const auto* q = std::get_if<EuclideanPoint>(&x);
    if (q == nullptr || q->coords.size() != points_.front().coords.size()) {
      fail(ErrorKind::kDomainMismatch, "k-NN query needs a Euclidean point of dimension " +
                                           std::to_string(points_.front().coords.size()));
    }
    std::vector<double> dist(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      double d = 0.0;
      for (std::size_t c = 0; c < q->coords.size(); ++c) {
        const double diff = points_[i].coords[c] - q->coords[c];
        d += diff * diff;
      }
      dist[i] = d;
    }
    std::vector<std::size_t> order(points_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto take = std::min(order.size(), static_cast<std::size_t>(neighbors_));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                      order.end(), [&](std::size_t a, std::size_t b) {
                        if (dist[a] != dist[b]) return dist[a] < dist[b];
                        if (points_[a].coords != points_[b].coords) {
                          return points_[a].coords < points_[b].coords;
                        }
                        return a < b;
                      });
    std::vector<int> votes(static_cast<std::size_t>(num_labels_), 0);
    for (std::size_t i = 0; i < take; ++i) ++votes[static_cast<std::size_t>(labels_[order[i]])];
    return static_cast<Label>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  }

  std::string describe() const override {
    return "knn(" + std::to_string(neighbors_) + ", n=" + std::to_string(points_.size()) + ")";
  }

 private:
  std::vector<EuclideanPoint> points_;
  std::vector<Label> labels_;
  int neighbors_;
  int num_labels_;
};

}  // namespace

KnnLearner::KnnLearner(int neighbors, int num_labels)
    : neighbors_(neighbors), num_labels_(num_labels) {
  if (num_labels < 2) fail(ErrorKind::kInvalidArity, "learner needs k >= 2");
  if (neighbors < 1 || neighbors % 2 == 0) {
    fail(ErrorKind::kInvalidConfig, "k-NN needs an odd, positive neighbour count");
  }
}

Hypothesis KnnLearner::train(SampleView sample) const {
  if (sample.empty()) return Hypothesis::constant(0, num_labels_);
  std::vector<EuclideanPoint> points;
  std::vector<Label> labels;
  points.reserve(sample.size());
  labels.reserve(sample.size());
  for (const auto& z : sample) {
    const auto* p = std::get_if<EuclideanPoint>(&z.point);
    if (p == nullptr) {
      fail(ErrorKind::kDomainMismatch, "k-NN training needs Euclidean points");
    }
    if (!points.empty() && p->coords.size() != points.front().coords.size()) {
      fail(ErrorKind::kDomainMismatch, "k-NN training points differ in dimension");
    }
    if (z.label < 0 || z.label >= num_labels_) {
      fail(ErrorKind::kInvalidArgument, "training label outside [0,k)");
    }
    points.push_back(*p);
    labels.push_back(z.label);
  }
  return Hypothesis(std::make_shared<KnnImpl>(std::move(points), std::move(labels),
                                              neighbors_, num_labels_),
                    num_labels_);
}

std::string KnnLearner::name() const { return "knn(" + std::to_string(neighbors_) + ")"; }

SabotagedLearner::SabotagedLearner(std::shared_ptr<const Learner> inner)
    : inner_(std::move(inner)) {
  if (!inner_) fail(ErrorKind::kInvalidConfig, "sabotaged learner needs an inner learner");
}

Hypothesis SabotagedLearner::train(SampleView sample) const {
  Hypothesis h = inner_->train(sample);
  return sample.size() % 2 == 0 ? h : h.shifted(1);
}

std::string SabotagedLearner::name() const { return "sabotaged(" + inner_->name() + ")"; }

}  // namespace monowrap
