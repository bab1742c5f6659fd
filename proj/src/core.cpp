#include "monowrap/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace monowrap {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kDomainMismatch: return "domain-mismatch";
    case ErrorKind::kEmptySample: return "empty-sample";
    case ErrorKind::kInvalidArity: return "invalid-arity";
    case ErrorKind::kInvalidConfig: return "invalid-config";
    case ErrorKind::kBudgetExceeded: return "budget-exceeded";
    case ErrorKind::kLearnerFailure: return "learner-failure";
  }
  return "unknown";
}

Rng derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1));
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto v : path) push(v);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

std::string to_string(const Point& point) {
  if (const auto* id = std::get_if<PointId>(&point)) {
    return "#" + std::to_string(id->value);
  }
  std::ostringstream out;
  out << '(';
  const auto& c = std::get<EuclideanPoint>(point).coords;
  for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << c[i];
  out << ')';
  return out.str();
}

std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

PointId Domain::intern(const std::string& name) {
  auto [it, inserted] =
      ids_.emplace(name, static_cast<std::uint32_t>(names_.size()));
  if (inserted) names_.push_back(name);
  return PointId{it->second};
}

std::optional<PointId> Domain::find(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return PointId{it->second};
}

const std::string& Domain::name(PointId id) const {
  if (id.value >= names_.size()) {
    fail(ErrorKind::kDomainMismatch, "point id " + std::to_string(id.value) +
                                         " is not part of the domain");
  }
  return names_[id.value];
}

namespace {

class TableImpl final : public HypothesisImpl {
 public:
  explicit TableImpl(std::vector<Label> labels) : labels_(std::move(labels)) {}

  Label predict(const Point& x) const override {
    const auto* id = std::get_if<PointId>(&x);
    if (id == nullptr || id->value >= labels_.size()) {
      fail(ErrorKind::kDomainMismatch,
           "table hypothesis undefined at " + to_string(x));
    }
    return labels_[id->value];
  }

  std::string describe() const override {
    std::string s = "table[";
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      s += (i ? "," : "") + std::to_string(labels_[i]);
    }
    return s + "]";
  }

 private:
  std::vector<Label> labels_;
};

class ConstantImpl final : public HypothesisImpl {
 public:
  explicit ConstantImpl(Label label) : label_(label) {}
  Label predict(const Point&) const override { return label_; }
  std::string describe() const override {
    return "const(" + std::to_string(label_) + ")";
  }

 private:
  Label label_;
};

}  // namespace

Hypothesis::Hypothesis(std::shared_ptr<const HypothesisImpl> base,
                       int num_labels, int shift)
    : base_(std::move(base)), num_labels_(num_labels), shift_(shift) {
  if (!base_) fail(ErrorKind::kInvalidArgument, "null hypothesis");
  if (num_labels_ < 2) {
    fail(ErrorKind::kInvalidArity, "hypotheses need at least 2 labels");
  }
  shift_ = ((shift_ % num_labels_) + num_labels_) % num_labels_;
}

Hypothesis Hypothesis::table(std::vector<Label> labels, int num_labels) {
  for (Label y : labels) {
    if (y < 0 || y >= num_labels) {
      fail(ErrorKind::kInvalidArgument,
           "table label " + std::to_string(y) + " outside [0," +
               std::to_string(num_labels) + ")");
    }
  }
  return Hypothesis(std::make_shared<TableImpl>(std::move(labels)), num_labels);
}

Hypothesis Hypothesis::constant(Label label, int num_labels) {
  if (label < 0 || label >= num_labels) {
    fail(ErrorKind::kInvalidArgument, "constant label out of range");
  }
  return Hypothesis(std::make_shared<ConstantImpl>(label), num_labels);
}

Label Hypothesis::operator()(const Point& x) const {
  Label y = base_->predict(x);
  if (shift_ == 0) return y;
  return (y + shift_) % num_labels_;
}

Hypothesis Hypothesis::shifted(int by) const {
  return Hypothesis(base_, num_labels_, shift_ + by);
}

std::string Hypothesis::describe() const {
  if (shift_ == 0) return base_->describe();
  return "shift" + std::to_string(shift_) + "(" + base_->describe() + ")";
}

bool agree_on(const Hypothesis& a, const Hypothesis& b,
              std::span<const Point> points) {
  return std::all_of(points.begin(), points.end(),
                     [&](const Point& x) { return a(x) == b(x); });
}

Mixture::Mixture(std::vector<MixtureAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) fail(ErrorKind::kInvalidArgument, "empty mixture");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.weight > 0.0)) {
      fail(ErrorKind::kInvalidArgument, "mixture weights must be positive");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    fail(ErrorKind::kInvalidArgument, "mixture weights sum to " +
                                          std::to_string(total) + ", not 1");
  }
}

Mixture Mixture::single(Hypothesis h) {
  return Mixture({MixtureAtom{std::move(h), 1.0}});
}

Mixture Mixture::split_atom(std::size_t i) const {
  if (i >= atoms_.size()) fail(ErrorKind::kInvalidArgument, "no such atom");
  std::vector<MixtureAtom> out(atoms_.begin(), atoms_.end());
  out[i].weight /= 2.0;
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(i) + 1, out[i]);
  return Mixture(std::move(out));
}

DiscreteDistribution::DiscreteDistribution(int num_labels,
                                           std::vector<WeightedExample> support,
                                           Domain domain)
    : num_labels_(num_labels),
      support_(std::move(support)),
      domain_(std::move(domain)) {
  if (num_labels_ < 2) {
    fail(ErrorKind::kInvalidArity, "distributions need k >= 2");
  }
  if (support_.empty()) fail(ErrorKind::kInvalidArgument, "empty support");
  double total = 0.0;
  cumulative_.reserve(support_.size());
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const auto& w = support_[i];
    if (!(w.probability > 0.0)) {
      fail(ErrorKind::kInvalidArgument, "support probabilities must be positive");
    }
    if (w.example.label < 0 || w.example.label >= num_labels_) {
      fail(ErrorKind::kInvalidArgument,
           "label " + std::to_string(w.example.label) + " outside [0,k)");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (support_[j].example == w.example) {
        fail(ErrorKind::kInvalidArgument,
             "duplicate support entry " + to_string(w.example.point));
      }
    }
    total += w.probability;
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    fail(ErrorKind::kInvalidArgument,
         "support probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

std::size_t DiscreteDistribution::draw_index(Rng& rng) const {
  const double u = uniform01(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

double population_loss(const Hypothesis& h, const DiscreteDistribution& dist) {
  double loss = 0.0;
  for (const auto& w : dist.support()) {
    if (h(w.example.point) != w.example.label) loss += w.probability;
  }
  return std::clamp(loss, 0.0, 1.0);
}

double mixture_loss(const Mixture& mixture, const DiscreteDistribution& dist) {
  double loss = 0.0;
  for (const auto& atom : mixture.atoms()) {
    loss += atom.weight * population_loss(atom.hypothesis, dist);
  }
  return loss;
}

Rational empirical_loss(const Hypothesis& h, SampleView sample) {
  if (sample.empty()) {
    fail(ErrorKind::kEmptySample, "empirical loss of an empty sample");
  }
  std::int64_t errors = 0;
  for (const auto& z : sample) errors += h(z.point) != z.label ? 1 : 0;
  return Rational(errors, static_cast<std::int64_t>(sample.size()));
}

Sample sample_iid(const DiscreteDistribution& dist, std::size_t n, Rng& rng) {
  Sample out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(dist.draw(rng));
  return out;
}

std::uint64_t default_budget() {
  constexpr std::uint64_t kDefault = 50'000'000;
  const char* env = std::getenv("MONOWRAP_BUDGET");
  if (env == nullptr || *env == '\0') return kDefault;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || v == 0) return kDefault;
  return static_cast<std::uint64_t>(v);
}

void for_each_sequence(const DiscreteDistribution& dist, std::size_t n,
                       std::uint64_t budget,
                       const std::function<void(SampleView, double)>& visit) {
  const auto support = dist.support();
  const std::size_t s = support.size();
  double count = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    count *= static_cast<double>(s);
    if (count > static_cast<double>(budget)) {
      fail(ErrorKind::kBudgetExceeded,
           std::to_string(s) + "^" + std::to_string(n) +
               " sample sequences exceed the enumeration budget of " +
               std::to_string(budget));
    }
  }

  std::vector<std::size_t> digits(n, 0);
  Sample sample(n, support.empty() ? Example{} : support[0].example);
  while (true) {
    double weight = 1.0;
    for (std::size_t i = 0; i < n; ++i) weight *= support[digits[i]].probability;
    visit(SampleView(sample), weight);

    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < s) {
        sample[pos] = support[digits[pos]].example;
        break;
      }
      digits[pos] = 0;
      sample[pos] = support[0].example;
      if (pos == 0) return;
    }
    if (n == 0) return;
  }
}

}  // namespace monowrap
