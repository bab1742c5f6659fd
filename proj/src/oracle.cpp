#include "monowrap/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "monowrap/base_class.hpp"

namespace monowrap {

namespace {

constexpr double kTolerance = 1e-12;

// Binomial coefficients as doubles: Pascal's triangle (exact up to 2^53 and
// correctly rounded beyond) for n <= 1000, log-gamma above that.
// Pascal's triangle up to n = 1000; beyond that binomials overflow a double
// and the enumerator switches to log weights.
class Binomials {
 public:
  explicit Binomials(std::size_t n) : exact_(n <= 1000) {
    if (!exact_) return;
    table_.resize((n + 1) * (n + 2) / 2);
    for (std::size_t r = 0; r <= n; ++r) {
      at(r, 0) = at(r, r) = 1.0;
      for (std::size_t c = 1; c < r; ++c) at(r, c) = at(r - 1, c - 1) + at(r - 1, c);
    }
  }

  bool exact() const { return exact_; }
  double operator()(std::size_t r, std::size_t c) const { return table_[r * (r + 1) / 2 + c]; }
  static double log(std::size_t r, std::size_t c) {
    return std::lgamma(static_cast<double>(r) + 1.0) - std::lgamma(static_cast<double>(c) + 1.0) -
           std::lgamma(static_cast<double>(r - c) + 1.0);
  }

 private:
  double& at(std::size_t r, std::size_t c) { return table_[r * (r + 1) / 2 + c]; }

  bool exact_;
  std::vector<double> table_;
};

// Number of count vectors of sum n over `parts` cells.
double composition_count(std::size_t n, std::size_t parts) {
  double count = 1.0;
  for (std::size_t i = 1; i < parts; ++i) {
    count *= static_cast<double>(n + i) / static_cast<double>(i);
  }
  return count;
}

class CountEnumerator {
 public:
  CountEnumerator(std::span<const double> probabilities, std::size_t n,
                  const std::function<void(std::span<const std::int64_t>, double)>& visit)
      : binom_(n), counts_(probabilities.size(), 0), visit_(visit) {
    for (std::size_t j = 0; j < probabilities.size(); ++j) {
      if (probabilities[j] > 0.0) active_.push_back(j);
    }
    powers_.resize(active_.size());
    log_p_.resize(active_.size());
    for (std::size_t a = 0; a < active_.size(); ++a) {
      log_p_[a] = std::log(probabilities[active_[a]]);
      if (!binom_.exact()) continue;
      powers_[a].resize(n + 1);
      for (std::size_t c = 0; c <= n; ++c) {
        powers_[a][c] = std::pow(probabilities[active_[a]], static_cast<double>(c));
      }
    }
  }

  std::size_t active_cells() const { return active_.size(); }
  double unit_weight() const { return binom_.exact() ? 1.0 : 0.0; }

  // weight is a plain probability when binom_ is exact, a log otherwise.
  void run(std::size_t a, std::size_t remaining, double weight) {
    const std::size_t cell = active_[a];
    const bool logs = !binom_.exact();
    if (a + 1 == active_.size()) {
      counts_[cell] = static_cast<std::int64_t>(remaining);
      const double w = logs ? std::exp(weight + log_p_[a] * static_cast<double>(remaining))
                            : weight * powers_[a][remaining];
      visit_(counts_, w);
      counts_[cell] = 0;
      return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
      counts_[cell] = static_cast<std::int64_t>(c);
      if (logs) {
        run(a + 1, remaining - c,
            weight + Binomials::log(remaining, c) + log_p_[a] * static_cast<double>(c));
      } else {
        run(a + 1, remaining - c, weight * binom_(remaining, c) * powers_[a][c]);
      }
    }
    counts_[cell] = 0;
  }

 private:
  Binomials binom_;
  std::vector<std::size_t> active_;
  std::vector<std::vector<double>> powers_;
  std::vector<double> log_p_;
  std::vector<std::int64_t> counts_;
  const std::function<void(std::span<const std::int64_t>, double)>& visit_;
};

void check_probabilities(std::span<const double> p, const char* what) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) fail(ErrorKind::kInvalidArgument, std::string(what) + ": negative cell");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    fail(ErrorKind::kInvalidArgument,
         std::string(what) + ": cells sum to " + std::to_string(total));
  }
}

double lr_from_lg(double lg, std::size_t n, const WrapperParams& params) {
  const double eta = params.eta(n);
  return (1.0 - eta) * lg + eta * params.alpha();
}

}  // namespace

CellDistribution::CellDistribution(std::vector<double> probabilities)
    : p_(std::move(probabilities)) {
  if (p_.size() < 2) fail(ErrorKind::kInvalidArity, "cell distributions need k >= 2");
  check_probabilities(p_, "cell distribution");
}

CellDistribution CellDistribution::from(const Hypothesis& h,
                                        const DiscreteDistribution& dist) {
  const BaseClass base(h, dist.num_labels());
  std::vector<double> p(static_cast<std::size_t>(dist.num_labels()), 0.0);
  for (const auto& w : dist.support()) {
    p[static_cast<std::size_t>(base.correct_member(w.example))] += w.probability;
  }
  return CellDistribution(std::move(p));
}

JointCellDistribution::JointCellDistribution(int k, std::vector<double> row_major)
    : k_(k), r_(std::move(row_major)) {
  if (k < 2) fail(ErrorKind::kInvalidArity, "joint cells need k >= 2");
  if (r_.size() != static_cast<std::size_t>(k * k)) {
    fail(ErrorKind::kInvalidArgument, "joint cells need k*k entries");
  }
  check_probabilities(r_, "joint cell distribution");
}

JointCellDistribution JointCellDistribution::from(const Hypothesis& h0,
                                                  const Hypothesis& h1,
                                                  const DiscreteDistribution& dist) {
  const int k = dist.num_labels();
  const BaseClass b0(h0, k);
  const BaseClass b1(h1, k);
  std::vector<double> r(static_cast<std::size_t>(k * k), 0.0);
  for (const auto& w : dist.support()) {
    const int i = b0.correct_member(w.example);
    const int j = b1.correct_member(w.example);
    r[static_cast<std::size_t>(i * k + j)] += w.probability;
  }
  return JointCellDistribution(k, std::move(r));
}

CellDistribution JointCellDistribution::current_cells() const {
  std::vector<double> p(static_cast<std::size_t>(k_), 0.0);
  for (int i = 0; i < k_; ++i) {
    for (int j = 0; j < k_; ++j) p[static_cast<std::size_t>(i)] += r(i, j);
  }
  return CellDistribution(std::move(p));
}

CellDistribution JointCellDistribution::candidate_cells() const {
  std::vector<double> p(static_cast<std::size_t>(k_), 0.0);
  for (int i = 0; i < k_; ++i) {
    for (int j = 0; j < k_; ++j) p[static_cast<std::size_t>(j)] += r(i, j);
  }
  return CellDistribution(std::move(p));
}

void for_each_count_vector(
    std::span<const double> probabilities, std::size_t n, std::uint64_t budget,
    const std::function<void(std::span<const std::int64_t>, double)>& visit) {
  CountEnumerator e(probabilities, n, visit);
  if (e.active_cells() == 0) {
    fail(ErrorKind::kInvalidArgument, "no cell has positive probability");
  }
  const double terms = composition_count(n, e.active_cells());
  if (terms > static_cast<double>(budget)) {
    fail(ErrorKind::kBudgetExceeded,
         "enumeration of " + std::to_string(static_cast<std::uint64_t>(terms)) +
             " count vectors (n=" + std::to_string(n) + ") exceeds the budget of " +
             std::to_string(budget));
  }
  e.run(0, n, e.unit_weight());
}

double exact_lg(const CellDistribution& cells, std::size_t n, std::uint64_t budget) {
  double total = 0.0;
  for_each_count_vector(cells.probabilities(), n, budget,
                        [&](std::span<const std::int64_t> counts, double w) {
                          const auto best = *std::max_element(counts.begin(), counts.end());
                          double loss = 0.0;
                          int ties = 0;
                          for (int j = 0; j < cells.k(); ++j) {
                            if (counts[static_cast<std::size_t>(j)] == best) {
                              loss += cells.q(j);
                              ++ties;
                            }
                          }
                          total += w * loss / ties;
                        });
  return total;
}

double exact_lr(const CellDistribution& cells, std::size_t n,
                const WrapperParams& params, std::uint64_t budget) {
  if (n == 0) fail(ErrorKind::kEmptySample, "LR_n is defined for n >= 1");
  return lr_from_lg(exact_lg(cells, n, budget), n, params);
}

double exact_expected_max_gap(const CellDistribution& cells, std::size_t n,
                              std::uint64_t budget) {
  if (n == 0) fail(ErrorKind::kEmptySample, "gap of an empty sample");
  double total = 0.0;
  const auto size = static_cast<double>(n);
  for_each_count_vector(cells.probabilities(), n, budget,
                        [&](std::span<const std::int64_t> counts, double w) {
                          double gap = 0.0;
                          for (int j = 0; j < cells.k(); ++j) {
                            const double freq =
                                static_cast<double>(counts[static_cast<std::size_t>(j)]) / size;
                            gap = std::max(gap, std::abs(freq - cells.p(j)));
                          }
                          total += w * gap;
                        });
  return total;
}

double exact_update_prob(const JointCellDistribution& joint, std::size_t n,
                         const WrapperParams& params, std::uint64_t budget) {
  if (n == 0) fail(ErrorKind::kEmptySample, "update on an empty block");
  const int k = joint.k();
  const double eps = params.epsilon(n);
  const auto size = static_cast<std::int64_t>(n);
  double total = 0.0;
  std::vector<std::int64_t> rows(static_cast<std::size_t>(k));
  std::vector<std::int64_t> cols(static_cast<std::size_t>(k));
  for_each_count_vector(joint.cells(), n, budget,
                        [&](std::span<const std::int64_t> counts, double w) {
                          std::fill(rows.begin(), rows.end(), 0);
                          std::fill(cols.begin(), cols.end(), 0);
                          for (int i = 0; i < k; ++i) {
                            for (int j = 0; j < k; ++j) {
                              const auto c = counts[static_cast<std::size_t>(i * k + j)];
                              rows[static_cast<std::size_t>(i)] += c;
                              cols[static_cast<std::size_t>(j)] += c;
                            }
                          }
                          const auto row_max = *std::max_element(rows.begin(), rows.end());
                          const auto col_max = *std::max_element(cols.begin(), cols.end());
                          if (prefers_candidate(Rational(size - row_max, size),
                                                Rational(size - col_max, size), eps)) {
                            total += w;
                          }
                        });
  return std::min(total, 1.0);
}

ConditionCheck check_c1(const JointCellDistribution& joint, std::size_t n,
                        const WrapperParams& params, std::uint64_t budget) {
  if (n == 0) fail(ErrorKind::kEmptySample, "condition C1 needs n >= 1");
  const std::size_t big = 4 * n;
  const auto current = joint.current_cells();
  const auto candidate = joint.candidate_cells();
  const double p = exact_update_prob(joint, big, params, budget);
  ConditionCheck out;
  out.lhs = p * exact_lr(candidate, big, params, budget) +
            (1.0 - p) * exact_lr(current, big, params, budget);
  out.rhs = exact_lr(current, n, params, budget);
  out.holds = out.lhs <= out.rhs + kTolerance;
  return out;
}

ConditionCheck check_c1(const Hypothesis& h0, const Hypothesis& h1,
                        const DiscreteDistribution& dist, std::size_t n,
                        const WrapperParams& params, std::uint64_t budget) {
  return check_c1(JointCellDistribution::from(h0, h1, dist), n, params, budget);
}

ConditionCheck check_c2(const JointCellDistribution& joint, std::size_t n,
                        const WrapperParams& params, std::uint64_t budget) {
  if (n == 0) fail(ErrorKind::kEmptySample, "condition C2 needs n >= 1");
  const auto current = joint.current_cells();
  const auto candidate = joint.candidate_cells();
  const double p = exact_update_prob(joint, n, params, budget);
  ConditionCheck out;
  out.lhs = p * exact_lr(candidate, n, params, budget) +
            (1.0 - p) * exact_lr(current, n, params, budget);
  // Member 0 of B_{h1} is h1 itself.
  out.rhs = candidate.q(0) + params.competitive_cost(n);
  out.holds = out.lhs <= out.rhs + kTolerance;
  out.vacuous = out.rhs >= 1.0;
  return out;
}

ConditionCheck check_c2(const Hypothesis& h0, const Hypothesis& h1,
                        const DiscreteDistribution& dist, std::size_t n,
                        const WrapperParams& params, std::uint64_t budget) {
  return check_c2(JointCellDistribution::from(h0, h1, dist), n, params, budget);
}

Lemma1Report lemma1_bound_check(const JointCellDistribution& joint, std::size_t n,
                                const WrapperParams& params, std::uint64_t budget) {
  if (n == 0) fail(ErrorKind::kEmptySample, "update probability needs n >= 1");
  Lemma1Report r;
  r.n = n;
  r.update_prob = exact_update_prob(joint, n, params, budget);
  r.lr_current = exact_lr(joint.current_cells(), n, params, budget);
  r.lr_candidate = exact_lr(joint.candidate_cells(), n, params, budget);

  const auto x = static_cast<double>(n);
  const double u = std::sqrt(std::log(64.0 * x) / x);
  r.upper_bound = 1.0 / (2.0 * std::sqrt(x));
  r.lower_bound = 1.0 - 4.0 * std::exp(-x * u * u / 2.0);

  r.upper_applicable = r.lr_candidate > r.lr_current + kTolerance;
  if (r.upper_applicable) r.upper_holds = r.update_prob <= r.upper_bound + kTolerance;
  r.lower_applicable =
      r.lr_candidate < r.lr_current - 2.0 * params.epsilon(n) - kTolerance;
  if (r.lower_applicable) r.lower_holds = r.update_prob >= r.lower_bound - kTolerance;
  return r;
}

LgSweepReport lg_monotonicity_sweep(int k, std::size_t n_max, std::size_t trials,
                                    Rng& rng, std::uint64_t budget) {
  LgSweepReport report;
  report.k = k;
  report.instances = trials;
  report.max_violation = -1.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto cells = random_cells(k, rng);
    double previous = exact_lg(cells, 0, budget);
    for (std::size_t n = 0; n < n_max; ++n) {
      const double next = exact_lg(cells, n + 1, budget);
      const double increase = next - previous;
      report.max_violation = std::max(report.max_violation, increase);
      if (increase > kTolerance) ++report.violations;
      report.records.push_back({i, n, previous, next});
      previous = next;
    }
  }
  return report;
}

bool chebyshev_sum_check(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::kInvalidArgument, "length mismatch");
  if (a.empty()) fail(ErrorKind::kInvalidArgument, "empty sequences");
  if (!std::is_sorted(a.begin(), a.end()) ||
      !std::is_sorted(b.begin(), b.end(), std::greater<>())) {
    fail(ErrorKind::kInvalidArgument, "a must ascend and b must descend");
  }
  const auto n = static_cast<double>(a.size());
  double sa = 0.0, sb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    sab += a[i] * b[i];
  }
  return (sa / n) * (sb / n) >= sab / n - kTolerance;
}

double exact_learner_loss(const Learner& learner, const DiscreteDistribution& dist,
                          std::size_t m, std::uint64_t budget) {
  double total = 0.0;
  for_each_sequence(dist, m, budget, [&](SampleView s, double w) {
    total += w * population_loss(learner.train(s), dist);
  });
  return total;
}

double exact_monotonize_loss(const Learner& learner, const DiscreteDistribution& dist,
                             std::uint64_t m, const WrapperParams& params,
                             std::uint64_t budget) {
  if (m == 0) return params.alpha();
  const Hypothesis initial = learner.train({});
  if (m < kMinScheduledSize) {
    return exact_lr(CellDistribution::from(initial, dist), 1, params, budget);
  }
  const Schedule schedule = *block_schedule(m);
  const unsigned stages = schedule.stages;
  const std::size_t prefix = schedule.prefix_size(stages - 2);
  const std::size_t last = schedule.block_sizes[stages - 1];

  double total = 0.0;
  for_each_sequence(dist, prefix, budget, [&](SampleView s, double w) {
    Hypothesis current = initial;
    for (unsigned t = 1; t + 1 < stages; ++t) {
      const Hypothesis candidate = learner.train(s.first(schedule.prefix_size(t - 1)));
      current = update(current, candidate,
                       s.subspan(schedule.block_begin(t), schedule.block_sizes[t]), params);
    }
    const Hypothesis candidate = learner.train(s);
    const auto joint = JointCellDistribution::from(current, candidate, dist);
    const double p = exact_update_prob(joint, last, params, budget);
    total += w * (p * exact_lr(joint.candidate_cells(), last, params, budget) +
                  (1.0 - p) * exact_lr(joint.current_cells(), last, params, budget));
  });
  return total;
}

CompetitiveBound competitive_bound(const Learner& learner,
                                   const DiscreteDistribution& dist, std::uint64_t m,
                                   const WrapperParams& params, std::uint64_t budget) {
  const auto schedule = block_schedule(m);
  if (!schedule) {
    fail(ErrorKind::kInvalidArgument, "competitiveness bound needs m >= 9");
  }
  const unsigned stages = schedule->stages;
  CompetitiveBound out;
  out.learner_loss =
      exact_learner_loss(learner, dist, schedule->prefix_size(stages - 2), budget);
  out.cost = params.competitive_cost(schedule->block_sizes[stages - 1]);
  return out;
}

CellDistribution random_cells(int k, Rng& rng) {
  if (k < 2) fail(ErrorKind::kInvalidArity, "cell distributions need k >= 2");
  std::vector<double> p(static_cast<std::size_t>(k));
  const bool sparse = uniform01(rng) < 0.25;
  double total = 0.0;
  for (auto& v : p) {
    v = -std::log(1.0 - uniform01(rng));
    if (sparse && uniform01(rng) < 0.5) v = 0.0;
    total += v;
  }
  if (total <= 0.0) {
    p[uniform_index(rng, p.size())] = 1.0;
    total = 1.0;
  }
  for (auto& v : p) v /= total;
  return CellDistribution(std::move(p));
}

HypothesisPairInstance random_pair_instance(int k, std::size_t max_domain, Rng& rng) {
  const std::size_t points = 1 + uniform_index(rng, max_domain);
  Domain domain;
  std::vector<WeightedExample> support;
  double total = 0.0;
  for (std::size_t x = 0; x < points; ++x) {
    const PointId id = domain.intern("x" + std::to_string(x));
    for (int y = 0; y < k; ++y) {
      if (uniform01(rng) < 0.6) {
        const double w = -std::log(1.0 - uniform01(rng)) + 1e-3;
        support.push_back({Example{id, y}, w});
        total += w;
      }
    }
  }
  if (support.empty()) {
    support.push_back({Example{PointId{0}, static_cast<Label>(uniform_index(
                                               rng, static_cast<std::size_t>(k)))},
                       1.0});
    total = 1.0;
  }
  for (auto& w : support) w.probability /= total;

  auto random_table = [&] {
    std::vector<Label> labels(points);
    for (auto& y : labels) y = static_cast<Label>(uniform_index(rng, static_cast<std::size_t>(k)));
    return Hypothesis::table(std::move(labels), k);
  };
  Hypothesis h0 = random_table();
  Hypothesis h1 = random_table();
  return {"random", DiscreteDistribution(k, std::move(support), std::move(domain)),
          std::move(h0), std::move(h1)};
}

std::vector<HypothesisPairInstance> corner_pair_instances(int k) {
  std::vector<HypothesisPairInstance> out;
  const auto kk = static_cast<std::size_t>(k);

  // Noisy labels on a two-point domain.
  auto noisy = [&] {
    Domain d;
    const PointId a = d.intern("x0");
    const PointId b = d.intern("x1");
    std::vector<WeightedExample> s = {{Example{a, 0}, 0.4},
                                      {Example{a, 1 % k}, 0.2},
                                      {Example{b, 1 % k}, 0.3},
                                      {Example{b, 0}, 0.1}};
    return DiscreteDistribution(k, std::move(s), std::move(d));
  };
  const Hypothesis base = Hypothesis::table({0, 1}, k);
  out.push_back({"identical-classes", noisy(), base, base.shifted(1)});
  out.push_back({"same-hypothesis", noisy(), base, base});

  auto point_mass = [&] {
    Domain d;
    const PointId a = d.intern("x0");
    return DiscreteDistribution(k, {{Example{a, 0}, 1.0}}, std::move(d));
  };
  const Hypothesis right = Hypothesis::table({0}, k);
  const Hypothesis wrong = Hypothesis::table({1}, k);
  out.push_back({"point-mass-current-correct", point_mass(), right, wrong});
  out.push_back({"point-mass-candidate-correct", point_mass(), wrong, right});

  // k equally likely points, all labelled 0. The constant-0 table is perfect;
  // the identity table puts every cell at 1/k so its whole class loses alpha.
  auto spread = [&] {
    Domain d;
    std::vector<WeightedExample> s;
    for (std::size_t x = 0; x < kk; ++x) {
      s.push_back({Example{d.intern("x" + std::to_string(x)), 0}, 1.0 / static_cast<double>(k)});
    }
    return DiscreteDistribution(k, std::move(s), std::move(d));
  };
  std::vector<Label> identity(kk);
  for (std::size_t x = 0; x < kk; ++x) identity[x] = static_cast<Label>(x);
  const Hypothesis perfect = Hypothesis::table(std::vector<Label>(kk, 0), k);
  const Hypothesis scattered = Hypothesis::table(identity, k);
  out.push_back({"maximal-gap-candidate-better", spread(), scattered, perfect});
  out.push_back({"maximal-gap-current-better", spread(), perfect, scattered});
  return out;
}

}  // namespace monowrap
