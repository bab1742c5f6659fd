#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "monowrap/core.hpp"
#include "monowrap/wrapper.hpp"

namespace monowrap {

// Exact small-instance computation of the quantities the wrapper's
// guarantees are stated in. Everything reduces to "which member of B_h is
// correct on a fresh example": a categorical distribution over k cells.

// p_j = Pr[member j of B_h is correct]; q_j = 1 - p_j = Err(member j).
class CellDistribution {
 public:
  explicit CellDistribution(std::vector<double> probabilities);
  static CellDistribution from(const Hypothesis& h, const DiscreteDistribution& dist);

  int k() const { return static_cast<int>(p_.size()); }
  double p(int j) const { return p_[static_cast<std::size_t>(j)]; }
  double q(int j) const { return 1.0 - p(j); }
  std::span<const double> probabilities() const { return p_; }

 private:
  std::vector<double> p_;
};

// r(i, j) = Pr[member i of B_{h0} and member j of B_{h1} are both correct].
class JointCellDistribution {
 public:
  JointCellDistribution(int k, std::vector<double> row_major);
  static JointCellDistribution from(const Hypothesis& h0, const Hypothesis& h1,
                                    const DiscreteDistribution& dist);

  int k() const { return k_; }
  double r(int i, int j) const {
    return r_[static_cast<std::size_t>(i * k_ + j)];
  }
  std::span<const double> cells() const { return r_; }
  CellDistribution current_cells() const;    // row marginal, B_{h0}
  CellDistribution candidate_cells() const;  // column marginal, B_{h1}

 private:
  int k_;
  std::vector<double> r_;
};

// Visits every count vector (c_1..c_k) with sum n and c_j = 0 wherever
// p_j = 0, together with its multinomial probability. Order is fixed
// (lexicographic, first cell outermost). Throws kBudgetExceeded when the
// number of vectors exceeds budget.
void for_each_count_vector(
    std::span<const double> probabilities, std::size_t n, std::uint64_t budget,
    const std::function<void(std::span<const std::int64_t>, double)>& visit);

// LG_n: expected loss of the randomized ERM over B_h on n examples.
double exact_lg(const CellDistribution& cells, std::size_t n,
                std::uint64_t budget = default_budget());

// LR_n = (1 - eta_n) LG_n + eta_n alpha, n >= 1.
double exact_lr(const CellDistribution& cells, std::size_t n,
                const WrapperParams& params, std::uint64_t budget = default_budget());

// E max_j |empirical loss - population loss| over B_h on n examples.
double exact_expected_max_gap(const CellDistribution& cells, std::size_t n,
                              std::uint64_t budget = default_budget());

// Pr_{S ~ D^n}[U(h0, h1, S) = h1], n >= 1.
double exact_update_prob(const JointCellDistribution& joint, std::size_t n,
                         const WrapperParams& params,
                         std::uint64_t budget = default_budget());

struct ConditionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool vacuous = false;  // rhs >= 1, so the bound cannot fail
  double slack() const { return rhs - lhs; }
};

// N = 4n;  p_N LR_N(h1) + (1 - p_N) LR_N(h0)  <=  LR_n(h0).
ConditionCheck check_c1(const JointCellDistribution& joint, std::size_t n,
                        const WrapperParams& params,
                        std::uint64_t budget = default_budget());
ConditionCheck check_c1(const Hypothesis& h0, const Hypothesis& h1,
                        const DiscreteDistribution& dist, std::size_t n,
                        const WrapperParams& params,
                        std::uint64_t budget = default_budget());

// p_n LR_n(h1) + (1 - p_n) LR_n(h0)  <=  Err(h1) + 2 eta_n + 3 epsilon_n.
ConditionCheck check_c2(const JointCellDistribution& joint, std::size_t n,
                        const WrapperParams& params,
                        std::uint64_t budget = default_budget());
ConditionCheck check_c2(const Hypothesis& h0, const Hypothesis& h1,
                        const DiscreteDistribution& dist, std::size_t n,
                        const WrapperParams& params,
                        std::uint64_t budget = default_budget());

struct Lemma1Report {
  std::size_t n = 0;
  double update_prob = 0.0;
  double lr_current = 0.0;
  double lr_candidate = 0.0;
  bool upper_applicable = false;  // LR_n(h1) > LR_n(h0)
  double upper_bound = 0.0;       // 1 / (2 sqrt n)
  bool upper_holds = true;
  bool lower_applicable = false;  // LR_n(h1) < LR_n(h0) - 2 epsilon_n
  double lower_bound = 0.0;       // 1 - 4 exp(-n u_n^2 / 2)
  bool lower_holds = true;

  bool applicable() const { return upper_applicable || lower_applicable; }
  bool holds() const { return upper_holds && lower_holds; }
};

// Premises are evaluated with a 1e-12 margin so that floating-point noise in
// equal LR values does not count as a strict inequality.
Lemma1Report lemma1_bound_check(const JointCellDistribution& joint, std::size_t n,
                                const WrapperParams& params,
                                std::uint64_t budget = default_budget());

struct LgRecord {
  std::size_t instance = 0;
  std::size_t n = 0;
  double lg_n = 0.0;
  double lg_next = 0.0;
};

struct LgSweepReport {
  int k = 0;
  std::size_t instances = 0;
  std::size_t violations = 0;
  double max_violation = 0.0;  // max over checks of LG_{n+1} - LG_n
  std::vector<LgRecord> records;
};

// Random cell distributions; checks LG_{n+1} <= LG_n + 1e-12 for n < n_max.
LgSweepReport lg_monotonicity_sweep(int k, std::size_t n_max, std::size_t trials,
                                    Rng& rng, std::uint64_t budget = default_budget());

// mean(a) mean(b) >= mean(a b) - 1e-12 for ascending a and descending b.
bool chebyshev_sum_check(std::span<const double> a, std::span<const double> b);

// E_{S ~ D^m} Err(A(S)) by enumeration of all m-sequences.
double exact_learner_loss(const Learner& learner, const DiscreteDistribution& dist,
                          std::size_t m, std::uint64_t budget = default_budget());

// E_{S ~ D^m} Err(M(S)) computed through the cell oracles: only S_{T-2} is
// enumerated; the last update block and the regularization block are
// integrated with exact_update_prob and exact_lr. Independent of
// monotonize_mixture, which enumerates the whole used prefix.
double exact_monotonize_loss(const Learner& learner, const DiscreteDistribution& dist,
                             std::uint64_t m, const WrapperParams& params,
                             std::uint64_t budget = default_budget());

struct CompetitiveBound {
  double learner_loss = 0.0;  // E Err(A(S_{T-2}))
  double cost = 0.0;          // c(b(T-1))
  double bound() const { return learner_loss + cost; }
};

// Right-hand side of the competitiveness guarantee; m >= 9.
CompetitiveBound competitive_bound(const Learner& learner,
                                   const DiscreteDistribution& dist, std::uint64_t m,
                                   const WrapperParams& params,
                                   std::uint64_t budget = default_budget());

// Instance generators shared by the verification sweeps.
CellDistribution random_cells(int k, Rng& rng);

struct HypothesisPairInstance {
  std::string label;
  DiscreteDistribution dist;
  Hypothesis h0;
  Hypothesis h1;
};

// Random distribution over a domain of 1..max_domain points plus two random
// table hypotheses.
HypothesisPairInstance random_pair_instance(int k, std::size_t max_domain, Rng& rng);

// Identical classes, point masses and maximal-gap pairs.
std::vector<HypothesisPairInstance> corner_pair_instances(int k);

}  // namespace monowrap
