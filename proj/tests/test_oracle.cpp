#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "monowrap/learners.hpp"
#include "monowrap/oracle.hpp"
#include "reference.hpp"
#include "support.hpp"

using namespace monowrap;
using testing::named;

namespace {

const WrapperParams kBinary = WrapperParams::standard(2);

double binom(int n, int r) {
  double c = 1.0;
  for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return c;
}

}  // namespace

TEST_CASE("LG of p = (0.9, 0.1)") {
  const CellDistribution cells({0.9, 0.1});
  const double expected[] = {0.5, 0.18, 0.18, 0.1224};
  for (int n = 0; n < 4; ++n) {
    CHECK(std::abs(exact_lg(cells, n) - expected[n]) <= 1e-12);
    CHECK(std::abs(reference::lg_by_sequences({0.9, 0.1}, n) - expected[n]) <= 1e-12);
  }
}

TEST_CASE("LG of a degenerate point mass") {
  CHECK(exact_lg(CellDistribution({1.0, 0.0, 0.0}), 1) == 0.0);
  CHECK(exact_lg(CellDistribution({0.0, 1.0, 0.0}), 5) == 0.0);
}

TEST_CASE("LG at n = 0 is (k-1)/k") {
  Rng rng = derive_stream(1, {});
  for (int k : {2, 3, 5, 10}) {
    for (int i = 0; i < 20; ++i) {
      CHECK(std::abs(exact_lg(random_cells(k, rng), 0) - (k - 1.0) / k) <= 1e-12);
    }
  }
}

TEST_CASE("LR") {
  const CellDistribution cells({0.9, 0.1});
  CHECK(std::abs(exact_lr(cells, 1, kBinary) - 0.34) <= 1e-12);

  const CellDistribution flat({1.0 / 3, 1.0 / 3, 1.0 / 3});
  const auto p3 = WrapperParams::standard(3);
  for (std::size_t n = 1; n < 12; ++n) {
    CHECK(std::abs(exact_lg(flat, n) - 2.0 / 3.0) <= 1e-12);
    CHECK(std::abs(exact_lr(flat, n, p3) - 2.0 / 3.0) <= 1e-12);
  }

  for (std::size_t n : {100u, 400u, 1600u}) {
    const double lg = exact_lg(cells, n);
    const double lr = exact_lr(cells, n, kBinary);
    CHECK(std::abs(lr - lg) <= kBinary.eta(n) * std::abs(0.5 - lg) + 1e-15);
  }
  auto no_noise = kBinary;
  no_noise.eta_override = [](std::size_t) { return 0.0; };
  CHECK(exact_lr(cells, 7, no_noise) == exact_lg(cells, 7));
  CHECK_THROWS_AS(exact_lr(cells, 0, kBinary), Error);
}

TEST_CASE("count-vector enumeration") {
  const std::vector<double> p = {0.2, 0.3, 0.5};
  for (int n = 0; n < 8; ++n) {
    double total = 0.0;
    std::size_t count = 0;
    for_each_count_vector(p, n, 1000, [&](std::span<const std::int64_t> c, double w) {
      CHECK(std::accumulate(c.begin(), c.end(), std::int64_t{0}) == n);
      total += w;
      ++count;
    });
    CHECK(count == static_cast<std::size_t>(binom(n + 2, 2)));
    CHECK(std::abs(total - 1.0) <= 1e-14);
  }
  std::size_t count = 0;
  for_each_count_vector(std::vector<double>{0.5, 0.0, 0.5}, 4, 1000,
                        [&](std::span<const std::int64_t> c, double) {
                          CHECK(c[1] == 0);
                          ++count;
                        });
  CHECK(count == 5);
  CHECK_THROWS_AS(exact_lg(CellDistribution({0.2, 0.3, 0.5}), 200, 100), Error);
}

TEST_CASE("count vectors agree with raw sequences") {
  Rng rng = derive_stream(2, {});
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + static_cast<int>(uniform_index(rng, 3));
    const auto cells = random_cells(k, rng);
    const std::vector<double> p(cells.probabilities().begin(), cells.probabilities().end());
    for (int n = 0; n <= 6; ++n) {
      CHECK(std::abs(exact_lg(cells, n) - reference::lg_by_sequences(p, n)) <= 1e-12);
    }
  }
}

TEST_CASE("LG bounds and LR gaps between sizes") {
  Rng rng = derive_stream(3, {});
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 2 + static_cast<int>(uniform_index(rng, 3));
    const auto cells = random_cells(k, rng);
    const auto params = WrapperParams::standard(k);
    const double alpha = params.alpha();
    double min_q = 1.0;
    for (int j = 0; j < k; ++j) min_q = std::min(min_q, cells.q(j));
    for (std::size_t n = 1; n <= 8; ++n) {
      const double lg = exact_lg(cells, n);
      CHECK(lg >= min_q - 1e-12);
      CHECK(lg - min_q <= 2.0 * exact_expected_max_gap(cells, n) + 1e-12);
      for (std::size_t m = n; m <= 8; ++m) {
        const double lg_m = exact_lg(cells, m);
        const double lhs = exact_lr(cells, n, params) - exact_lr(cells, m, params);
        const double rhs = (params.eta(n) - params.eta(m)) * (alpha - lg_m);
        CHECK(lhs >= rhs - 1e-12);
      }
    }
  }
}

TEST_CASE("update probability") {
  SUBCASE("candidate perfect, current split evenly, eps = 1/2") {
    const JointCellDistribution joint(2, {0.5, 0.0, 0.5, 0.0});
    auto p = kBinary;
    p.epsilon_override = [](std::size_t) { return 0.5; };
    // Only the balanced outcome reaches the margin, and reaching it switches.
    CHECK(std::abs(exact_update_prob(joint, 2, p) - 0.5) <= 1e-15);
    CHECK(std::abs(reference::update_prob_by_sequences({0.5, 0.0, 0.5, 0.0}, 2, 2, 0.5) - 0.5) <= 1e-15);
  }
  SUBCASE("identical classes never switch") {
    const auto d = named(2, {{0, 0, 0.3}, {0, 1, 0.2}, {1, 1, 0.5}});
    const auto h = Hypothesis::table({0, 0}, 2);
    const auto joint = JointCellDistribution::from(h, h.shifted(1), d);
    for (std::size_t n = 1; n < 20; ++n) CHECK(exact_update_prob(joint, n, kBinary) == 0.0);
    auto p = kBinary;
    p.epsilon_override = [](std::size_t) { return 1e-9; };
    for (std::size_t n = 1; n < 20; ++n) CHECK(exact_update_prob(joint, n, p) == 0.0);
  }
  SUBCASE("n = 4 against all 4^4 joint sequences") {
    Rng rng = derive_stream(4, {});
    for (int trial = 0; trial < 30; ++trial) {
      const auto raw = random_cells(4, rng);
      const std::vector<double> r(raw.probabilities().begin(), raw.probabilities().end());
      const JointCellDistribution joint(2, r);
      for (double eps : {0.1, 0.25, 0.5, 0.75, kBinary.epsilon(4)}) {
        auto p = kBinary;
        p.epsilon_override = [eps](std::size_t) { return eps; };
        CHECK(std::abs(exact_update_prob(joint, 4, p) -
                       reference::update_prob_by_sequences(r, 2, 4, eps)) <= 1e-12);
      }
    }
  }
  SUBCASE("k = 3 against raw sequences") {
    Rng rng = derive_stream(5, {});
    for (int trial = 0; trial < 10; ++trial) {
      const auto raw = random_cells(9, rng);
      const std::vector<double> r(raw.probabilities().begin(), raw.probabilities().end());
      auto p = WrapperParams::standard(3);
      p.epsilon_override = [](std::size_t) { return 1.0 / 3.0; };
      CHECK(std::abs(exact_update_prob(JointCellDistribution(3, r), 3, p) -
                     reference::update_prob_by_sequences(r, 3, 3, 1.0 / 3.0)) <= 1e-12);
    }
  }
  SUBCASE("symmetric under relabeling the cells of either class") {
    Rng rng = derive_stream(6, {});
    for (int trial = 0; trial < 20; ++trial) {
      const int k = 3;
      const auto raw = random_cells(k * k, rng);
      const std::vector<double> r(raw.probabilities().begin(), raw.probabilities().end());
      std::vector<int> rows = {0, 1, 2}, cols = {0, 1, 2};
      for (int s = 0; s < trial % 6; ++s) std::next_permutation(rows.begin(), rows.end());
      for (int s = 0; s < (trial / 2) % 6; ++s) std::next_permutation(cols.begin(), cols.end());
      std::vector<double> permuted(r.size());
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) permuted[rows[i] * k + cols[j]] = r[i * k + j];
      }
      auto p = WrapperParams::standard(k);
      p.epsilon_override = [](std::size_t) { return 0.2; };
      for (std::size_t n : {2u, 5u}) {
        CHECK(std::abs(exact_update_prob(JointCellDistribution(k, r), n, p) -
                       exact_update_prob(JointCellDistribution(k, permuted), n, p)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("joint cells") {
  const auto d = named(3, {{0, 0, 0.25}, {0, 1, 0.25}, {1, 2, 0.5}});
  const auto h0 = Hypothesis::table({0, 0}, 3);
  const auto h1 = Hypothesis::table({1, 2}, 3);
  const auto joint = JointCellDistribution::from(h0, h1, d);
  const auto c0 = CellDistribution::from(h0, d);
  const auto c1 = CellDistribution::from(h1, d);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(joint.current_cells().p(j) - c0.p(j)) <= 1e-15);
    CHECK(std::abs(joint.candidate_cells().p(j) - c1.p(j)) <= 1e-15);
    CHECK(std::abs(c0.q(j) - population_loss(h0.shifted(j), d)) <= 1e-15);
  }
  CHECK_THROWS_AS(JointCellDistribution(2, {0.5, 0.5}), Error);
  CHECK_THROWS_AS(CellDistribution({0.5, 0.6}), Error);
  CHECK_THROWS_AS(CellDistribution({1.0}), Error);
}

TEST_CASE("condition C1") {
  const auto d = named(2, {{0, 0, 0.3}, {0, 1, 0.1}, {1, 1, 0.6}});
  const auto h = Hypothesis::table({0, 1}, 2);
  SUBCASE("h1 = h0 compares LR at N = 4n with LR at n") {
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto c = check_c1(h, h, d, n, kBinary);
      const auto cells = CellDistribution::from(h, d);
      CHECK(std::abs(c.lhs - exact_lr(cells, 4 * n, kBinary)) <= 1e-15);
      CHECK(std::abs(c.rhs - exact_lr(cells, n, kBinary)) <= 1e-15);
      CHECK(c.holds);
    }
  }
  SUBCASE("point mass with h0 always right, closed form") {
    const auto point = named(2, {{0, 1, 1.0}});
    const auto right = Hypothesis::constant(1, 2);
    const auto wrong = Hypothesis::constant(0, 2);
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto c = check_c1(right, wrong, point, n, kBinary);
      CHECK(std::abs(c.lhs - 0.5 * kBinary.eta(4 * n)) <= 1e-15);
      CHECK(std::abs(c.rhs - 0.5 * kBinary.eta(n)) <= 1e-15);
      CHECK(c.holds);
    }
  }
}

TEST_CASE("condition C2") {
  const auto d = named(2, {{0, 0, 0.3}, {0, 1, 0.1}, {1, 1, 0.6}});
  const auto h0 = Hypothesis::table({0, 0}, 2);
  const auto h1 = Hypothesis::table({0, 1}, 2);
  for (std::size_t n = 1; n <= 3; ++n) {
    CHECK(kBinary.competitive_cost(n) > 1.0);
    const auto c = check_c2(h0, h1, d, n, kBinary);
    CHECK(c.vacuous);
    CHECK(c.holds);
    CHECK(c.lhs <= 1.0);
  }
  // h0 = h1: LR_n(h1) <= Err(h1) + eta_n + 2 e(n) <= rhs.
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto c = check_c2(h1, h1, d, n, kBinary);
    const double lr = exact_lr(CellDistribution::from(h1, d), n, kBinary);
    CHECK(std::abs(c.lhs - lr) <= 1e-15);
    CHECK(lr <= population_loss(h1, d) + kBinary.eta(n) + 2 * kBinary.uniform_rate(n) + 1e-12);
    CHECK(c.holds);
  }
}

TEST_CASE("update probability bounds") {
  SUBCASE("identical classes are not applicable") {
    const auto d = named(2, {{0, 0, 0.3}, {1, 1, 0.7}});
    const auto h = Hypothesis::table({0, 0}, 2);
    const auto r = lemma1_bound_check(JointCellDistribution::from(h, h.shifted(1), d), 4, kBinary);
    CHECK_FALSE(r.applicable());
    CHECK(r.holds());
  }
  SUBCASE("n = 4 with the candidate worse: p_4 <= 1/4") {
    const auto d = named(2, {{0, 0, 0.5}, {1, 0, 0.5}});
    const auto good = Hypothesis::table({0, 0}, 2);
    const auto bad = Hypothesis::table({0, 1}, 2);
    const auto r = lemma1_bound_check(JointCellDistribution::from(good, bad, d), 4, kBinary);
    CHECK(r.upper_applicable);
    CHECK(r.upper_bound == 0.25);
    CHECK(r.update_prob <= 0.25);
    CHECK(r.holds());
  }
  SUBCASE("lower bound at n = 512 for the maximal gap") {
    const JointCellDistribution joint(2, {0.5, 0.0, 0.5, 0.0});
    const auto r = lemma1_bound_check(joint, 512, kBinary);
    CHECK(r.lower_applicable);
    CHECK(r.update_prob >= r.lower_bound);
    CHECK(r.lower_bound > 0.9);
    CHECK(r.holds());
  }
}

TEST_CASE("LG sweep") {
  Rng rng = derive_stream(7, {});
  for (int k : {2, 3}) {
    const auto rep = lg_monotonicity_sweep(k, 8, 25, rng);
    CHECK(rep.violations == 0);
    CHECK(rep.records.size() == 25 * 8);
    CHECK(rep.max_violation <= 1e-12);
  }
}

TEST_CASE("Chebyshev sum inequality") {
  CHECK(chebyshev_sum_check(std::vector<double>{2, 2, 2}, std::vector<double>{3, 3, 3}));
  CHECK(chebyshev_sum_check(std::vector<double>{0, 1}, std::vector<double>{1, 0}));
  Rng rng = derive_stream(8, {});
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + uniform_index(rng, 10);
    std::vector<double> a(n), b(n);
    for (auto& v : a) v = uniform01(rng);
    for (auto& v : b) v = uniform01(rng);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end(), std::greater<>());
    CHECK(chebyshev_sum_check(a, b));
  }
  CHECK_THROWS_AS(chebyshev_sum_check(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("two routes to the wrapper's expected loss agree") {
  const auto d = named(2, {{0, 0, 0.5}, {1, 1, 0.3}, {1, 0, 0.2}});
  const SabotagedLearner sab(std::make_shared<FiniteErmLearner>(FiniteErmLearner::all_tables(2, 2)));
  for (std::uint64_t m : {0u, 1u, 5u, 9u, 12u, 37u}) {
    if (m == 37) {
      // The structural route enumerates only S_{T-2} (5 examples here).
      CHECK(std::isfinite(exact_monotonize_loss(sab, d, m, kBinary)));
      continue;
    }
    CHECK(std::abs(exact_monotonize_loss(sab, d, m, kBinary) -
                   monotonize_mixture(sab, d, m, kBinary)) <= 1e-12);
  }
  const auto bound = competitive_bound(sab, d, 12, kBinary);
  CHECK(monotonize_mixture(sab, d, 12, kBinary) <= bound.bound() + 1e-12);
  CHECK_THROWS_AS(competitive_bound(sab, d, 8, kBinary), Error);
}

TEST_CASE("corner instances") {
  for (int k : {2, 3}) {
    const auto corners = corner_pair_instances(k);
    CHECK(corners.size() == 6);
    const auto& gap = corners[4];
    const auto cur = CellDistribution::from(gap.h0, gap.dist);
    const auto cand = CellDistribution::from(gap.h1, gap.dist);
    for (int j = 0; j < k; ++j) CHECK(std::abs(cur.p(j) - 1.0 / k) <= 1e-15);
    CHECK(cand.p(0) == 1.0);
  }
}
