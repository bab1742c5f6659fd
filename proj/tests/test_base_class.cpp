#include "doctest.h"

#include <cmath>
#include <map>

#include "monowrap/base_class.hpp"
#include "support.hpp"

using namespace monowrap;
using testing::ex;
using testing::named;

TEST_CASE("binary base class is {h, 1-h}") {
  const auto h = Hypothesis::table({0, 1, 1, 0}, 2);
  const auto b = build_base_class(h, 2);
  REQUIRE(b.size() == 2);
  for (std::uint32_t x = 0; x < 4; ++x) {
    CHECK(b.member(0)(PointId{x}) == h(PointId{x}));
    CHECK(b.member(1)(PointId{x}) == 1 - h(PointId{x}));
  }
}

TEST_CASE("k=3 shifts of a constant") {
  const auto b = build_base_class(Hypothesis::table({1}, 3), 3);
  CHECK(b.member(0)(PointId{0}) == 1);
  CHECK(b.member(1)(PointId{0}) == 2);
  CHECK(b.member(2)(PointId{0}) == 0);
}

TEST_CASE("member 0 is h and exactly one member is right on every example") {
  for (int k = 2; k <= 6; ++k) {
    std::vector<Label> t;
    for (int x = 0; x < 5; ++x) t.push_back((3 * x + 1) % k);
    const auto h = Hypothesis::table(t, k);
    const auto b = build_base_class(h, k);
    for (std::uint32_t x = 0; x < 5; ++x) {
      CHECK(b.member(0)(PointId{x}) == h(PointId{x}));
      for (int y = 0; y < k; ++y) {
        int right = 0;
        for (int i = 0; i < k; ++i) right += b.member(i)(PointId{x}) == y ? 1 : 0;
        CHECK(right == 1);
        CHECK(b.member(b.correct_member(ex(static_cast<int>(x), y)))(PointId{x}) == y);
      }
    }
  }
}

TEST_CASE("the base class of a shift is the same set of functions") {
  const int k = 4;
  const auto h = Hypothesis::table({0, 3, 1}, k);
  const std::vector<Point> pts = {PointId{0}, PointId{1}, PointId{2}};
  const auto b = build_base_class(h, k);
  for (int s = 0; s < k; ++s) {
    const auto bs = build_base_class(h.shifted(s), k);
    for (int i = 0; i < k; ++i) {
      int matches = 0;
      for (int j = 0; j < k; ++j) matches += agree_on(bs.member(i), b.member(j), pts) ? 1 : 0;
      CHECK(matches == 1);
    }
  }
}

TEST_CASE("invalid arity") {
  CHECK_THROWS_AS(build_base_class(Hypothesis::constant(0, 2), 1), Error);
  CHECK_THROWS_AS(build_base_class(Hypothesis::constant(0, 2), 3), Error);
}

TEST_CASE("ERM sets") {
  const auto h = Hypothesis::table({0, 1}, 2);
  SUBCASE("all correct for h") {
    const auto r = erm_set(BaseClass(h, 2), Sample{ex(0, 0), ex(1, 1), ex(0, 0)});
    CHECK(r.minimizers == std::vector<int>{0});
    CHECK(r.min_empirical_loss == Rational(0));
  }
  SUBCASE("one each") {
    const auto r = erm_set(BaseClass(h, 2), Sample{ex(0, 0), ex(0, 1)});
    CHECK(r.minimizers == std::vector<int>{0, 1});
    CHECK(r.min_empirical_loss == Rational(1, 2));
  }
  SUBCASE("k=3, both correct for member 2") {
    const auto g = Hypothesis::table({0, 1}, 3);
    const auto r = erm_set(BaseClass(g, 3), Sample{ex(0, 2), ex(1, 0)});
    CHECK(r.minimizers == std::vector<int>{2});
    CHECK(r.min_empirical_loss == Rational(0));
  }
  CHECK_THROWS_AS(erm_set(BaseClass(h, 2), Sample{}), Error);
}

TEST_CASE("randomized ERM mixture") {
  const auto d = named(3, {{0, 0, 0.6}, {1, 2, 0.4}});
  const auto h = Hypothesis::table({0, 1}, 3);
  SUBCASE("empty sample is uniform with loss (k-1)/k") {
    const auto m = randomized_erm_mixture(h, {}, 3);
    CHECK(m.size() == 3);
    CHECK(std::abs(mixture_loss(m, d) - 2.0 / 3.0) <= 1e-15);
  }
  SUBCASE("singleton set") {
    const auto m = randomized_erm_mixture(h, Sample{ex(0, 0)}, 3);
    REQUIRE(m.size() == 1);
    CHECK(m.atoms()[0].weight == 1.0);
    CHECK(m.atoms()[0].hypothesis(PointId{0}) == 0);
  }
  SUBCASE("binary two-way tie loses 1/2") {
    const auto d2 = named(2, {{0, 0, 0.9}, {1, 0, 0.1}});
    const auto g = Hypothesis::table({0, 0}, 2);
    const auto m = randomized_erm_mixture(g, Sample{ex(0, 0), ex(1, 1)}, 2);
    CHECK(m.size() == 2);
    CHECK(mixture_loss(m, d2) == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("randomized ERM draws") {
  const auto h = Hypothesis::table({0, 1}, 3);
  SUBCASE("singleton set needs no coin") {
    Rng rng = derive_stream(1, {});
    Rng untouched = derive_stream(1, {});
    const auto g = randomized_erm(h, Sample{ex(0, 0)}, 3, rng);
    CHECK(g.shift() == 0);
    CHECK(rng == untouched);
  }
  SUBCASE("frequencies match the mixture weights") {
    const Sample tie = {ex(0, 0), ex(0, 1), ex(0, 2)};
    for (const auto& s : {Sample{}, tie}) {
      Rng rng = derive_stream(2, {s.size()});
      const int n = 30000;
      std::map<int, int> counts;
      for (int i = 0; i < n; ++i) ++counts[randomized_erm(h, s, 3, rng).shift()];
      const auto mix = randomized_erm_mixture(h, s, 3);
      for (const auto& a : mix.atoms()) {
        const double p = a.weight;
        const double se = std::sqrt(p * (1 - p) / n);
        CHECK(std::abs(counts[a.hypothesis.shift()] / double(n) - p) <= 3 * se);
      }
    }
  }
  SUBCASE("binary empty sample is a fair coin") {
    const auto g = Hypothesis::constant(0, 2);
    Rng rng = derive_stream(3, {});
    const int n = 40000;
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += randomized_erm(g, {}, 2, rng).shift();
    CHECK(std::abs(ones / double(n) - 0.5) <= 3 * std::sqrt(0.25 / n));
  }
}

TEST_CASE("uniform convergence gap") {
  const auto point = named(2, {{0, 1, 1.0}});
  const auto h = Hypothesis::constant(0, 2);
  const BaseClass b(h, 2);
  CHECK(uniform_convergence_gap(b, point, Sample{ex(0, 1), ex(0, 1)}) == 0.0);

  const auto d = named(2, {{0, 0, 0.3}, {1, 1, 0.5}, {1, 0, 0.2}});
  const Sample s = {ex(0, 0), ex(1, 1), ex(1, 1)};
  const double both = uniform_convergence_gap(b, d, s);
  const double h_gap = std::abs(testing::to_double(empirical_loss(h, s)) - population_loss(h, d));
  const auto g = h.shifted(1);
  const double g_gap = std::abs(testing::to_double(empirical_loss(g, s)) - population_loss(g, d));
  CHECK(std::abs(h_gap - g_gap) <= 1e-15);
  CHECK(std::abs(both - h_gap) <= 1e-15);

  Rng rng = derive_stream(11, {});
  for (int i = 0; i < 100; ++i) {
    const Sample r = sample_iid(d, 1 + uniform_index(rng, 10), rng);
    CHECK(uniform_convergence_gap(b, d, r) <= 1.0);
  }
  CHECK_THROWS_AS(uniform_convergence_gap(b, d, Sample{}), Error);
}

TEST_CASE("Monte Carlo max-gap stays under the uniform convergence rate") {
  for (int k : {2, 3, 5}) {
    std::vector<std::tuple<int, int, double>> atoms;
    for (int x = 0; x < 3; ++x) {
      for (int y = 0; y < k; ++y) atoms.emplace_back(x, y, 1.0 / (3.0 * k));
    }
    const auto d = named(k, atoms);
    const BaseClass b(Hypothesis::table({0, 1 % k, 2 % k}, k), k);
    const double c = k == 2 ? 1.0 : 36.0;
    for (std::size_t n : {4u, 16u, 64u}) {
      Rng rng = derive_stream(13, {static_cast<std::uint64_t>(k), n});
      const int trials = 4000;
      double sum = 0.0, sq = 0.0;
      for (int t = 0; t < trials; ++t) {
        const double g = uniform_convergence_gap(b, d, sample_iid(d, n, rng));
        sum += g;
        sq += g * g;
      }
      const double mean = sum / trials;
      const double se = std::sqrt((sq / trials - mean * mean) / trials);
      CHECK(mean - 3 * se <= c / std::sqrt(static_cast<double>(n)));
    }
  }
}
