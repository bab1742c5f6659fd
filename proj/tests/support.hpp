#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "monowrap/core.hpp"

namespace testing {

// Distribution over named points "x0", "x1", ... from (point index, label, p).
inline monowrap::DiscreteDistribution named(int k,
                                            const std::vector<std::tuple<int, int, double>>& atoms,
                                            int domain_size = -1) {
  monowrap::Domain domain;
  int d = domain_size;
  for (const auto& [x, y, p] : atoms) d = std::max(d, x + 1);
  for (int x = 0; x < d; ++x) domain.intern("x" + std::to_string(x));
  std::vector<monowrap::WeightedExample> support;
  for (const auto& [x, y, p] : atoms) {
    support.push_back({{monowrap::PointId{static_cast<std::uint32_t>(x)}, y}, p});
  }
  return monowrap::DiscreteDistribution(k, std::move(support), std::move(domain));
}

inline monowrap::Example ex(int x, int y) {
  return {monowrap::PointId{static_cast<std::uint32_t>(x)}, y};
}

inline monowrap::Example at(std::vector<double> coords, int y) {
  return {monowrap::EuclideanPoint{std::move(coords)}, y};
}

inline double to_double(const monowrap::Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace testing
