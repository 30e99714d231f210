#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "colts/error.hpp"
#include "colts/pattern.hpp"

namespace testing {

inline bool rel_close(double got, double want, double tol) {
  return std::fabs(got - want) <= tol * std::max(std::fabs(want), 1e-300);
}

inline double curve(double a, double b, double c, double x) { return c - a * std::pow(x, -b); }

inline std::vector<colts::Observation> sample(double a, double b, double c,
                                              const std::vector<std::uint64_t>& xs,
                                              double noise = 0.0, std::uint64_t seed = 0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> eps(-noise, noise);
  std::vector<colts::Observation> out;
  for (auto x : xs) {
    const double e = noise > 0.0 ? eps(gen) : 0.0;
    out.push_back({x, curve(a, b, c, static_cast<double>(x)) + e});
  }
  return out;
}

inline std::vector<std::uint64_t> arithmetic(std::uint64_t first, std::uint64_t step, std::size_t n) {
  std::vector<std::uint64_t> xs;
  for (std::size_t i = 0; i < n; ++i) xs.push_back(first + step * i);
  return xs;
}

template <class F>
colts::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const colts::Error& e) {
    return e.code();
  }
  return static_cast<colts::ErrorCode>(0);
}

}  // namespace testing
