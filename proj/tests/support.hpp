#pragma once

#include <doctest.h>

#include "strength/battery.hpp"

namespace testing_support {

using namespace strength;

inline std::shared_ptr<const PrimeTower> prime(const std::string& d) {
  return std::get<std::shared_ptr<const PrimeTower>>(parse_field(d));
}
inline std::shared_ptr<const RationalTower> rational(const std::string& d) {
  return std::get<std::shared_ptr<const RationalTower>>(parse_field(d));
}

template <class F>
Poly<F> P(const F& K, const std::string& s, int n) {
  return parse_poly(K, s, n);
}

template <class Fn>
std::string error_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace testing_support
