#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "strength/error.hpp"

namespace strength {

using Rng = std::mt19937_64;

// Galois elements of a tower K(√d_1)...(√d_m) with all d_j in K are bitmasks:
// bit j set means √d_j ↦ −√d_j.  Composition is xor.
using GalEl = unsigned;

inline int popcount(unsigned x) { return __builtin_popcount(x); }

// ---------------------------------------------------------------- F_p towers

class PrimeTower;

struct PElem {
  const PrimeTower* F = nullptr;
  uint32_t a = 0, b = 0;  // a + b·√d, residues in [0, p)
  bool is_zero() const { return a == 0 && b == 0; }
};

class PrimeTower : public std::enable_shared_from_this<PrimeTower> {
 public:
  using Elem = PElem;
  static constexpr bool kFinite = true;

  // ds are integers read mod p; at most one root can be adjoined since every
  // element of F_p is a square in F_{p^2}.
  static std::shared_ptr<const PrimeTower> make(long p, const std::vector<long>& ds = {});

  uint32_t p() const { return p_; }
  uint32_t d() const { return d_; }
  int height() const { return h_; }
  unsigned group_order() const { return 1u << h_; }
  bool finite() const { return true; }
  uint64_t size() const { return h_ ? uint64_t(p_) * p_ : p_; }
  std::string descriptor() const;
  std::shared_ptr<const PrimeTower> base() const;

  Elem zero() const { return {this, 0, 0}; }
  Elem one() const { return {this, 1, 0}; }
  Elem from_int(long v) const;
  Elem from_ratio(long num, long den) const;
  Elem from_mpq(const mpq_class& v) const;
  Elem root_symbol(const mpz_class& d) const;  // the element written sN
  Elem make_elem(uint32_t a, uint32_t b) const { return {this, a % p_, h_ ? b % p_ : 0}; }
  // Basis element of the flat basis indexed by subsets of levels.
  Elem basis(unsigned S) const;
  Elem component(const Elem& x, unsigned S) const;  // coefficient as a base element
  Elem element(uint64_t idx) const { return {this, uint32_t(idx % p_), uint32_t(idx / p_)}; }
  uint64_t index(const Elem& x) const { return x.a + uint64_t(p_) * x.b; }
  Elem random(Rng& rng) const;
  Elem random_nonzero(Rng& rng) const;

  Elem act(const Elem& x, GalEl g) const;
  Elem conjugate(const Elem& x, int level) const;
  bool fixed_by(const Elem& x, GalEl g) const { return !(g & 1u) || x.b == 0; }
  bool in_level(const Elem& x, int j) const { return j >= h_ || x.b == 0; }
  std::optional<Elem> is_square(const Elem& x) const;
  std::optional<Elem> is_square_in_level(const Elem& x, int j) const;
  std::pair<Elem, Elem> norm_and_trace(const Elem& x, int level) const;

  Elem inv(const Elem& x) const;
  Elem pow(Elem x, uint64_t e) const;

  std::string format(const Elem& x) const;
  Elem parse(const std::string& s) const;
  // Rebuild x (which must lie in the base field) as an element of base().
  Elem to_base(const Elem& x) const;
  Elem from_base(const Elem& x) const { return {this, x.a, x.b}; }
  long balanced(uint32_t r) const { return r > p_ / 2 ? long(r) - long(p_) : long(r); }

  uint32_t p_ = 3, d_ = 0;
  int h_ = 0;
  long d_orig_ = 0;

 private:
  std::shared_ptr<const PrimeTower> base_;
};

inline PElem operator+(const PElem& x, const PElem& y) {
  const PrimeTower* F = x.F ? x.F : y.F;
  if (!F) return {};
  uint32_t p = F->p_;
  uint32_t a = x.a + y.a, b = x.b + y.b;
  if (a >= p) a -= p;
  if (b >= p) b -= p;
  return {F, a, b};
}
inline PElem operator-(const PElem& x) {
  if (!x.F) return {};
  uint32_t p = x.F->p_;
  return {x.F, x.a ? p - x.a : 0, x.b ? p - x.b : 0};
}
inline PElem operator-(const PElem& x, const PElem& y) { return x + (-y); }
inline PElem operator*(const PElem& x, const PElem& y) {
  const PrimeTower* F = x.F ? x.F : y.F;
  if (!F) return {};
  uint64_t p = F->p_;
  if ((x.b | y.b) == 0) return {F, uint32_t(uint64_t(x.a) * y.a % p), 0};
  uint64_t bb = uint64_t(x.b) * y.b % p;
  uint32_t a = uint32_t((uint64_t(x.a) * y.a + F->d_ * bb) % p);
  uint32_t b = uint32_t((uint64_t(x.a) * y.b + uint64_t(x.b) * y.a) % p);
  return {F, a, b};
}
inline bool operator==(const PElem& x, const PElem& y) { return x.a == y.a && x.b == y.b; }
inline bool operator!=(const PElem& x, const PElem& y) { return !(x == y); }
inline PElem inv(const PElem& x) {
  if (!x.F || x.is_zero()) fail("DivisionByZero", "inverse of zero");
  return x.F->inv(x);
}
inline PElem operator/(const PElem& x, const PElem& y) { return x * inv(y); }
inline PElem& operator+=(PElem& x, const PElem& y) { return x = x + y; }
inline PElem& operator-=(PElem& x, const PElem& y) { return x = x - y; }
inline PElem& operator*=(PElem& x, const PElem& y) { return x = x * y; }

// ---------------------------------------------------------------- Q towers

class RationalTower;

struct QElem {
  const RationalTower* F = nullptr;
  std::vector<mpq_class> c;  // flat basis e_S = ∏_{j∈S} √d_j; empty means 0
  bool is_zero() const {
    for (const auto& v : c)
      if (sgn(v) != 0) return false;
    return true;
  }
};

class RationalTower : public std::enable_shared_from_this<RationalTower> {
 public:
  using Elem = QElem;
  static constexpr bool kFinite = false;

  static std::shared_ptr<const RationalTower> make(const std::vector<mpq_class>& ds = {});

  int height() const { return h_; }
  unsigned group_order() const { return 1u << h_; }
  bool finite() const { return false; }
  uint64_t size() const { return 0; }
  std::string descriptor() const;
  std::shared_ptr<const RationalTower> base() const;
  const std::vector<mpq_class>& ds() const { return ds_; }
  // Tower with the given extra roots adjoined on top.
  std::shared_ptr<const RationalTower> extend(const std::vector<mpq_class>& more) const;

  Elem zero() const;
  Elem one() const;
  Elem from_int(long v) const;
  Elem from_ratio(long num, long den) const;
  Elem from_mpq(const mpq_class& v) const;
  Elem root_symbol(const mpz_class& d) const;
  Elem basis(unsigned S) const;
  Elem component(const Elem& x, unsigned S) const;
  Elem element(uint64_t) const { fail("UnsupportedExactOverRationals", "enumeration of Q"); }
  uint64_t index(const Elem&) const { fail("UnsupportedExactOverRationals", "enumeration of Q"); }
  Elem random(Rng& rng) const;
  Elem random_nonzero(Rng& rng) const;

  Elem act(const Elem& x, GalEl g) const;
  Elem conjugate(const Elem& x, int level) const;
  bool fixed_by(const Elem& x, GalEl g) const;
  bool in_level(const Elem& x, int j) const;
  std::optional<Elem> is_square(const Elem& x) const;
  std::optional<Elem> is_square_in_level(const Elem& x, int j) const;
  std::pair<Elem, Elem> norm_and_trace(const Elem& x, int level) const;

  Elem add(const Elem& x, const Elem& y) const;
  Elem sub(const Elem& x, const Elem& y) const;
  Elem neg(const Elem& x) const;
  Elem mul(const Elem& x, const Elem& y) const;
  Elem inv(const Elem& x) const;
  bool eq(const Elem& x, const Elem& y) const;

  std::string format(const Elem& x) const;
  Elem parse(const std::string& s) const;
  Elem to_base(const Elem& x) const;
  Elem from_base(const Elem& x) const;
  // Element of a smaller tower sharing the first levels, embedded here.
  Elem embed(const Elem& x) const;

  std::vector<mpq_class> ds_;
  std::vector<mpq_class> dprod_;  // dprod_[S] = ∏_{j∈S} d_j
  int h_ = 0;

 private:
  std::shared_ptr<const RationalTower> base_;
};

inline const RationalTower* pick(const QElem& x, const QElem& y) { return x.F ? x.F : y.F; }
inline QElem operator+(const QElem& x, const QElem& y) {
  auto F = pick(x, y);
  return F ? F->add(x, y) : QElem{};
}
inline QElem operator-(const QElem& x, const QElem& y) {
  auto F = pick(x, y);
  return F ? F->sub(x, y) : QElem{};
}
inline QElem operator-(const QElem& x) { return x.F ? x.F->neg(x) : QElem{}; }
inline QElem operator*(const QElem& x, const QElem& y) {
  auto F = pick(x, y);
  return F ? F->mul(x, y) : QElem{};
}
inline bool operator==(const QElem& x, const QElem& y) {
  auto F = pick(x, y);
  return F ? F->eq(x, y) : true;
}
inline bool operator!=(const QElem& x, const QElem& y) { return !(x == y); }
inline QElem inv(const QElem& x) {
  if (!x.F || x.is_zero()) fail("DivisionByZero", "inverse of zero");
  return x.F->inv(x);
}
inline QElem operator/(const QElem& x, const QElem& y) { return x * inv(y); }
inline QElem& operator+=(QElem& x, const QElem& y) { return x = x + y; }
inline QElem& operator-=(QElem& x, const QElem& y) { return x = x - y; }
inline QElem& operator*=(QElem& x, const QElem& y) { return x = x * y; }

// ---------------------------------------------------------------- descriptors

using AnyTower = std::variant<std::shared_ptr<const PrimeTower>, std::shared_ptr<const RationalTower>>;

// `F3`, `F7(s3)`, `Q`, `Q(s2)(s3)`, `Q(s-1)`.
AnyTower parse_field(const std::string& text);
std::string descriptor(const AnyTower& t);

// Generic exponentiation usable by templates.
template <class F>
typename F::Elem power(const F& K, typename F::Elem x, uint64_t e) {
  typename F::Elem r = K.one();
  while (e) {
    if (e & 1) r = r * x;
    x = x * x;
    e >>= 1;
  }
  return r;
}

}  // namespace strength
