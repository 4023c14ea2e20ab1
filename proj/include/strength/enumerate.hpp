#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "strength/matrix.hpp"

namespace strength {

inline constexpr uint64_t kDefaultBudget = 10'000'000;

struct Budget {
  uint64_t limit = kDefaultBudget;
  uint64_t spent = 0;

  explicit Budget(uint64_t l = kDefaultBudget) : limit(l) {}
  void charge(uint64_t k, const char* what = "search") {
    spent += k;
    if (spent > limit) fail("BudgetExceeded", std::string(what) + " exceeded the budget of " + std::to_string(limit));
  }
  bool affords(long double k) const { return (long double)spent + k <= (long double)limit; }
};

inline long double count_vectors(uint64_t q, size_t k) {
  long double t = 1;
  for (size_t i = 0; i < k; ++i) t *= (long double)q;
  return t;
}

inline long double count_projective(uint64_t q, size_t k) {
  return k == 0 ? 0 : (count_vectors(q, k) - 1) / (long double)(q - 1);
}

// Gaussian binomial [n, k]_q
inline long double count_subspaces(uint64_t q, size_t n, size_t k) {
  if (k > n) return 0;
  long double r = 1;
  for (size_t i = 0; i < k; ++i) r *= (count_vectors(q, n - i) - 1) / (count_vectors(q, i + 1) - 1);
  return r;
}

// Every vector of K^k (finite K) in lexicographic index order.
template <class F>
void for_each_vector(const F& K, size_t k, const std::function<bool(const std::vector<typename F::Elem>&)>& cb) {
  uint64_t q = K.size();
  std::vector<uint64_t> dg(k, 0);
  std::vector<typename F::Elem> v(k, K.zero());
  while (true) {
    if (!cb(v)) return;
    size_t i = k;
    while (i > 0 && dg[i - 1] == q - 1) {
      dg[--i] = 0;
      v[i] = K.zero();
    }
    if (i == 0) return;
    ++dg[i - 1];
    v[i - 1] = K.element(dg[i - 1]);
  }
}

// One representative per projective point of K^k, first nonzero entry 1.
template <class F>
void for_each_projective(const F& K, size_t k, const std::function<bool(const std::vector<typename F::Elem>&)>& cb) {
  std::vector<typename F::Elem> v(k, K.zero());
  for (size_t lead = 0; lead < k; ++lead) {
    bool stop = false;
    for_each_vector<F>(K, k - lead - 1, [&](const std::vector<typename F::Elem>& tail) {
      for (size_t i = 0; i < k; ++i) v[i] = K.zero();
      v[lead] = K.one();
      for (size_t i = 0; i < tail.size(); ++i) v[lead + 1 + i] = tail[i];
      if (!cb(v)) {
        stop = true;
        return false;
      }
      return true;
    });
    if (stop) return;
  }
}

// Every k-dimensional subspace of K^n as its RREF basis (k x n), ordered by
// pivot set (lexicographic) and then by the free entries.
template <class F>
void for_each_subspace(const F& K, size_t n, size_t k, const std::function<bool(const Mat<F>&)>& cb) {
  if (k > n) return;
  std::vector<size_t> piv(k);
  for (size_t i = 0; i < k; ++i) piv[i] = i;
  while (true) {
    // free slots: row i, columns j > piv[i] that are not pivots
    std::vector<std::pair<size_t, size_t>> slots;
    std::vector<char> isp(n, 0);
    for (auto p : piv) isp[p] = 1;
    for (size_t i = 0; i < k; ++i)
      for (size_t j = piv[i] + 1; j < n; ++j)
        if (!isp[j]) slots.push_back({i, j});
    Mat<F> M(K, k, n);
    for (size_t i = 0; i < k; ++i) M(i, piv[i]) = K.one();
    bool stop = false;
    for_each_vector<F>(K, slots.size(), [&](const std::vector<typename F::Elem>& v) {
      for (size_t s = 0; s < slots.size(); ++s) M(slots[s].first, slots[s].second) = v[s];
      if (!cb(M)) {
        stop = true;
        return false;
      }
      return true;
    });
    if (stop) return;
    // next combination
    if (k == 0) return;
    size_t i = k;
    while (i > 0 && piv[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++piv[i - 1];
    for (size_t j = i; j < k; ++j) piv[j] = piv[j - 1] + 1;
  }
}

}  // namespace strength
