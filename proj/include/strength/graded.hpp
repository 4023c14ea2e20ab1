#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "strength/enumerate.hpp"
#include "strength/quadform.hpp"

namespace strength {

inline constexpr size_t kInfinity = std::numeric_limits<size_t>::max();

// ---------------------------------------------------------------- graded spans

template <class F>
struct GradedSpan {
  int n = 0, d = 0;
  Mat<F> basis;  // RREF rows over the degree-d monomials
  std::vector<size_t> piv;
  size_t dim() const { return piv.size(); }
};

template <class F>
std::vector<Poly<F>> degree_products(const F& K, const std::vector<Poly<F>>& gens, int n, int d,
                                     std::vector<std::pair<size_t, size_t>>* origin = nullptr) {
  std::vector<Poly<F>> out;
  for (size_t g = 0; g < gens.size(); ++g) {
    if (gens[g].d > d) continue;
    const auto& M = monomials(n, d - gens[g].d);
    for (size_t m = 0; m < M.N; ++m) {
      Poly<F> mono(K, n, d - gens[g].d);
      mono.c[m] = K.one();
      out.push_back(mono * gens[g]);
      if (origin) origin->push_back({g, m});
    }
  }
  return out;
}

template <class F>
GradedSpan<F> degree_span(const F& K, const std::vector<Poly<F>>& gens, int n, int d) {
  GradedSpan<F> S;
  S.n = n;
  S.d = d;
  auto prods = degree_products(K, gens, n, d);
  size_t N = monomials(n, d).N;
  Mat<F> M(K, prods.size(), N);
  for (size_t i = 0; i < prods.size(); ++i) M.set_row(i, prods[i].c);
  auto pv = rref(M);
  S.basis = Mat<F>(K, pv.size(), N);
  for (size_t i = 0; i < pv.size(); ++i)
    for (size_t j = 0; j < N; ++j) S.basis(i, j) = M(i, j);
  S.piv = pv;
  return S;
}

template <class F>
struct Membership {
  bool member = false;
  std::vector<Poly<F>> multipliers;  // f = sum multipliers[i] * gens[i]
};

// Dense membership test in the degree of f.  Linear-only generator sets use
// the division algorithm, which scales to large n.
template <class F>
Membership<F> contains(const Poly<F>& f, const std::vector<Poly<F>>& gens) {
  const F& K = *f.K;
  Membership<F> R;
  bool all_linear = true;
  for (auto& g : gens) all_linear = all_linear && g.d == 1;
  if (all_linear) {
    std::vector<std::vector<typename F::Elem>> rows;
    for (auto& g : gens) rows.push_back(g.c);
    auto P = LinSubspace<F>::span(K, f.n, rows);
    auto red = reduce_mod(f, P);
    if (!red.remainder.is_zero()) return R;
    // express the RREF basis in terms of the generators
    Mat<F> G = from_rows(K, rows, f.n);
    std::vector<Poly<F>> mult(gens.size(), Poly<F>(K, f.n, std::max(f.d - 1, 0)));
    for (size_t i = 0; i < P.dim(); ++i) {
      auto c = solve(G.transpose(), P.basis(i));
      for (size_t g = 0; g < gens.size(); ++g) add_scaled(mult[g], (*c)[g], red.quotients[i]);
    }
    R.member = true;
    R.multipliers = std::move(mult);
    return R;
  }
  std::vector<std::pair<size_t, size_t>> origin;
  auto prods = degree_products(K, gens, f.n, f.d, &origin);
  size_t N = f.c.size();
  Mat<F> A(K, N, prods.size());
  for (size_t j = 0; j < prods.size(); ++j) A.set_col(j, prods[j].c);
  auto x = solve(A, f.c);
  if (!x) return R;
  R.member = true;
  for (auto& g : gens) R.multipliers.emplace_back(K, f.n, std::max(f.d - g.d, 0));
  for (size_t j = 0; j < prods.size(); ++j) R.multipliers[origin[j].first].c[origin[j].second] += (*x)[j];
  return R;
}

// ---------------------------------------------------------------- quotients

template <class F>
Poly<F> reduce_mod_linear(const Poly<F>& f, const LinSubspace<F>& P) {
  auto r = reduce_mod(f, P, false).remainder;
  return restrict_vars(r, P.free_vars());
}

// q − sum c_j gens_j ∈ (L) for some c; returns c.
template <class F>
std::optional<std::vector<typename F::Elem>> quad_in_span_mod(const Poly<F>& q, const std::vector<Poly<F>>& gens,
                                                               const LinSubspace<F>& L) {
  const F& K = *q.K;
  auto rq = reduce_mod(q, L, false).remainder;
  if (gens.empty()) {
    if (rq.is_zero()) return std::vector<typename F::Elem>{};
    return std::nullopt;
  }
  Mat<F> A(K, rq.c.size(), gens.size());
  for (size_t j = 0; j < gens.size(); ++j) A.set_col(j, reduce_mod(gens[j], L, false).remainder.c);
  return solve(A, rq.c);
}

// ---------------------------------------------------------------- pencils

template <class F>
struct MinReport {
  size_t value = kInfinity;
  std::vector<typename F::Elem> coeffs;  // over the listed quadrics, then Q
  bool exact = true;
  uint64_t evaluated = 0;
};

template <class F>
std::vector<Mat<F>> grams_mod(const std::vector<Poly<F>>& qs, const LinSubspace<F>* L) {
  std::vector<Mat<F>> out;
  for (auto& q : qs) out.push_back(gram(L && L->dim() ? reduce_mod_linear(q, *L) : q));
  return out;
}

template <class F>
Mat<F> combine(const std::vector<Mat<F>>& G, const std::vector<typename F::Elem>& c) {
  Mat<F> S(*G[0].K, G[0].rows, G[0].cols);
  for (size_t k = 0; k < G.size(); ++k) {
    if (c[k].is_zero()) continue;
    for (size_t i = 0; i < S.a.size(); ++i)
      if (!G[k].a[i].is_zero()) S.a[i] += c[k] * G[k].a[i];
  }
  return S;
}

template <class F>
Poly<F> combine(const std::vector<Poly<F>>& qs, const std::vector<typename F::Elem>& c) {
  Poly<F> S(*qs[0].K, qs[0].n, qs[0].d);
  for (size_t k = 0; k < qs.size(); ++k) add_scaled(S, c[k], qs[k]);
  return S;
}

// Visits coefficient vectors: every projective point over finite fields, a
// deterministic sample over Q (report flagged as upper bound).
template <class F>
void for_each_combo(const F& K, size_t k, Budget& budget, bool& exact,
                    const std::function<bool(const std::vector<typename F::Elem>&)>& cb) {
  using E = typename F::Elem;
  if (k == 0) return;
  if (K.finite()) {
    budget.charge(uint64_t(count_projective(K.size(), k)), "coefficient enumeration");
    exact = true;
    for_each_projective<F>(K, k, cb);
    return;
  }
  exact = false;
  std::vector<E> v(k, K.zero());
  for (size_t i = 0; i < k; ++i) {
    std::fill(v.begin(), v.end(), K.zero());
    v[i] = K.one();
    if (!cb(v)) return;
  }
  for (size_t i = 0; i < k; ++i)
    for (size_t j = i + 1; j < k; ++j)
      for (long s : {1L, -1L, 2L, -2L}) {
        std::fill(v.begin(), v.end(), K.zero());
        v[i] = K.one();
        v[j] = K.from_int(s);
        if (!cb(v)) return;
      }
  Rng rng(0x5eed);
  std::uniform_int_distribution<long> u(-3, 3);
  for (int t = 0; t < 400; ++t) {
    for (auto& x : v) x = K.from_int(u(rng));
    if (all_zero(v)) continue;
    if (!cb(v)) return;
  }
}

template <class F>
MinReport<F> pencil_min_rank(const std::vector<Poly<F>>& qs, Budget& budget) {
  MinReport<F> R;
  if (qs.empty()) return R;
  const F& K = *qs[0].K;
  auto G = grams_mod<F>(qs, nullptr);
  for_each_combo<F>(K, qs.size(), budget, R.exact, [&](const auto& c) {
    ++R.evaluated;
    size_t rk = rank(combine(G, c));
    if (rk < R.value) {
      R.value = rk;
      R.coeffs = c;
    }
    return R.value > 0;
  });
  return R;
}

// Rank of q minus its Witt index over K: the dimension of the smallest L
// with q ∈ (L) that K itself provides.
template <class F>
size_t kexact_slice_dim(const Mat<F>& G) {
  auto S = hyperbolic_split(G);
  return rank(G) - S.planes.size();
}

// min over nonzero (c, w) of srk(sum c_i q_i + sum w_j Q_j), computed modulo
// L when given.  With kexact the value is the K-exact witness dimension.
template <class F>
MinReport<F> min_slice_rank(const std::vector<Poly<F>>& qs, const std::vector<Poly<F>>& Q, Budget& budget,
                            const LinSubspace<F>* L = nullptr, bool kexact = false) {
  MinReport<F> R;
  std::vector<Poly<F>> all = qs;
  all.insert(all.end(), Q.begin(), Q.end());
  if (all.empty()) return R;
  const F& K = *all[0].K;
  auto G = grams_mod<F>(all, L);
  for_each_combo<F>(K, all.size(), budget, R.exact, [&](const auto& c) {
    ++R.evaluated;
    auto S = combine(G, c);
    size_t v = kexact ? kexact_slice_dim(S) : srk_from_rank(rank(S));
    if (v < R.value) {
      R.value = v;
      R.coeffs = c;
    }
    return R.value > 0;
  });
  return R;
}

// srk(Q) >= dim Q + dim L + 1 (the empty Q satisfies it vacuously).
template <class F>
bool prime_criterion_hypothesis(const std::vector<Poly<F>>& Q, const LinSubspace<F>& L, Budget& budget) {
  if (Q.empty()) return true;
  auto R = min_slice_rank<F>({}, Q, budget);
  return R.value >= Q.size() + L.dim() + 1;
}

}  // namespace strength
