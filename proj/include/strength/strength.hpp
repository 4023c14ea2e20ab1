#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "strength/graded.hpp"

namespace strength {

// ---------------------------------------------------------------- certificates

// f ≡ sum q_i q'_i mod (P), with f − sum q_i q'_i = sum P_i h_i.
template <class F>
struct DecompCert {
  const F* K = nullptr;
  std::string field;
  std::string order = kMonomialOrder;
  Poly<F> f;
  std::vector<std::pair<Poly<F>, Poly<F>>> pairs;
  LinSubspace<F> P;
  std::vector<Poly<F>> residual;  // h_i, one cubic per basis form of P
  size_t r2 = 0, r1 = 0;          // claims

  int n() const { return f.n; }
};

struct Verdict {
  bool ok = false;
  std::string reason;
  explicit operator bool() const { return ok; }
};

template <class F>
Poly<F> residual_of(const DecompCert<F>& c) {
  Poly<F> g = c.f;
  for (auto& [q, qq] : c.pairs) g -= q * qq;
  return g;
}

template <class F>
DecompCert<F> make_cert(const Poly<F>& f, std::vector<std::pair<Poly<F>, Poly<F>>> pairs, const LinSubspace<F>& P) {
  DecompCert<F> c;
  c.K = f.K;
  c.field = f.K->descriptor();
  c.f = f;
  c.pairs = std::move(pairs);
  c.P = P;
  c.r2 = c.pairs.size();
  c.r1 = P.dim();
  auto red = reduce_mod(residual_of(c), P);
  c.residual = std::move(red.quotients);
  return c;
}

template <class F>
Verdict verify_certificate(const DecompCert<F>& c) {
  auto no = [](std::string r) { return Verdict{false, std::move(r)}; };
  if (c.order != kMonomialOrder) return no("MonomialOrderMismatch");
  if (!c.K || c.f.K != c.K) return no("FieldMismatch");
  if (c.field != c.K->descriptor()) return no("FieldMismatch");
  if (c.f.d != 4) return no("NotQuartic");
  for (auto& [q, qq] : c.pairs)
    if (q.d != 2 || qq.d != 2 || q.n != c.n() || qq.n != c.n()) return no("PairNotQuadric");
  if (c.P.n != c.n()) return no("DimensionMismatch");
  {
    Mat<F> M = c.P.rows;
    auto pv = rref(M);
    if (pv != c.P.piv || !(M == c.P.rows)) return no("BasisNotEchelon");
  }
  if (c.pairs.size() > c.r2 || c.P.dim() > c.r1) return no("ClaimTooSmall");
  Poly<F> g = residual_of(c);
  if (!c.residual.empty()) {
    if (c.residual.size() != c.P.dim()) return no("ResidualShape");
    Poly<F> s(*c.K, c.n(), 4);
    auto forms = c.P.forms();
    for (size_t i = 0; i < forms.size(); ++i) {
      if (c.residual[i].d != 3 || c.residual[i].n != c.n()) return no("ResidualShape");
      mul_acc(s, forms[i], c.residual[i]);
    }
    if (!(s == g)) return no("ResidualMismatch");
    return {true, ""};
  }
  if (!in_linear_ideal(g, c.P)) return no("NotInIdeal");
  return {true, ""};
}

// ---------------------------------------------------------------- reports

template <class F>
struct RankReport {
  size_t value = 0;
  bool exact = true;
  uint64_t spent = 0;
  std::optional<LinSubspace<F>> subspace;
  std::optional<DecompCert<F>> cert;
};

// q ∈ (L) for L given by an RREF matrix, via the Gram matrix restricted to V(L).
template <class F>
bool quadric_in_linear(const Mat<F>& G, const Mat<F>& M, const std::vector<size_t>& piv) {
  using E = typename F::Elem;
  const F& K = *G.K;
  size_t n = G.rows;
  std::vector<char> isp(n, 0);
  for (auto p : piv) isp[p] = 1;
  std::vector<std::vector<E>> B;
  for (size_t f = 0; f < n; ++f) {
    if (isp[f]) continue;
    std::vector<E> v(n, K.zero());
    v[f] = K.one();
    for (size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -M(i, f);
    B.push_back(std::move(v));
  }
  std::vector<std::vector<E>> GB;
  for (auto& b : B) GB.push_back(mat_vec(G, b));
  for (size_t i = 0; i < B.size(); ++i)
    for (size_t j = i; j < B.size(); ++j) {
      E s = K.zero();
      for (size_t k = 0; k < n; ++k)
        if (!B[i][k].is_zero()) s += B[i][k] * GB[j][k];
      if (!s.is_zero()) return false;
    }
  return true;
}

template <class F>
LinSubspace<F> subspace_from_rref(const F& K, const Mat<F>& M) {
  LinSubspace<F> P(K, int(M.cols));
  P.rows = M;
  for (size_t i = 0; i < M.rows; ++i)
    for (size_t j = 0; j < M.cols; ++j)
      if (!M(i, j).is_zero()) {
        P.piv.push_back(j);
        break;
      }
  return P;
}

// least r with f ∈ (L), dim L = r, by enumerating subspaces in increasing
// dimension.  Budget exhaustion gives the upper bound n (mode upper-bound).
template <class F>
RankReport<F> slice_rank_exact(const Poly<F>& f, Budget& budget) {
  const F& K = *f.K;
  if (!K.finite()) fail("UnsupportedExactOverRationals", "slice rank enumeration needs a finite field");
  RankReport<F> R;
  if (f.is_zero()) {
    R.value = 0;
    R.subspace = LinSubspace<F>(K, f.n);
    return R;
  }
  std::optional<Mat<F>> G;
  if (f.d == 2) G = gram(f);
  for (size_t k = 1; k <= size_t(f.n); ++k) {
    long double cnt = count_subspaces(K.size(), f.n, k);
    if (!budget.affords(cnt) && k < size_t(f.n)) {
      R.value = f.n;
      R.exact = false;
      std::vector<std::vector<typename F::Elem>> id;
      for (int i = 0; i < f.n; ++i) id.push_back(Poly<F>::var(K, f.n, i).c);
      R.subspace = LinSubspace<F>::span(K, f.n, id);
      R.spent = budget.spent;
      return R;
    }
    bool found = false;
    for_each_subspace<F>(K, f.n, k, [&](const Mat<F>& M) {
      budget.charge(1, "slice rank");
      bool in;
      std::vector<size_t> piv;
      if (G) {
        for (size_t i = 0; i < M.rows; ++i)
          for (size_t j = 0; j < M.cols; ++j)
            if (!M(i, j).is_zero()) {
              piv.push_back(j);
              break;
            }
        in = quadric_in_linear(*G, M, piv);
      } else {
        in = in_linear_ideal(f, subspace_from_rref(K, M));
      }
      if (in) {
        R.value = k;
        R.subspace = subspace_from_rref(K, M);
        found = true;
        return false;
      }
      return true;
    });
    if (found) break;
  }
  R.spent = budget.spent;
  return R;
}

// ---------------------------------------------------------------- refined search

template <class F>
Poly<F> embed_vars(const Poly<F>& p, const std::vector<int>& vars, int n) {
  Poly<F> out(*p.K, n, p.d);
  const auto& M = p.mons();
  const auto& M2 = out.mons();
  std::vector<int> s(p.d);
  for (size_t m = 0; m < M.N; ++m) {
    if (p.c[m].is_zero()) continue;
    for (int k = 0; k < p.d; ++k) s[k] = vars[M.at(m)[k]];
    std::sort(s.begin(), s.end());
    out.c[M2.rank(s.data())] = p.c[m];
  }
  return out;
}

template <class F>
struct RefinedResult {
  std::optional<DecompCert<F>> cert;
  bool exhausted = false;
};

// f ∈ (q_1..q_r2, l_1..l_r1)?  Enumerates L of dimension min(r1, n), then
// r2-dimensional spans of quadrics in the remaining variables.
template <class F>
RefinedResult<F> refined_rank_search(const Poly<F>& f, size_t r2, size_t r1, Budget& budget) {
  const F& K = *f.K;
  if (!K.finite()) fail("UnsupportedExactOverRationals", "refined rank search needs a finite field");
  int n = f.n;
  size_t k = std::min<size_t>(r1, n);
  RefinedResult<F> R;
  size_t m = n - k;
  size_t D = m * (m + 1) / 2;
  size_t qd = std::min(r2, D);
  long double total = count_subspaces(K.size(), n, k) * std::max<long double>(1, count_subspaces(K.size(), D, qd));
  if (!budget.affords(total)) fail("BudgetExceeded", "refined rank search needs about " + std::to_string(double(total)) + " candidates");
  for_each_subspace<F>(K, n, k, [&](const Mat<F>& M) {
    auto L = subspace_from_rref(K, M);
    auto red = reduce_mod(f, L, false).remainder;
    auto vars = L.free_vars();
    if (red.is_zero()) {
      budget.charge(1, "refined rank search");
      R.cert = make_cert<F>(f, {}, L);
      return false;
    }
    if (qd == 0) {
      budget.charge(1, "refined rank search");
      return true;
    }
    auto fr = restrict_vars(red, vars);
    bool done = false;
    for_each_subspace<F>(K, D, qd, [&](const Mat<F>& Qm) {
      budget.charge(1, "refined rank search");
      std::vector<Poly<F>> qs;
      for (size_t i = 0; i < Qm.rows; ++i) {
        Poly<F> q(K, int(m), 2);
        q.c = Qm.row(i);
        qs.push_back(q);
      }
      auto mem = contains(fr, qs);
      if (!mem.member) return true;
      std::vector<std::pair<Poly<F>, Poly<F>>> pairs;
      for (size_t i = 0; i < qs.size(); ++i) {
        if (mem.multipliers[i].is_zero()) continue;
        pairs.push_back({embed_vars(qs[i], vars, n), embed_vars(mem.multipliers[i], vars, n)});
      }
      R.cert = make_cert<F>(f, pairs, L);
      R.cert->r2 = r2;
      R.cert->r1 = r1;
      done = true;
      return false;
    });
    return !done;
  });
  if (R.cert) {
    R.cert->r2 = std::max(R.cert->r2, r2);
    R.cert->r1 = std::max(R.cert->r1, r1);
  }
  R.exhausted = !R.cert;
  return R;
}

// Least r with f = sum g_i h_i (degrees (1,3) or (2,2)); tries every split
// r = r2 + r1 in increasing r.
template <class F>
RankReport<F> schmidt_rank_search(const Poly<F>& f, Budget& budget) {
  RankReport<F> R;
  if (f.d != 4) fail("InputError", "Schmidt rank search is implemented for quartics");
  if (f.is_zero()) {
    R.value = 0;
    R.cert = make_cert<F>(f, {}, LinSubspace<F>(*f.K, f.n));
    return R;
  }
  for (size_t r = 1; r <= size_t(f.n); ++r) {
    for (size_t r2 = 0; r2 <= r; ++r2) {
      RefinedResult<F> res;
      try {
        res = refined_rank_search(f, r2, r - r2, budget);
      } catch (const Error& e) {
        if (e.code() != "BudgetExceeded") throw;
        R.value = f.n;
        R.exact = false;
        std::vector<std::vector<typename F::Elem>> id;
        for (int i = 0; i < f.n; ++i) id.push_back(Poly<F>::var(*f.K, f.n, i).c);
        R.cert = make_cert<F>(f, {}, LinSubspace<F>::span(*f.K, f.n, id));
        R.spent = budget.spent;
        return R;
      }
      if (res.cert) {
        R.value = r;
        R.cert = res.cert;
        R.spent = budget.spent;
        return R;
      }
    }
  }
  R.value = f.n;
  R.spent = budget.spent;
  return R;
}

}  // namespace strength
