#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "strength/bounds.hpp"
#include "strength/strength.hpp"

namespace strength {

template <class F>
using PairList = std::vector<std::pair<Poly<F>, Poly<F>>>;

// ---------------------------------------------------------------- tuples

// (q_1..q_r, q'_1..q'_r), matching the frame coordinates e_1..e_r, f_1..f_r
template <class F>
std::vector<Poly<F>> flatten(const PairList<F>& ps) {
  std::vector<Poly<F>> out;
  for (auto& p : ps) out.push_back(p.first);
  for (auto& p : ps) out.push_back(p.second);
  return out;
}

template <class F>
PairList<F> unflatten(const std::vector<Poly<F>>& Phi, size_t off = 0) {
  size_t r = (Phi.size() - off) / 2;
  PairList<F> out;
  for (size_t i = 0; i < r; ++i) out.push_back({Phi[off + i], Phi[off + r + i]});
  return out;
}

template <class F>
Poly<F> phi(const std::vector<Poly<F>>& Phi, const std::vector<typename F::Elem>& v, const F& K, int n) {
  Poly<F> s(K, n, 2);
  for (size_t k = 0; k < Phi.size(); ++k) add_scaled(s, v[k], Phi[k]);
  return s;
}

// Φ~_k = sum_j T(j,k) Φ_j, so that φ~(v) = φ(T v)
template <class F>
std::vector<Poly<F>> retuple(const std::vector<Poly<F>>& Phi, const Mat<F>& T) {
  std::vector<Poly<F>> out;
  for (size_t k = 0; k < T.cols; ++k) {
    Poly<F> s(*Phi[0].K, Phi[0].n, 2);
    for (size_t j = 0; j < T.rows; ++j) add_scaled(s, T(j, k), Phi[j]);
    out.push_back(std::move(s));
  }
  return out;
}

template <class F>
std::vector<Poly<F>> conj_all(const std::vector<Poly<F>>& v, GalEl g) {
  std::vector<Poly<F>> out;
  for (auto& p : v) out.push_back(galois_apply(p, g));
  return out;
}

template <class F>
PairList<F> conj_pairs(const PairList<F>& v, GalEl g) {
  PairList<F> out;
  for (auto& [a, b] : v) out.push_back({galois_apply(a, g), galois_apply(b, g)});
  return out;
}

template <class F>
Poly<F> quartic_of(const PairList<F>& ps, const F& K, int n) {
  Poly<F> s(K, n, 4);
  for (auto& [a, b] : ps) mul_acc(s, a, b);
  return s;
}

// S/(L) as the polynomial ring in the free variables of L
template <class F>
struct Quotient {
  LinSubspace<F> L;
  std::vector<int> vars;

  explicit Quotient(LinSubspace<F> L_) : L(std::move(L_)), vars(L.free_vars()) {}
  int n_inner() const { return int(vars.size()); }
  Poly<F> down(const Poly<F>& q) const { return L.dim() ? reduce_mod_linear(q, L) : q; }
  std::vector<Poly<F>> down(const std::vector<Poly<F>>& v) const {
    std::vector<Poly<F>> out;
    for (auto& q : v) out.push_back(down(q));
    return out;
  }
  PairList<F> down(const PairList<F>& v) const {
    PairList<F> out;
    for (auto& [a, b] : v) out.push_back({down(a), down(b)});
    return out;
  }
  LinSubspace<F> up(const LinSubspace<F>& inner) const {
    auto rows = L.basis();
    for (auto& v : inner.basis()) {
      std::vector<typename F::Elem> w(L.n, L.K->zero());
      for (size_t i = 0; i < v.size(); ++i) w[vars[i]] = v[i];
      rows.push_back(std::move(w));
    }
    return LinSubspace<F>::span(*L.K, L.n, rows);
  }
};

template <class F>
std::vector<typename F::Elem> unit_vec(const F& K, size_t n, size_t i) {
  std::vector<typename F::Elem> v(n, K.zero());
  v[i] = K.one();
  return v;
}

inline size_t to_size(const mpz_class& z) { return z.fits_ulong_p() ? z.get_ui() : kInfinity; }

// ---------------------------------------------------------------- ledger

inline uint64_t fnv1a(const std::string& s, uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(uint64_t h) {
  static const char* d = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[i] = d[h & 15];
  return s;
}

template <class F>
std::string digest(const std::vector<Poly<F>>& ps) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (auto& p : ps) h = fnv1a(format_poly(p) + ";", h);
  return hex64(h);
}

template <class F>
std::string digest(const DecompCert<F>& c) {
  std::vector<Poly<F>> all{c.f};
  for (auto& [a, b] : c.pairs) {
    all.push_back(a);
    all.push_back(b);
  }
  uint64_t h = fnv1a(digest(all));
  h = fnv1a(format(c.P.rows), h);
  return hex64(h);
}

struct LedgerEntry {
  std::string step, anchor, inputs, outputs, bound;
  bool pass = true;
};

struct Ledger {
  std::vector<LedgerEntry> entries;
  void add(std::string step, std::string anchor, std::string in, std::string out, std::string bound, bool pass) {
    entries.push_back({std::move(step), std::move(anchor), std::move(in), std::move(out), std::move(bound), pass});
  }
  bool all_pass() const {
    for (auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
  bool has_step(const std::string& s) const {
    for (auto& e : entries)
      if (e.step == s) return true;
    return false;
  }
};

// ---------------------------------------------------------------- isotropic combinations

template <class F>
struct IsoResult {
  std::vector<typename F::Elem> a;  // e-coordinates then f-coordinates
  size_t bound = 0;                 // c(r, s, dim Q)
  size_t achieved = kInfinity;      // srk(sum a_i q_i + a'_i q'_i, Q)
  bool exact = true;
  std::string route;
};

template <class F>
std::vector<typename F::Elem> lemma_rec(const F& K, int n, const PairList<F>& qp, const PairList<F>& pp,
                                        const std::vector<Poly<F>>& Q, Budget& budget);

// b on the pairs 2..r placed into the 2r frame
template <class F>
std::vector<typename F::Elem> skip_first(const F& K, const std::vector<typename F::Elem>& b, size_t r) {
  std::vector<typename F::Elem> v(2 * r, K.zero());
  for (size_t k = 0; k + 1 < r; ++k) {
    v[k + 1] = b[k];
    v[r + k + 1] = b[(r - 1) + k];
  }
  return v;
}

template <class F>
std::vector<typename F::Elem> lemma_rec(const F& K, int n, const PairList<F>& qp, const PairList<F>& pp,
                                        const std::vector<Poly<F>>& Q, Budget& budget) {
  using E = typename F::Elem;
  size_t r = qp.size(), s = pp.size();
  if (r <= s) fail("HypothesisViolated", "isotropic combination needs more q pairs than p pairs");
  auto Phi = flatten(qp);
  LinSubspace<F> none(K, n);
  if (s == 0) {
    std::vector<Poly<F>> head;
    for (size_t i = 0; i + 1 < r; ++i) head.push_back(qp[i].first);
    auto m = min_slice_rank(head, Q, budget);
    if (m.value != kInfinity && m.value <= r - 1 + Q.size()) {
      std::vector<E> a(2 * r, K.zero());
      bool any = false;
      for (size_t i = 0; i + 1 < r; ++i) {
        a[i] = m.coeffs[i];
        any = any || !a[i].is_zero();
      }
      return any ? a : unit_vec(K, 2 * r, 0);
    }
    auto span = head;
    span.insert(span.end(), Q.begin(), Q.end());
    for (int side = 0; side < 2; ++side) {
      const auto& last = side == 0 ? qp[r - 1].first : qp[r - 1].second;
      if (auto c = quad_in_span_mod(last, span, none)) {
        std::vector<E> a(2 * r, K.zero());
        a[side == 0 ? r - 1 : 2 * r - 1] = K.one();
        for (size_t i = 0; i + 1 < r; ++i) a[i] = -(*c)[i];
        return a;
      }
    }
    fail("HypothesisViolated", "q_r q'_r vanishes modulo (q_<r, Q) but neither factor lies in the ideal");
  }
  PairList<F> rest(pp.begin() + 1, pp.end());
  const Poly<F>& p1 = pp[0].first;
  auto Q1 = Q;
  Q1.push_back(p1);
  auto a = lemma_rec(K, n, qp, rest, Q1, budget);
  auto x = phi(Phi, a, K, n);
  auto m = min_slice_rank({x, p1}, Q, budget);
  if (m.value == kInfinity) return a;
  E lam = m.coeffs[0], mu = m.coeffs[1];
  if (mu.is_zero()) return a;
  std::vector<Poly<F>> all{x, p1};
  all.insert(all.end(), Q.begin(), Q.end());
  Quotient<F> quo(slice_witness(combine(all, m.coeffs)));
  int n2 = quo.n_inner();
  if (lam.is_zero()) return lemma_rec(K, n2, quo.down(qp), quo.down(rest), quo.down(Q), budget);
  auto fr = Frame<F>::hyperbolic(K, int(r));
  auto T = orthogonal_map(fr.J, unit_vec(K, 2 * r, 0), a);
  if (!T) fail("InternalError", "no orthogonal map onto the isotropic vector");
  auto Phit = retuple(Phi, *T);
  auto qt = unflatten(Phit);
  PairList<F> tail(qt.begin() + 1, qt.end());
  auto Q2 = Q;
  Q2.push_back(qt[0].first);
  auto b = lemma_rec(K, n2, quo.down(tail), quo.down(rest), quo.down(Q2), budget);
  auto bh = skip_first(K, b, r);
  auto m2 = min_slice_rank({phi(Phit, bh, K, n), qt[0].first}, Q, budget);
  std::vector<E> at = unit_vec(K, 2 * r, 0);
  if (m2.value != kInfinity && !m2.coeffs[0].is_zero()) {
    at = bh;
    at[0] = m2.coeffs[1] / m2.coeffs[0];
  }
  return mat_vec(*T, at);
}

template <class F>
bool quartic_congruent(const Poly<F>& lhs, const std::vector<Poly<F>>& Q) {
  if (lhs.is_zero()) return true;
  if (Q.empty()) return false;
  return contains(lhs, Q).member;
}

// Isotropic (a, a') with srk(sum a_i q_i + a'_i q'_i, Q) <= c(r, s, dim Q).
// The congruence is checked densely when n is small.
template <class F>
IsoResult<F> find_low_rank_isotropic(const PairList<F>& qp, const PairList<F>& pp, const std::vector<Poly<F>>& Q,
                                     Budget& budget, bool check_congruence = true) {
  using E = typename F::Elem;
  if (qp.empty()) fail("HypothesisViolated", "no q pairs");
  const F& K = *qp[0].first.K;
  int n = qp[0].first.n;
  size_t r = qp.size(), s = pp.size();
  if (r <= s) fail("HypothesisViolated", "isotropic combination needs r > s");
  if (check_congruence && n <= 10) {
    auto d = quartic_of(qp, K, n) - quartic_of(pp, K, n);
    if (!quartic_congruent(d, Q)) fail("HypothesisViolated", "sum q_i q'_i is not congruent to sum p_i p'_i mod (Q)");
  }
  IsoResult<F> R;
  R.bound = to_size(c_const(long(r), long(s), long(Q.size())));
  auto Phi = flatten(qp);
  auto measure = [&](const std::vector<E>& a) {
    auto m = min_slice_rank({phi(Phi, a, K, n)}, Q, budget);
    R.exact = m.exact;
    return m.value;
  };
  try {
    R.a = lemma_rec(K, n, qp, pp, Q, budget);
    R.achieved = measure(R.a);
    R.route = "constructive";
    if (R.achieved <= R.bound || !K.finite()) return R;
  } catch (const Error& e) {
    if (e.code() != "HypothesisViolated" || !K.finite()) throw;
  }
  auto fr = Frame<F>::hyperbolic(K, int(r));
  bool found = false;
  isotropic_vectors<F>(fr, budget.limit - std::min(budget.limit, budget.spent), [&](const std::vector<E>& v) {
    budget.charge(1, "isotropic search");
    size_t val = measure(v);
    if (val <= R.bound) {
      R.a = v;
      R.achieved = val;
      found = true;
      return false;
    }
    return true;
  });
  if (!found) fail("HypothesisViolated", "no isotropic combination meets c(r,s,dim Q)");
  R.route = "exhaustive";
  return R;
}

// ---------------------------------------------------------------- alignment

template <class F>
struct AlignmentWitness {
  Mat<F> A;  // p_i ≡ φ(A e_i), p'_i ≡ φ(A f_i) mod (Q, L)
  LinSubspace<F> L;
  std::vector<std::vector<typename F::Elem>> qcoeffs;  // Q-part of each congruence
  size_t dim_bound = 0;
  bool hypothesis_checked = false;
  bool verified = false;
};

// 2(r-1) block inserted on pairs 2..r
template <class F>
Mat<F> embed_tail(const F& K, const Mat<F>& Ain, size_t r, size_t off = 0) {
  size_t dim = off + 2 * r;
  Mat<F> B = Mat<F>::identity(K, dim);
  auto idx = [&](size_t k) { return k < r - 1 ? off + k + 1 : off + r + (k - (r - 1)) + 1; };
  for (size_t i = 0; i < Ain.rows; ++i)
    for (size_t j = 0; j < Ain.cols; ++j) B(idx(i), idx(j)) = Ain(i, j);
  return B;
}

template <class F>
std::pair<Mat<F>, LinSubspace<F>> align_rec(const F& K, int n, const PairList<F>& qp, const PairList<F>& pp,
                                            const std::vector<Poly<F>>& Q, Budget& budget) {
  using E = typename F::Elem;
  size_t r = qp.size();
  LinSubspace<F> none(K, n);
  if (r == 0) return {Mat<F>(K, 0, 0), none};
  auto Phi = flatten(qp), Psi = flatten(pp);
  bool same = true;
  for (size_t k = 0; k < Phi.size() && same; ++k) same = quad_in_span_mod(Psi[k] - Phi[k], Q, none).has_value();
  if (same) return {Mat<F>::identity(K, 2 * r), none};
  PairList<F> rest(pp.begin() + 1, pp.end());
  const Poly<F>& p1 = pp[0].first;
  auto Q1 = Q;
  Q1.push_back(p1);
  auto iso = find_low_rank_isotropic(qp, rest, Q1, budget, false);
  auto fr = Frame<F>::hyperbolic(K, int(r));
  auto T = orthogonal_map(fr.J, unit_vec(K, 2 * r, 0), iso.a);
  if (!T) fail("InternalError", "no orthogonal map onto the isotropic vector");
  auto Phit = retuple(Phi, *T);
  auto m = min_slice_rank({Phit[0], p1}, Q, budget);
  if (m.value == kInfinity || m.coeffs[1].is_zero() || m.coeffs[0].is_zero())
    fail("RankHypothesisFailed", "the rotated q_1 has slice rank " + std::to_string(m.value) + " modulo Q");
  E kappa = -(m.coeffs[0] / m.coeffs[1]);
  std::vector<Poly<F>> all{Phit[0], p1};
  all.insert(all.end(), Q.begin(), Q.end());
  Quotient<F> quo(slice_witness(combine(all, m.coeffs)));
  Mat<F> S = Mat<F>::identity(K, 2 * r);
  S(0, 0) = kappa;
  S(r, r) = K.inv(kappa);
  auto Phih = retuple(Phit, S);
  auto qh = unflatten(Phih);
  PairList<F> tail(qh.begin() + 1, qh.end());
  auto Q2 = Q;
  Q2.push_back(qh[0].first);
  auto [Ain, Lin] = align_rec(K, quo.n_inner(), quo.down(tail), quo.down(rest), quo.down(Q2), budget);
  auto L = quo.up(Lin);
  Mat<F> Blk = embed_tail(K, Ain, r);
  auto Psi2 = retuple(Phih, Blk);
  std::vector<Poly<F>> gens{Psi2[0]};
  gens.insert(gens.end(), Q.begin(), Q.end());
  Mat<F> Ax = Mat<F>::identity(K, 2 * r);
  E cc = K.zero();
  for (size_t i = 1; i < r; ++i) {
    auto c = quad_in_span_mod(Psi[i] - Psi2[i], gens, L);
    auto c2 = quad_in_span_mod(Psi[r + i] - Psi2[r + i], gens, L);
    if (!c || !c2) fail("HypothesisViolated", "p_i is not congruent to the aligned q_i modulo (q_1, Q, L)");
    E ci = (*c)[0], ci2 = (*c2)[0];
    Ax(0, i) = ci;
    Ax(0, r + i) = ci2;
    Ax(r + i, r) = -ci;
    Ax(i, r) = -ci2;
    cc += ci * ci2;
  }
  Ax(0, r) = -cc;
  return {(*T) * S * Blk * Ax, L};
}

template <class F>
bool check_alignment(const std::vector<Poly<F>>& Phi, const std::vector<Poly<F>>& Psi, const Mat<F>& A,
                     const std::vector<Poly<F>>& Q, const LinSubspace<F>& L,
                     std::vector<std::vector<typename F::Elem>>* coeffs = nullptr) {
  const F& K = *L.K;
  for (size_t k = 0; k < Psi.size(); ++k) {
    auto c = quad_in_span_mod(Psi[k] - phi(Phi, A.col(k), K, L.n), Q, L);
    if (!c) return false;
    if (coeffs) coeffs->push_back(*c);
  }
  return true;
}

// min over isotropic (a, a') of srk(sum a_i q_i + a'_i q'_i, Q) >= C(r, dim Q),
// decided exhaustively when affordable.
template <class F>
std::optional<bool> alignment_hypothesis(const PairList<F>& qp, const std::vector<Poly<F>>& Q, Budget& budget,
                                         size_t* witness_value = nullptr) {
  const F& K = *qp[0].first.K;
  if (!K.finite()) return std::nullopt;
  size_t r = qp.size();
  long double cost = count_projective(K.size(), 2 * r) * std::max<long double>(1, count_vectors(K.size(), Q.size()));
  if (!budget.affords(cost)) return std::nullopt;
  size_t C = to_size(C_const(long(r), long(Q.size())));
  auto Phi = flatten(qp);
  int n = qp[0].first.n;
  bool ok = true;
  isotropic_vectors<F>(Frame<F>::hyperbolic(K, int(r)), uint64_t(cost) + 1, [&](const auto& v) {
    auto m = min_slice_rank({phi(Phi, v, K, n)}, Q, budget);
    if (m.value < C) {
      ok = false;
      if (witness_value) *witness_value = m.value;
      return false;
    }
    return true;
  });
  return ok;
}

template <class F>
AlignmentWitness<F> align_decompositions(const PairList<F>& qp, const PairList<F>& pp, const std::vector<Poly<F>>& Q,
                                         Budget& budget, bool check_hypothesis = true) {
  if (qp.size() != pp.size()) fail("DimensionMismatch", "alignment needs the same number of pairs");
  if (qp.empty()) fail("InputError", "no pairs to align");
  const F& K = *qp[0].first.K;
  int n = qp[0].first.n;
  size_t r = qp.size();
  AlignmentWitness<F> W;
  if (check_hypothesis) {
    size_t val = 0;
    auto h = alignment_hypothesis(qp, Q, budget, &val);
    if (h && !*h)
      fail("RankHypothesisFailed", "an isotropic combination has slice rank " + std::to_string(val) + " < C(r, dim Q)");
    W.hypothesis_checked = h.has_value();
  }
  auto [A, L] = align_rec(K, n, qp, pp, Q, budget);
  W.A = A;
  W.L = L;
  W.dim_bound = to_size(D_const(long(r), long(Q.size())));
  auto fr = Frame<F>::hyperbolic(K, int(r));
  W.verified = is_orthogonal(A, fr) && check_alignment(flatten(qp), flatten(pp), A, Q, L, &W.qcoeffs);
  if (!W.verified) fail("HypothesisViolated", "assembled alignment does not verify");
  return W;
}

// Frame a_0^2 + 4 sum a_i a'_i; coordinates [q0, q_1..q_r, q'_1..q'_r].
template <class F>
AlignmentWitness<F> align_with_square(const Poly<F>& q0, const PairList<F>& qp, const Poly<F>& p0,
                                      const PairList<F>& pp, Budget& budget) {
  using E = typename F::Elem;
  if (qp.size() != pp.size()) fail("DimensionMismatch", "alignment needs the same number of pairs");
  const F& K = *q0.K;
  int n = q0.n;
  size_t r = qp.size();
  auto fr = Frame<F>::with_square(K, int(r));
  std::vector<Poly<F>> PhiS{q0}, PsiS{p0};
  for (auto& v : flatten(qp)) PhiS.push_back(v);
  for (auto& v : flatten(pp)) PsiS.push_back(v);
  AlignmentWitness<F> W;
  W.dim_bound = to_size(D_const(long(r), 0) + c_const(long(r + 1), long(r), 0));
  LinSubspace<F> none(K, n);
  bool same = true;
  for (size_t k = 0; k < PhiS.size() && same; ++k) same = (PsiS[k] - PhiS[k]).is_zero();
  if (same) {
    W.A = Mat<F>::identity(K, fr.dim());
    W.L = none;
    W.verified = check_alignment<F>(PhiS, PsiS, W.A, {}, W.L, &W.qcoeffs);
    return W;
  }
  PairList<F> big{{q0 - p0, q0 + p0}};
  big.insert(big.end(), qp.begin(), qp.end());
  auto iso = find_low_rank_isotropic(big, pp, {}, budget, false);
  E alpha = iso.a[0], beta = iso.a[r + 1];
  E b = alpha - beta;
  if (b.is_zero()) fail("BZeroContradiction", "the isotropic combination has b = 0");
  std::vector<E> w(fr.dim(), K.zero());
  w[0] = alpha + beta;
  for (size_t i = 0; i < r; ++i) {
    w[fr.e(int(i))] = iso.a[1 + i];
    w[fr.f(int(i))] = iso.a[r + 2 + i];
  }
  for (auto& x : w) x = x / b;
  auto T = orthogonal_map(fr.J, unit_vec(K, fr.dim(), 0), w);
  if (!T) fail("InternalError", "no orthogonal map onto the normalized vector");
  auto Phit = retuple(PhiS, *T);
  Quotient<F> quo(slice_witness(Phit[0] - p0));
  auto tail = unflatten(Phit, 1);
  auto [Ain, Lin] = align_rec(K, quo.n_inner(), quo.down(tail), quo.down(pp), {}, budget);
  W.L = quo.up(Lin);
  Mat<F> Blk = Mat<F>::identity(K, fr.dim());
  for (size_t i = 0; i < Ain.rows; ++i)
    for (size_t j = 0; j < Ain.cols; ++j) Blk(1 + i, 1 + j) = Ain(i, j);
  W.A = (*T) * Blk;
  W.verified = is_orthogonal(W.A, fr) && check_alignment<F>(PhiS, PsiS, W.A, {}, W.L, &W.qcoeffs);
  if (!W.verified) fail("HypothesisViolated", "assembled alignment with a square does not verify");
  return W;
}

// ---------------------------------------------------------------- scalar cocycles

enum class Branch { Fixed, Swapped, NoBranch, BothBranches };

inline const char* branch_name(Branch b) {
  switch (b) {
    case Branch::Fixed: return "Fixed";
    case Branch::Swapped: return "Swapped";
    case Branch::NoBranch: return "NoBranch";
    default: return "BothBranches";
  }
}

template <class F>
struct FactorMatch {
  Branch branch = Branch::NoBranch;
  typename F::Elem c;
};

template <class F>
std::optional<typename F::Elem> scalar_ratio(const Poly<F>& target, const Poly<F>& q, const LinSubspace<F>& L) {
  auto c = quad_in_span_mod(target, {q}, L);
  if (!c || (*c)[0].is_zero()) return std::nullopt;
  return (*c)[0];
}

template <class F>
bool congruent(const Poly<F>& a, const Poly<F>& b, const LinSubspace<F>& L) {
  return reduce_mod(a - b, L, false).remainder.is_zero();
}

template <class F>
FactorMatch<F> match_factors(const Poly<F>& q, const Poly<F>& qq, GalEl sigma, const LinSubspace<F>& P) {
  auto L = P.plus(P.act(sigma));
  auto sq = galois_apply(q, sigma), sqq = galois_apply(qq, sigma);
  FactorMatch<F> R;
  std::optional<typename F::Elem> fx, sw;
  if (auto c = scalar_ratio(sq, q, L))
    if (congruent(sqq, inv(*c) * qq, L)) fx = c;
  if (auto c = scalar_ratio(sq, qq, L))
    if (congruent(sqq, inv(*c) * q, L)) sw = c;
  if (fx && sw) {
    R.branch = Branch::BothBranches;
    R.c = *fx;
  } else if (fx) {
    R.branch = Branch::Fixed;
    R.c = *fx;
  } else if (sw) {
    R.branch = Branch::Swapped;
    R.c = *sw;
  }
  return R;
}

template <class F>
struct ScalarCocycle {
  std::vector<GalEl> H;
  std::map<GalEl, typename F::Elem> c;
};

template <class F>
std::vector<GalEl> galois_group(const F& K) {
  std::vector<GalEl> G;
  for (GalEl g = 0; g < K.group_order(); ++g) G.push_back(g);
  return G;
}

// Galois elements fixing the level-j field
inline std::vector<GalEl> level_subgroup(unsigned order, int j) {
  std::vector<GalEl> H;
  for (GalEl g = 0; g < order; ++g)
    if (j >= 31 || (g & ((1u << j) - 1)) == 0) H.push_back(g);
  return H;
}

inline bool is_subgroup(const std::vector<GalEl>& H) {
  for (auto a : H)
    for (auto b : H)
      if (std::find(H.begin(), H.end(), a ^ b) == H.end()) return false;
  return std::find(H.begin(), H.end(), 0u) != H.end();
}

template <class F>
bool cocycle_law(const F& K, const ScalarCocycle<F>& C, std::pair<GalEl, GalEl>* bad = nullptr) {
  for (auto s1 : C.H)
    for (auto s2 : C.H) {
      auto lhs = C.c.at(s1 ^ s2);
      auto rhs = C.c.at(s1) * K.act(C.c.at(s2), s1);
      if (!(lhs == rhs)) {
        if (bad) *bad = {s1, s2};
        return false;
      }
    }
  return true;
}

// With P0 given (the low-rank case, q' ≡ c0 q mod P0) every σ is matched in
// the Fixed form modulo P + σP + P0 and H is the whole group.
template <class F>
ScalarCocycle<F> extract_scalar_cocycle(const Poly<F>& q, const Poly<F>& qq, const LinSubspace<F>& P,
                                        const LinSubspace<F>* P0 = nullptr) {
  const F& K = *q.K;
  ScalarCocycle<F> C;
  for (GalEl s : galois_group(K)) {
    if (P0) {
      auto L = P.plus(P.act(s)).plus(*P0);
      auto c = scalar_ratio(galois_apply(q, s), q, L);
      if (!c) fail("NoBranch", "σ=" + std::to_string(s) + " does not rescale q modulo P + σP + P0");
      C.H.push_back(s);
      C.c[s] = *c;
      continue;
    }
    auto m = match_factors(q, qq, s, P);
    if (m.branch == Branch::NoBranch) fail("NoBranch", "σ=" + std::to_string(s) + " matches neither factor");
    if (m.branch == Branch::BothBranches) fail("BothBranches", "σ=" + std::to_string(s) + " matches both factors");
    if (m.branch == Branch::Fixed) {
      C.H.push_back(s);
      C.c[s] = m.c;
    }
  }
  if (!is_subgroup(C.H) || 2 * C.H.size() < K.group_order()) fail("NotSubgroup", "the fixing elements do not form a subgroup of index <= 2");
  std::pair<GalEl, GalEl> bad;
  if (!cocycle_law(K, C, &bad))
    fail("CocycleLawViolated", "scalar cocycle law fails at (" + std::to_string(bad.first) + "," + std::to_string(bad.second) + ")");
  return C;
}

template <class F>
struct Hilbert90 {
  typename F::Elem e;  // c(σ) = e / σ(e) on H
  int retries = 0;
};

// e = sum_τ c(τ) τ(x) over the canonical basis, then a seeded stream
template <class F>
Hilbert90<F> hilbert90_scalar(const F& K, const ScalarCocycle<F>& C) {
  using E = typename F::Elem;
  if (!(C.c.count(0) && C.c.at(0) == K.one()) || !cocycle_law(K, C)) fail("NormNotOne", "input is not a cocycle");
  Hilbert90<F> R;
  auto attempt = [&](const E& x) {
    E e = K.zero();
    for (auto t : C.H) e += C.c.at(t) * K.act(x, t);
    return e;
  };
  Rng rng(0x4890);
  for (int it = 0;; ++it) {
    E x = it < int(K.group_order()) ? K.basis(unsigned(it)) : K.random_nonzero(rng);
    E e = attempt(x);
    if (!e.is_zero()) {
      R.e = e;
      R.retries = it;
      break;
    }
    if (it > 10000) fail("InternalError", "Hilbert 90 search did not terminate");
  }
  for (auto s : C.H)
    if (!(C.c.at(s) * K.act(R.e, s) == R.e)) fail("NormNotOne", "constructed element does not split the cocycle");
  return R;
}

// ---------------------------------------------------------------- rationalization

template <class F>
struct Rationalized {
  Poly<F> q0;
  size_t defect = 0;      // rank(q − q0)
  size_t max_moved = 0;   // max over H of rank(σ(q) − q)
};

template <class F>
Rationalized<F> rationalize_quadric(const Poly<F>& q, const std::vector<GalEl>& H) {
  const F& K = *q.K;
  Rationalized<F> R;
  R.q0 = Poly<F>(K, q.n, q.d);
  for (auto t : H) R.q0 += galois_apply(q, t);
  R.q0 = K.inv(K.from_int(long(H.size()))) * R.q0;
  R.defect = quad_rank(q - R.q0);
  for (auto t : H) R.max_moved = std::max(R.max_moved, quad_rank(galois_apply(q, t) - q));
  return R;
}

template <class F>
LinSubspace<F> galois_hull(const LinSubspace<F>& P, const std::vector<GalEl>& H) {
  LinSubspace<F> out(*P.K, P.n);
  for (auto h : H) out = out.plus(P.act(h));
  return out;
}

// ---------------------------------------------------------------- widening

template <class F>
unsigned sign_basis(const std::vector<GalEl>& H, GalEl tau, unsigned order) {
  auto odd = [](unsigned x) { return __builtin_popcount(x) & 1; };
  for (unsigned S = 1; S < order; ++S) {
    bool ok = odd(tau & S);
    for (auto h : H) ok = ok && !odd(h & S);
    if (ok) return S;
  }
  fail("NotQuadraticLevel", "no square root separates the step");
}

// One quadratic step: the cert is H-stable, f is (H ∪ τH)-stable.
template <class F>
DecompCert<F> widen_step(const DecompCert<F>& c, const std::vector<GalEl>& H, GalEl tau) {
  const F& K = *c.K;
  auto theta = K.basis(sign_basis<F>(H, tau, K.group_order()));
  auto half = K.inv(K.from_int(2));
  auto inv2t = K.inv(K.from_int(2) * theta);
  PairList<F> pairs;
  for (auto& [q, qq] : c.pairs) {
    auto tq = galois_apply(q, tau), tqq = galois_apply(qq, tau);
    auto a = half * (q + tq), aa = half * (qq + tqq);
    auto b = inv2t * (q - tq), bb = inv2t * (qq - tqq);
    if (!a.is_zero() && !aa.is_zero()) pairs.push_back({a, aa});
    if (!b.is_zero() && !bb.is_zero()) pairs.push_back({(theta * theta) * b, bb});
  }
  return make_cert(c.f, pairs, c.P.plus(c.P.act(tau)));
}

template <class F>
DecompCert<F> widen_to_base(DecompCert<F> c, std::vector<GalEl> H, Ledger* ledger = nullptr) {
  const F& K = *c.K;
  if (!defined_over_level(c.f, 0)) fail("FNotOverBase", "the quartic is not defined over the base field");
  auto G = galois_group(K);
  while (H.size() < G.size()) {
    GalEl tau = 0;
    for (auto g : G)
      if (std::find(H.begin(), H.end(), g) == H.end()) {
        tau = g;
        break;
      }
    size_t r2 = c.pairs.size(), r1 = c.P.dim();
    std::string in = digest(c);
    c = widen_step(c, H, tau);
    auto v = verify_certificate(c);
    std::vector<GalEl> H2 = H;
    for (auto h : H) H2.push_back(h ^ tau);
    H = H2;
    bool ok = bool(v) && c.pairs.size() <= 2 * r2 && c.P.dim() <= 2 * r1;
    if (ledger)
      ledger->add("widen", "quadratic extension lemma: f in (Q+σQ, P+σP)", in, digest(c),
                  "r2 " + std::to_string(c.pairs.size()) + " <= " + std::to_string(2 * r2) + ", r1 " +
                      std::to_string(c.P.dim()) + " <= " + std::to_string(2 * r1),
                  ok);
    if (!v) fail("HypothesisViolated", "widened certificate fails: " + v.reason);
  }
  return c;
}

// ---------------------------------------------------------------- base conversion

template <class F>
Poly<F> poly_to_base(const F& B, const Poly<F>& f) {
  Poly<F> out(B, f.n, f.d);
  for (size_t i = 0; i < f.c.size(); ++i) out.c[i] = f.K->to_base(f.c[i]);
  return out;
}

template <class F>
DecompCert<F> cert_to_base(const DecompCert<F>& c) {
  const F& B = *c.K->base();
  DecompCert<F> o;
  o.K = &B;
  o.field = B.descriptor();
  o.f = poly_to_base(B, c.f);
  for (auto& [a, b] : c.pairs) o.pairs.push_back({poly_to_base(B, a), poly_to_base(B, b)});
  o.P = LinSubspace<F>(B, c.P.n);
  o.P.rows = Mat<F>(B, c.P.rows.rows, c.P.rows.cols);
  for (size_t i = 0; i < c.P.rows.a.size(); ++i) o.P.rows.a[i] = c.K->to_base(c.P.rows.a[i]);
  o.P.piv = c.P.piv;
  for (auto& h : c.residual) o.residual.push_back(poly_to_base(B, h));
  o.r2 = c.r2;
  o.r1 = c.r1;
  return o;
}

template <class F>
bool cert_over_base(const DecompCert<F>& c) {
  if (!defined_over_level(c.f, 0) || !c.P.defined_over_level(0)) return false;
  for (auto& [a, b] : c.pairs)
    if (!defined_over_level(a, 0) || !defined_over_level(b, 0)) return false;
  return true;
}

// ---------------------------------------------------------------- orthogonal cocycles

template <class F>
struct OrthCocycle {
  bool square = false;
  int r = 0;
  std::map<GalEl, Mat<F>> R;  // σ(Φ) ≡ R_σ Φ on the quadric tuple
};

template <class F>
bool orth_cocycle_law(const OrthCocycle<F>& C, std::pair<GalEl, GalEl>* bad = nullptr) {
  for (auto& [s1, R1] : C.R)
    for (auto& [s2, R2] : C.R) {
      if (!C.R.count(s1 ^ s2)) continue;
      if (!(C.R.at(s1 ^ s2) == R2.act(s1) * R1)) {
        if (bad) *bad = {s1, s2};
        return false;
      }
    }
  return true;
}

template <class F>
Frame<F> frame_of(const F& K, const OrthCocycle<F>& C) {
  return C.square ? Frame<F>::with_square(K, C.r) : Frame<F>::hyperbolic(K, C.r);
}

template <class F>
struct OrthCocycleResult {
  OrthCocycle<F> C;
  std::map<GalEl, LinSubspace<F>> L;  // congruence spaces
  size_t max_dim_L = 0;
};

// Aligns each σ(Φ) with Φ modulo P + σP.  With q0 the frame carries the
// square slot.
template <class F>
OrthCocycleResult<F> extract_orth_cocycle(const std::optional<Poly<F>>& q0, const PairList<F>& pairs,
                                          const LinSubspace<F>& P, Budget& budget) {
  const F& K = *P.K;
  OrthCocycleResult<F> R;
  R.C.square = q0.has_value();
  R.C.r = int(pairs.size());
  size_t dim = 2 * pairs.size() + (q0 ? 1 : 0);
  for (GalEl s : galois_group(K)) {
    if (s == 0) {
      R.C.R[0] = Mat<F>::identity(K, dim);
      R.L.emplace(0, P);
      continue;
    }
    Quotient<F> quo(P.plus(P.act(s)));
    auto sp = conj_pairs(pairs, s);
    AlignmentWitness<F> W;
    if (q0)
      W = align_with_square(quo.down(*q0), quo.down(pairs), quo.down(galois_apply(*q0, s)), quo.down(sp), budget);
    else
      W = align_decompositions(quo.down(pairs), quo.down(sp), {}, budget, false);
    R.C.R[s] = W.A.transpose();
    auto L = quo.up(W.L);
    R.max_dim_L = std::max(R.max_dim_L, W.L.dim());
    R.L.emplace(s, L);
  }
  auto W = frame_of(K, R.C).quad_gram();
  for (auto& [s, M] : R.C.R)
    if (!preserves(M, W)) fail("HypothesisViolated", "aligned cocycle value is not orthogonal");
  std::pair<GalEl, GalEl> bad;
  if (!orth_cocycle_law(R.C, &bad))
    fail("CocycleLawViolated",
         "orthogonal cocycle law fails at (" + std::to_string(bad.first) + "," + std::to_string(bad.second) + ")");
  return R;
}

template <class F>
struct Trivialization {
  int level = 0;  // B is defined over this level of the tower
  Mat<F> B;
  int retries = 0;
};

// C with C^T G0 C = W for W the tuple form of the frame, entries in level j.
template <class F>
std::optional<Mat<F>> isometry_to_frame(const Mat<F>& G0, const Frame<F>& fr, int level) {
  const F& K = *G0.K;
  auto S = hyperbolic_split(G0, level);
  if (!S.radical.empty() || int(S.planes.size()) != fr.r) return std::nullopt;
  Mat<F> C(K, fr.dim(), fr.dim());
  auto half = K.inv(K.from_int(2));
  for (int i = 0; i < fr.r; ++i) {
    auto& [v, u] = S.planes[size_t(i)];
    C.set_col(fr.e(i), v);
    std::vector<typename F::Elem> u2 = u;
    for (auto& x : u2) x = x * half;
    C.set_col(fr.f(i), u2);
  }
  if (fr.square) {
    if (S.aniso.size() != 1) return std::nullopt;
    auto z = S.aniso[0];
    auto lam = qval(G0, z);
    auto s = K.is_square_in_level(lam, level);
    if (!s) return std::nullopt;
    for (auto& x : z) x = x / *s;
    C.set_col(0, z);
  } else if (!S.aniso.empty()) {
    return std::nullopt;
  }
  return C;
}

template <class F>
Trivialization<F> trivialize_orth_cocycle(const F& K, const OrthCocycle<F>& C) {
  std::pair<GalEl, GalEl> bad;
  if (!orth_cocycle_law(C, &bad)) fail("NonCocycle", "input violates the cocycle law");
  auto fr = frame_of(K, C);
  auto W = fr.quad_gram();
  size_t dim = fr.dim();
  Trivialization<F> T;
  Rng rng(0x7a11);
  for (int j = 0; j <= K.height(); ++j) {
    auto H = level_subgroup(K.group_order(), j);
    if (H.size() == 1) {
      T.level = j;
      T.B = Mat<F>::identity(K, dim);
      return T;
    }
    std::map<GalEl, Mat<F>> Rinv;
    for (auto h : H) Rinv.emplace(h, inverse(C.R.at(h)));
    for (int it = 0; it < 64; ++it, ++T.retries) {
      Mat<F> X = Mat<F>::identity(K, dim);
      if (it > 0 && it < int(K.group_order())) X = X.scaled(K.basis(unsigned(it)));
      if (it >= int(K.group_order()))
        for (auto& x : X.a) x = K.random(rng);
      Mat<F> B0(K, dim, dim);
      for (auto h : H) B0 = B0 + Rinv.at(h) * X.act(h);
      if (rank(B0) < dim) continue;
      auto G0 = B0.transpose() * W * B0;
      bool over = true;
      for (auto& x : G0.a) over = over && K.in_level(x, j);
      if (!over) fail("InternalError", "transported form is not defined over the fixed field");
      auto Cm = isometry_to_frame(G0, fr, j);
      if (!Cm) break;  // not split over this level; try a larger one
      T.level = j;
      T.B = B0 * (*Cm);
      for (auto h : H)
        if (!(T.B.act(h) * inverse(T.B) == C.R.at(h))) fail("InternalError", "coboundary identity fails");
      if (!preserves(T.B, W)) fail("InternalError", "trivializing matrix is not orthogonal");
      return T;
    }
  }
  fail("NonCocycle", "no trivialization found");
}

// ---------------------------------------------------------------- pipelines

template <class F>
struct DescentResult {
  DecompCert<F> cert;  // over the base field
  Ledger ledger;
  std::string route;
  std::vector<ScalarCocycle<F>> scalars;
  std::vector<OrthCocycle<F>> orths;
  std::vector<Trivialization<F>> trivs;
};

template <class F>
std::string num(const mpz_class& z) {
  return z.get_str();
}

template <class F>
void require_input(const Poly<F>& f, const DecompCert<F>& cert) {
  if (!(f == cert.f)) fail("InputError", "certificate is for a different quartic");
  auto v = verify_certificate(cert);
  if (!v) fail("CertificateInvalid", "input certificate fails: " + v.reason);
  if (!defined_over_level(f, 0)) fail("FNotOverBase", "the quartic is not defined over the base field");
}

// pairs over the level fixed by H, residual from the rationalization defects
template <class F>
DecompCert<F> rationalized_cert(const Poly<F>& f, const std::vector<Poly<F>>& tuple, const std::vector<Poly<F>>& fixed,
                                const LinSubspace<F>& P, const std::vector<GalEl>& H, size_t off, bool square) {
  LinSubspace<F> PE = P;
  for (size_t k = 0; k < tuple.size(); ++k) {
    auto d = tuple[k] - fixed[k];
    if (!d.is_zero()) PE = PE.plus(slice_witness(d));
  }
  auto Pk = galois_hull(PE, H);
  PairList<F> pairs;
  if (square) pairs.push_back({fixed[0], fixed[0]});
  for (auto& pr : unflatten(fixed, off)) pairs.push_back(pr);
  return make_cert(f, pairs, Pk);
}

template <class F>
DescentResult<F> descend_quartic_r1(const Poly<F>& f, const DecompCert<F>& cert, Budget& budget) {
  const F& K = *f.K;
  require_input(f, cert);
  if (cert.pairs.size() != 1) fail("InputError", "the r1 pipeline takes one pair");
  DescentResult<F> D;
  auto& Lg = D.ledger;
  long r = long(cert.P.dim());
  auto G = galois_group(K);
  auto finish = [&](DecompCert<F> c, std::vector<GalEl> H) {
    c = widen_to_base(c, H, &Lg);
    auto base = cert_to_base(c);
    auto v = verify_certificate(base);
    mpz_class B = thmB_bound(r);
    bool ok = bool(v) && base.pairs.size() <= 2 && mpz_class(base.P.dim()) <= B;
    Lg.add("final", "descended decomposition over k: rk <= (2, C(r))", digest(cert), digest(base),
           "r2 " + std::to_string(base.pairs.size()) + " <= 2, r1 " + std::to_string(base.P.dim()) + " <= " + num<F>(B),
           ok);
    if (!v) fail("HypothesisViolated", "descended certificate fails: " + v.reason);
    D.cert = base;
    return D;
  };
  if (cert_over_base(cert)) {
    D.route = "already-over-base";
    Lg.add("short-circuit", "decomposition already defined over k", digest(cert), digest(cert), "none", true);
    return finish(cert, G);
  }
  const auto& q = cert.pairs[0].first;
  const auto& qq = cert.pairs[0].second;
  size_t s1 = slice_rank_quadric(q), s2 = slice_rank_quadric(qq);
  if (std::min(s1, s2) <= size_t(9 * r)) {
    D.route = "early-out";
    const auto& low = s1 <= s2 ? q : qq;
    auto Pk = galois_hull(cert.P.plus(slice_witness(low)), G);
    auto c = make_cert<F>(f, {}, Pk);
    Lg.add("early-out", "srk_E(q) <= 9r: slice route", digest(cert), digest(c),
           "srk " + std::to_string(std::min(s1, s2)) + " <= " + std::to_string(9 * r) + ", r1 " +
               std::to_string(Pk.dim()) + " <= " + std::to_string(40 * r),
           Pk.dim() <= size_t(40 * r));
    return finish(c, G);
  }
  auto pen = min_slice_rank<F>({q, qq}, {}, budget);
  ScalarCocycle<F> C;
  if (pen.value <= size_t(3 * r)) {
    D.route = "low-pencil";
    if (pen.coeffs[1].is_zero()) fail("HypothesisViolated", "srk(q) <= 3r contradicts srk(q) > 9r");
    auto P0 = slice_witness(combine(std::vector<Poly<F>>{q, qq}, pen.coeffs));
    C = extract_scalar_cocycle(q, qq, cert.P, &P0);
    Lg.add("case-split", "case srk(q,q') <= 3r: redefine c(σ) with P0", digest<F>({q, qq}), hex64(P0.dim()),
           "srk(q,q') " + std::to_string(pen.value) + " <= " + std::to_string(3 * r), true);
  } else {
    D.route = "high-pencil";
    C = extract_scalar_cocycle(q, qq, cert.P);
    Lg.add("case-split", "case srk(q,q') > 3r: H of index <= 2", digest<F>({q, qq}), hex64(C.H.size()),
           "srk(q,q') " + std::to_string(pen.value) + " > " + std::to_string(3 * r) + ", [G:H] " +
               std::to_string(G.size() / C.H.size()) + " <= 2",
           2 * C.H.size() >= G.size());
  }
  D.scalars.push_back(C);
  auto h90 = hilbert90_scalar(K, C);
  Poly<F> qt = h90.e * q, qqt = K.inv(h90.e) * qq;
  Lg.add("hilbert90", "c(σ) = e/σ(e) on H", hex64(C.H.size()), digest<F>({qt, qqt}),
         "retries " + std::to_string(h90.retries), true);
  auto R0 = rationalize_quadric(qt, C.H), R1 = rationalize_quadric(qqt, C.H);
  {
    size_t mv = std::max(R0.max_moved, R1.max_moved);
    mpz_class bnd = rationalization_bound(long(mv));
    bool ok = R0.defect <= R0.max_moved && R1.defect <= R1.max_moved && mpz_class(std::max(R0.defect, R1.defect)) <= bnd;
    Lg.add("rationalize", "rk(q - q0) <= 2r(2+(r+1)^(r+1))", digest<F>({qt, qqt}), digest<F>({R0.q0, R1.q0}),
           "defects " + std::to_string(R0.defect) + "," + std::to_string(R1.defect) + " <= " + bnd.get_str(), ok);
  }
  auto c = rationalized_cert<F>(f, {qt, qqt}, {R0.q0, R1.q0}, cert.P, C.H, 0, false);
  auto v = verify_certificate(c);
  Lg.add("residual", "slice certificate for f - q0 q0'", digest<F>({R0.q0, R1.q0}), digest(c),
         "r1 " + std::to_string(c.P.dim()), bool(v));
  if (!v) fail("HypothesisViolated", "residual certificate fails: " + v.reason);
  return finish(c, C.H);
}

// ---------------------------------------------------------------- general pipeline

template <class F>
struct GeneralState {
  Budget* budget;
  Ledger* ledger;
  DescentResult<F>* out;
  int depth = 0;
  bool case1 = false, case2 = false, square_route = false, dropped = false;
};

// Basis of {z : a^T z = 0} and a complement z* with a^T z* = 1, as the
// columns of M; row last of M^{-1} is a^T.
template <class F>
Mat<F> hyperplane_frame(const F& K, const std::vector<typename F::Elem>& a) {
  size_t m = a.size();
  Mat<F> row(K, 1, m);
  row.set_row(0, a);
  auto Bh = nullspace(row);
  size_t lead = 0;
  while (a[lead].is_zero()) ++lead;
  std::vector<typename F::Elem> zs(m, K.zero());
  zs[lead] = K.inv(a[lead]);
  Bh.push_back(zs);
  return from_cols(K, Bh, m);
}

// Rewrites sum over the tuple form W restricted to a^⊥ as products.  Returns
// the new tuple rows N (each new quadric is sum_j N(k,j) Φ_j) and the
// resulting pairs / square coefficient.
template <class F>
struct Restriction {
  PairList<F> pairs;
  std::optional<Poly<F>> square;  // q0 with q0^2 the remaining term
  bool ok = false;
  bool isotropic = false;
};

template <class F>
Restriction<F> restrict_to_hyperplane(const std::vector<Poly<F>>& Phi, const Mat<F>& W,
                                      const std::vector<typename F::Elem>& a, bool want_square) {
  using E = typename F::Elem;
  const F& K = *W.K;
  size_t m = Phi.size();
  Restriction<F> R;
  auto M = hyperplane_frame(K, a);
  auto Mi = inverse(M);
  Mat<F> Bh(K, m, m - 1);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j + 1 < m; ++j) Bh(i, j) = M(i, j);
  auto Gh = Bh.transpose() * W * Bh;
  auto S = hyperbolic_split(Gh);
  // Ψ_k = sum_j Mi(k, j) Φ_j for k < m-1
  auto psi_of = [&](const std::vector<E>& v) {
    // coordinate functional on Ψ along the dual of v: use ξ = v^T Gh Ψ scaled
    Poly<F> s(*Phi[0].K, Phi[0].n, 2);
    auto Gv = mat_vec(Gh, v);
    for (size_t k = 0; k + 1 < m; ++k) {
      if (Gv[k].is_zero()) continue;
      for (size_t j = 0; j < m; ++j)
        if (!Mi(k, j).is_zero()) add_scaled(s, Gv[k] * Mi(k, j), Phi[j]);
    }
    return s;
  };
  R.isotropic = !S.radical.empty();
  // Ψ^T Gh Ψ = sum over planes 2 B(v,Ψ) B(u,Ψ) + sum over aniso B(z,Ψ)^2 / q(z)
  for (auto& [v, u] : S.planes) R.pairs.push_back({K.from_int(2) * psi_of(u), psi_of(v)});
  // orthogonal basis of the anisotropic part (every nonzero vector is anisotropic there)
  std::vector<std::vector<E>> ortho;
  for (auto z : S.aniso) {
    for (auto& o : ortho) axpy(z, -(bil(Gh, z, o) / qval(Gh, o)), o);
    ortho.push_back(z);
  }
  std::vector<std::pair<Poly<F>, E>> rest;
  for (auto& z : ortho) rest.push_back({psi_of(z), K.inv(qval(Gh, z))});
  if (want_square && rest.size() == 1) {
    if (auto s = K.is_square(rest[0].second)) {
      R.square = *s * rest[0].first;
      R.ok = true;
      return R;
    }
  }
  for (auto& [z, lam] : rest) R.pairs.push_back({lam * z, z});
  R.ok = !want_square;
  return R;
}

template <class F>
DecompCert<F> general_rec(const Poly<F>& f, const PairList<F>& pairs, const LinSubspace<F>& P, GeneralState<F>& st);

// the (q0, pairs) decomposition: Case 1 machinery on the square frame
template <class F>
DecompCert<F> square_route(const Poly<F>& f, const Poly<F>& q0, const PairList<F>& pairs, const LinSubspace<F>& P,
                           GeneralState<F>& st) {
  const F& K = *f.K;
  auto& Lg = *st.ledger;
  long r = long(pairs.size()) + 1;
  auto Nc = case2_constants(long(P.dim()), r);
  std::vector<Poly<F>> tuple{q0};
  for (auto& v : flatten(pairs)) tuple.push_back(v);
  auto oc = extract_orth_cocycle<F>(q0, pairs, P, *st.budget);
  size_t dimb = to_size(D_const(r - 1, 0) + c_const(r, r - 1, 0));
  Lg.add("align-square", "alignment with a square: dim L <= D(r,0)+c(r+1,r,0)", digest(tuple),
         hex64(oc.max_dim_L), "dim L " + std::to_string(oc.max_dim_L) + " <= " + std::to_string(dimb),
         oc.max_dim_L <= dimb);
  auto T = trivialize_orth_cocycle(K, oc.C);
  st.out->orths.push_back(oc.C);
  st.out->trivs.push_back(T);
  auto H = level_subgroup(K.group_order(), T.level);
  auto tt = retuple(tuple, inverse(T.B).transpose());
  Lg.add("trivialize", "orthogonal cocycle is a coboundary over k'", digest(tuple), digest(tt),
         "level " + std::to_string(T.level) + ", retries " + std::to_string(T.retries), true);
  std::vector<Poly<F>> fixed;
  for (auto& q : tt) fixed.push_back(rationalize_quadric(q, H).q0);
  auto c = rationalized_cert<F>(f, tt, fixed, P, H, 1, true);
  auto v = verify_certificate(c);
  Lg.add("residual", "slice certificate after rationalizing q0 and the pairs", digest(fixed), digest(c),
         "r2 " + std::to_string(c.pairs.size()) + " <= " + std::to_string(r) + ", M " + Nc.M.get_str(), bool(v));
  if (!v) fail("HypothesisViolated", "square-route certificate fails: " + v.reason);
  return widen_to_base(c, H, &Lg);
}

template <class F>
DecompCert<F> general_rec(const Poly<F>& f, const PairList<F>& pairs, const LinSubspace<F>& P, GeneralState<F>& st) {
  using E = typename F::Elem;
  const F& K = *f.K;
  auto& Lg = *st.ledger;
  auto G = galois_group(K);
  long r = long(pairs.size()), p = long(P.dim());
  std::string tag = "depth " + std::to_string(st.depth) + ", r " + std::to_string(r) + ", p " + std::to_string(p);
  auto c0 = make_cert(f, pairs, P);
  if (cert_over_base(c0)) {
    Lg.add("short-circuit", "decomposition already defined over k", digest(c0), digest(c0), tag, true);
    return c0;
  }
  if (r == 0) {
    auto Pk = galois_hull(P, G);
    auto c = make_cert<F>(f, {}, Pk);
    bool ok = bool(verify_certificate(c)) && Pk.dim() <= size_t(4 * p);
    Lg.add("base", "r = 0: slice descent, c_1(0,r_1) = 4 r_1", digest(c0), digest(c),
           "r1 " + std::to_string(Pk.dim()) + " <= " + std::to_string(4 * p), ok);
    return c;
  }
  auto Phi = flatten(pairs);
  auto pen = min_slice_rank<F>(Phi, {}, *st.budget);
  auto Cr = C_const(r, 0);
  mpz_class thr = 6 * p + 3 * Cr;
  if (mpz_class(pen.value) > thr) {
    st.case1 = true;
    auto A = thmA_constants(p, r);
    Lg.add("case-split", "case 1: srk(q,q') > 6p + 3C(r,0)", digest(Phi), hex64(pen.value),
           tag + ", srk " + std::to_string(pen.value) + " > " + thr.get_str(), true);
    auto oc = extract_orth_cocycle<F>(std::nullopt, pairs, P, *st.budget);
    size_t dimb = to_size(D_const(r, 0));
    Lg.add("align", "A_σ aligns σ(q) with q modulo P + σP: dim L <= D(r,0)", digest(Phi), hex64(oc.max_dim_L),
           "dim L " + std::to_string(oc.max_dim_L) + " <= " + std::to_string(dimb), oc.max_dim_L <= dimb);
    Lg.add("cocycle", "A_{σ1σ2} = σ1(A_σ2) A_σ1", digest(Phi), hex64(oc.C.R.size()), "law checked on all pairs",
           true);
    auto T = trivialize_orth_cocycle(K, oc.C);
    st.out->orths.push_back(oc.C);
    st.out->trivs.push_back(T);
    auto H = level_subgroup(K.group_order(), T.level);
    auto tt = retuple(Phi, inverse(T.B).transpose());
    Lg.add("trivialize", "orthogonal cocycle is a coboundary over k'", digest(Phi), digest(tt),
           "level " + std::to_string(T.level) + ", retries " + std::to_string(T.retries), true);
    std::vector<Poly<F>> fixed;
    size_t worst = 0;
    for (auto& q : tt) {
      auto Rq = rationalize_quadric(q, H);
      worst = std::max(worst, Rq.defect);
      fixed.push_back(Rq.q0);
    }
    auto c = rationalized_cert<F>(f, tt, fixed, P, H, 0, false);
    auto v = verify_certificate(c);
    Lg.add("residual", "slice certificate for f - sum q0 q0'", digest(fixed), digest(c),
           "max rank(q - q0) " + std::to_string(worst), bool(v));
    if (!v) fail("HypothesisViolated", "case 1 certificate fails: " + v.reason);
    auto w = widen_to_base(c, H, &Lg);
    mpz_class r2b = mpz_class(1) << r;
    bool ok = mpz_class(w.pairs.size()) <= r2b * r && mpz_class(w.P.dim()) <= r2b * 4 * A.N2;
    Lg.add("case1-bound", "rk_k(f) <= (2^r r, 2^r 4N'')", digest(c), digest(w),
           "r2 " + std::to_string(w.pairs.size()) + " <= " + mpz_class(r2b * r).get_str() + ", r1 " +
               std::to_string(w.P.dim()) + " <= " + mpz_class(r2b * 4 * A.N2).get_str(),
           ok);
    return w;
  }
  st.case2 = true;
  Lg.add("case-split", "case 2: srk(q,q') <= 3N", digest(Phi), hex64(pen.value),
         tag + ", srk " + std::to_string(pen.value) + " <= " + thr.get_str(), true);
  auto Wt = Frame<F>::hyperbolic(K, int(r)).quad_gram();
  auto drop = [&](const std::vector<E>& a, const std::string& why) -> std::optional<DecompCert<F>> {
    auto g = phi(Phi, a, K, f.n);
    auto P2 = P.plus(slice_witness(g));
    auto Rs = restrict_to_hyperplane(Phi, Wt, a, false);
    if (long(Rs.pairs.size()) > r - 1) return std::nullopt;
    auto cc = make_cert(f, Rs.pairs, P2);
    auto v = verify_certificate(cc);
    Lg.add("drop", why, digest(Phi), digest(cc),
           "r " + std::to_string(Rs.pairs.size()) + " <= " + std::to_string(r - 1), bool(v));
    if (!v) fail("HypothesisViolated", "rank drop certificate fails: " + v.reason);
    st.dropped = true;
    GeneralState<F> sub = st;
    sub.depth++;
    auto out = general_rec(f, Rs.pairs, P2, sub);
    st.case1 |= sub.case1;
    st.case2 |= sub.case2;
    st.square_route |= sub.square_route;
    return out;
  };
  auto a = pen.coeffs;
  E iso = qval(Wt, a);
  if (iso.is_zero()) {
    if (auto c = drop(a, "isotropic combination: restriction of rank 2r-2")) return *c;
  }
  auto g = phi(Phi, a, K, f.n);
  auto P2 = P.plus(slice_witness(g));
  auto Rs = restrict_to_hyperplane(Phi, Wt, a, true);
  if (!Rs.ok) {
    // the square term needs a root outside the tower; look for an isotropic low-rank combination
    if (K.finite()) {
      std::optional<std::vector<E>> alt;
      isotropic_vectors<F>(Frame<F>::hyperbolic(K, int(r)), st.budget->limit, [&](const auto& v) {
        auto m = min_slice_rank<F>({phi(Phi, v, K, f.n)}, {}, *st.budget);
        if (mpz_class(m.value) <= thr) {
          alt = v;
          return false;
        }
        return true;
      });
      if (alt)
        if (auto c = drop(*alt, "isotropic combination found after a nonsquare restriction")) return *c;
    }
    fail("ExtensionRequired", "the restricted form needs a square root outside the tower");
  }
  auto q0 = *Rs.square;
  {
    Poly<F> w = q0 * q0;
    for (auto& [x, y] : Rs.pairs) mul_acc(w, x, y);
    bool ok = reduce_mod(f - w, P2, false).remainder.is_zero();
    Lg.add("square-form", "restriction of rank 2r-1: f = q0^2 + sum_{i<r} q q'", digest(Phi), digest<F>({q0}),
           "r-1 = " + std::to_string(Rs.pairs.size()), ok);
    if (!ok) fail("HypothesisViolated", "square form does not match f");
  }
  // a further drop when srk(q0, q') <= 3N'
  auto Nc = case2_constants(long(P2.dim()), r);
  if (!Rs.pairs.empty()) {
    std::vector<Poly<F>> tup{q0};
    for (auto& v : flatten(Rs.pairs)) tup.push_back(v);
    auto m = min_slice_rank<F>(tup, {}, *st.budget);
    if (mpz_class(m.value) <= 3 * Nc.N1) {
      auto Ws = Frame<F>::with_square(K, int(r - 1)).quad_gram();
      auto R2 = restrict_to_hyperplane(tup, Ws, m.coeffs, false);
      if (long(R2.pairs.size()) <= r - 1) {
        auto P3 = P2.plus(slice_witness(phi(tup, m.coeffs, K, f.n)));
        auto cc = make_cert(f, R2.pairs, P3);
        auto v = verify_certificate(cc);
        Lg.add("drop", "srk(q0, q, q') <= 3N': drop to r-1", digest(tup), digest(cc),
               "r " + std::to_string(R2.pairs.size()) + " <= " + std::to_string(r - 1), bool(v));
        if (v) {
          st.dropped = true;
          GeneralState<F> sub = st;
          sub.depth++;
          auto out = general_rec(f, R2.pairs, P3, sub);
          st.case1 |= sub.case1;
          st.square_route |= sub.square_route;
          return out;
        }
      }
    }
  }
  st.square_route = true;
  return square_route(f, q0, Rs.pairs, P2, st);
}

template <class F>
struct GeneralResult : DescentResult<F> {
  bool case1 = false, case2 = false, square_route = false, dropped = false;
};

template <class F>
GeneralResult<F> descend_quartic_general(const Poly<F>& f, const DecompCert<F>& cert, Budget& budget) {
  require_input(f, cert);
  GeneralResult<F> R;
  GeneralState<F> st{&budget, &R.ledger, &R};
  auto c = general_rec(f, cert.pairs, cert.P, st);
  if (!cert_over_base(c)) fail("InternalError", "general pipeline left coefficients outside k");
  auto base = cert_to_base(c);
  auto v = verify_certificate(base);
  R.ledger.add("final", "descended decomposition over k", digest(cert), digest(base),
               "r2 " + std::to_string(base.pairs.size()) + ", r1 " + std::to_string(base.P.dim()), bool(v));
  if (!v) fail("HypothesisViolated", "descended certificate fails: " + v.reason);
  R.cert = base;
  R.case1 = st.case1;
  R.case2 = st.case2;
  R.square_route = st.square_route;
  R.dropped = st.dropped;
  R.route = st.case1 ? "case1" : st.square_route ? "case2-square" : st.case2 ? "case2-drop" : "already-over-base";
  return R;
}

}  // namespace strength
