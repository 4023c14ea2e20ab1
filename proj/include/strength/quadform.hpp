#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "strength/conic.hpp"
#include "strength/poly.hpp"

namespace strength {

template <class F>
size_t quad_rank(const Poly<F>& q) {
  return rank(gram(q));
}

inline size_t srk_from_rank(size_t rk) { return (rk + 1) / 2; }

template <class F>
size_t slice_rank_quadric(const Poly<F>& q) {
  return srk_from_rank(quad_rank(q));
}

// ---------------------------------------------------------------- bilinear helpers

template <class F>
typename F::Elem bil(const Mat<F>& G, const std::vector<typename F::Elem>& x, const std::vector<typename F::Elem>& y) {
  auto Gy = mat_vec(G, y);
  auto s = G.K->zero();
  for (size_t i = 0; i < x.size(); ++i)
    if (!x[i].is_zero()) s += x[i] * Gy[i];
  return s;
}

template <class F>
typename F::Elem qval(const Mat<F>& G, const std::vector<typename F::Elem>& x) {
  return bil(G, x, x);
}

// ---------------------------------------------------------------- frames

// Coordinates: [slot 0 if square], e_1..e_r, f_1..f_r.  J is the Gram matrix
// of sum x_i y_i, or of a_0^2 + 4 sum a_i a'_i for the square variant.
template <class F>
struct Frame {
  int r = 0;
  bool square = false;
  Mat<F> J;

  size_t dim() const { return 2 * r + (square ? 1 : 0); }
  size_t e(int i) const { return (square ? 1 : 0) + i; }
  size_t f(int i) const { return (square ? 1 : 0) + r + i; }

  static Frame hyperbolic(const F& K, int r) {
    Frame fr;
    fr.r = r;
    fr.J = Mat<F>(K, 2 * r, 2 * r);
    auto half = K.inv(K.from_int(2));
    for (int i = 0; i < r; ++i) {
      fr.J(fr.e(i), fr.f(i)) = half;
      fr.J(fr.f(i), fr.e(i)) = half;
    }
    return fr;
  }
  static Frame with_square(const F& K, int r) {
    Frame fr;
    fr.r = r;
    fr.square = true;
    fr.J = Mat<F>(K, 2 * r + 1, 2 * r + 1);
    fr.J(0, 0) = K.one();
    for (int i = 0; i < r; ++i) {
      fr.J(fr.e(i), fr.f(i)) = K.from_int(2);
      fr.J(fr.f(i), fr.e(i)) = K.from_int(2);
    }
    return fr;
  }
  // Gram matrix of the form on quadric tuples whose value is the quartic:
  // sum x_i y_i (+ x_0^2).  Inverse to J up to the factor 4 on each plane.
  Mat<F> quad_gram() const {
    const F& K = *J.K;
    Mat<F> W(K, dim(), dim());
    auto half = K.inv(K.from_int(2));
    if (square) W(0, 0) = K.one();
    for (int i = 0; i < r; ++i) {
      W(e(i), f(i)) = half;
      W(f(i), e(i)) = half;
    }
    return W;
  }
};

template <class F>
bool is_orthogonal(const Mat<F>& A, const Frame<F>& fr) {
  if (A.rows != fr.dim() || A.cols != fr.dim()) fail("DimensionMismatch", "matrix does not match the frame");
  return A.transpose() * fr.J * A == fr.J;
}

template <class F>
bool preserves(const Mat<F>& A, const Mat<F>& G) {
  return A.transpose() * G * A == G;
}

// One representative per projective isotropic vector (first nonzero entry
// normalized to 1), lexicographic in element indices.  The callback returns
// false to stop early.
template <class F>
void isotropic_vectors(const Frame<F>& fr, uint64_t budget,
                       const std::function<bool(const std::vector<typename F::Elem>&)>& cb) {
  const F& K = *fr.J.K;
  if (!K.finite()) fail("UnsupportedExactOverRationals", "isotropic enumeration needs a finite field");
  size_t m = fr.dim();
  uint64_t q = K.size();
  uint64_t total = 0;
  {
    long double t = 0, pw = 1;
    for (size_t i = 0; i < m; ++i, pw *= q) t += pw;
    if (t > (long double)budget) fail("BudgetExceeded", "isotropic enumeration exceeds the budget");
    total = uint64_t(t);
  }
  (void)total;
  std::vector<typename F::Elem> v(m, K.zero());
  for (size_t lead = 0; lead < m; ++lead) {
    std::vector<uint64_t> digits(m - lead - 1, 0);
    while (true) {
      for (size_t i = 0; i < m; ++i) v[i] = K.zero();
      v[lead] = K.one();
      for (size_t k = 0; k < digits.size(); ++k) v[lead + 1 + k] = K.element(digits[k]);
      if (qval(fr.J, v).is_zero())
        if (!cb(v)) return;
      size_t k = digits.size();
      while (k > 0 && digits[k - 1] == q - 1) digits[--k] = 0;
      if (k == 0) break;
      ++digits[k - 1];
    }
  }
}

template <class F>
std::vector<std::vector<typename F::Elem>> all_isotropic(const Frame<F>& fr, uint64_t budget) {
  std::vector<std::vector<typename F::Elem>> out;
  isotropic_vectors<F>(fr, budget, [&](const auto& v) {
    out.push_back(v);
    return true;
  });
  return out;
}

// ---------------------------------------------------------------- diagonalization

template <class F>
struct Diagonalization {
  Mat<F> M;  // columns = new basis; M^T G M = diag
  std::vector<typename F::Elem> diag;
};

template <class F>
Diagonalization<F> diagonalize(const Mat<F>& G) {
  const F& K = *G.K;
  size_t n = G.rows;
  Mat<F> A = G;
  Mat<F> M = Mat<F>::identity(K, n);
  auto add_col = [&](size_t dst, size_t src, const typename F::Elem& t) {
    // basis change v_dst += t v_src
    for (size_t i = 0; i < n; ++i) M(i, dst) += t * M(i, src);
    for (size_t i = 0; i < n; ++i) A(i, dst) += t * A(i, src);
    for (size_t j = 0; j < n; ++j) A(dst, j) += t * A(src, j);
  };
  auto swap_idx = [&](size_t a, size_t b) {
    if (a == b) return;
    for (size_t i = 0; i < n; ++i) std::swap(M(i, a), M(i, b));
    for (size_t i = 0; i < n; ++i) std::swap(A(i, a), A(i, b));
    for (size_t j = 0; j < n; ++j) std::swap(A(a, j), A(b, j));
  };
  for (size_t k = 0; k < n; ++k) {
    size_t p = k;
    while (p < n && A(p, p).is_zero()) ++p;
    if (p == n) {
      bool found = false;
      for (size_t i = k; i < n && !found; ++i)
        for (size_t j = i + 1; j < n && !found; ++j)
          if (!A(i, j).is_zero()) {
            add_col(i, j, K.one());
            p = i;
            found = true;
          }
      if (!found) break;
    }
    swap_idx(k, p);
    auto iv = K.inv(A(k, k));
    for (size_t j = k + 1; j < n; ++j)
      if (!A(k, j).is_zero()) add_col(j, k, -(A(k, j) * iv));
  }
  Diagonalization<F> D{M, {}};
  for (size_t i = 0; i < n; ++i) D.diag.push_back(A(i, i));
  return D;
}

// ---------------------------------------------------------------- tower lifts

inline PElem lift(const PrimeTower& to, const PElem& x) { return to.make_elem(x.a, x.b); }
inline QElem lift(const RationalTower& to, const QElem& x) { return to.embed(x); }

template <class F>
Mat<F> lift(const F& to, const Mat<F>& A) {
  Mat<F> B(to, A.rows, A.cols);
  for (size_t i = 0; i < A.a.size(); ++i) B.a[i] = lift(to, A.a[i]);
  return B;
}

template <class F>
Poly<F> lift(const F& to, const Poly<F>& f) {
  Poly<F> g(to, f.n, f.d);
  for (size_t i = 0; i < f.c.size(); ++i) g.c[i] = lift(to, f.c[i]);
  return g;
}

// Adjoin a square root of x (which must lie in the base field).
inline std::shared_ptr<const PrimeTower> adjoin_root(const PrimeTower& K, const PElem& x) {
  if (K.height() > 0) fail("SquareAdjoined", "every element is already a square in " + K.descriptor());
  return PrimeTower::make(long(K.p()), {K.balanced(x.a)});
}

inline std::shared_ptr<const RationalTower> adjoin_root(const RationalTower& K, const QElem& x) {
  for (size_t S = 1; S < x.c.size(); ++S)
    if (sgn(x.c[S])) fail("UnsupportedExtension", "root of a non-rational element would leave the (Z/2)^m towers");
  return K.extend({x.c[0]});
}

template <class F>
struct Hyperbolization {
  std::shared_ptr<const F> tower;
  std::vector<std::string> adjoined;
  Mat<F> M;  // (diag form)∘M = sum x_i y_i (+ residual z^2), coordinates x.., y.., z
  std::optional<typename F::Elem> residual;
};

// Pairs entries (2i, 2i+1): λ1 x² + λ2 y² = λ1 (x + s y)(x − s y), s² = −λ2/λ1.
template <class F>
Hyperbolization<F> hyperbolize(std::shared_ptr<const F> K, const std::vector<typename F::Elem>& diag) {
  using E = typename F::Elem;
  for (auto& x : diag)
    if (x.is_zero()) fail("ZeroDiagEntry", "hyperbolize needs nonzero diagonal entries");
  size_t m = diag.size();
  int r = int(m / 2);
  Hyperbolization<F> H;
  H.tower = K;
  for (int i = 0; i < r; ++i) {
    E t = -(lift(*H.tower, diag[2 * i + 1]) / lift(*H.tower, diag[2 * i]));
    if (!H.tower->is_square(t)) {
      H.tower = adjoin_root(*H.tower, t);
      H.adjoined.push_back(H.tower->format(lift(*H.tower, t)));
    }
  }
  const F& T = *H.tower;
  H.M = Mat<F>(T, m, m);
  auto half = T.inv(T.from_int(2));
  for (int i = 0; i < r; ++i) {
    E l1 = lift(T, diag[2 * i]), l2 = lift(T, diag[2 * i + 1]);
    E s = *T.is_square(-(l2 / l1));
    // x = u/(2 l1) + v/2, y = u/(2 l1 s) - v/(2 s)
    size_t x = 2 * i, y = 2 * i + 1, u = i, v = r + i;
    H.M(x, u) = half / l1;
    H.M(x, v) = half;
    H.M(y, u) = half / (l1 * s);
    H.M(y, v) = -(half / s);
  }
  if (m % 2) {
    H.M(m - 1, m - 1) = T.one();
    H.residual = lift(T, diag[m - 1]);
  }
  return H;
}

// ---------------------------------------------------------------- isotropy

inline constexpr int kFullTower = 1 << 20;

template <class F>
std::vector<typename F::Elem> candidate_scalars(const F& K, size_t limit, int level = kFullTower) {
  std::vector<typename F::Elem> out;
  if (K.finite()) {
    uint64_t q = K.size();
    for (uint64_t i = 0; i < q && out.size() < limit; ++i) {
      auto x = K.element(i);
      if (K.in_level(x, level)) out.push_back(x);
    }
  } else {
    out.push_back(K.zero());
    for (long v = 1; out.size() < limit && v < 60; ++v) {
      out.push_back(K.from_int(v));
      out.push_back(K.from_int(-v));
      for (long w = 2; w <= 4; ++w) {
        out.push_back(K.from_ratio(v, w));
        out.push_back(K.from_ratio(-v, w));
      }
    }
  }
  return out;
}

// Nonzero isotropic vector of a nondegenerate Gram matrix, if one is found.
// Exhaustive over finite fields (always succeeds in dimension >= 3); a
// search over small rationals otherwise.  With a level, G and the result
// live in that level of the tower.
template <class F>
std::optional<std::vector<typename F::Elem>> find_isotropic(const Mat<F>& G, int level = kFullTower) {
  using E = typename F::Elem;
  const F& K = *G.K;
  size_t n = G.rows;
  if (n == 0) return std::nullopt;
  auto sq = [&](const E& x) { return K.is_square_in_level(x, level); };
  for (size_t i = 0; i < n; ++i)
    if (G(i, i).is_zero()) {
      std::vector<E> v(n, K.zero());
      v[i] = K.one();
      return v;
    }
  auto D = diagonalize(G);
  std::vector<size_t> nz;
  for (size_t i = 0; i < n; ++i)
    if (!D.diag[i].is_zero()) nz.push_back(i);
  if (nz.size() < n) {
    std::vector<E> c(n, K.zero());
    for (size_t i = 0; i < n; ++i)
      if (D.diag[i].is_zero()) c[i] = K.one();
    return mat_vec(D.M, c);
  }
  auto from_diag = [&](const std::vector<std::pair<size_t, E>>& coords) {
    std::vector<E> c(n, K.zero());
    for (auto& [i, v] : coords) c[i] = v;
    return mat_vec(D.M, c);
  };
  for (size_t a = 0; a < n; ++a)
    for (size_t b = a + 1; b < n; ++b)
      if (auto s = sq(-(D.diag[b] / D.diag[a]))) return from_diag({{a, *s}, {b, K.one()}});
  if (n < 3) return std::nullopt;
  if constexpr (std::is_same_v<F, RationalTower>) {
    size_t lim = std::min<size_t>(n, 5);
    for (size_t a = 0; a < lim; ++a)
      for (size_t b = a + 1; b < lim; ++b)
        for (size_t c = b + 1; c < lim; ++c) {
          if (!K.in_level(D.diag[a], 0) || !K.in_level(D.diag[b], 0) || !K.in_level(D.diag[c], 0)) continue;
          auto z = solve_ternary(D.diag[a].c[0], D.diag[b].c[0], D.diag[c].c[0]);
          if (z) return from_diag({{a, K.from_mpq((*z)[0])}, {b, K.from_mpq((*z)[1])}, {c, K.from_mpq((*z)[2])}});
        }
  }
  auto xs = candidate_scalars(K, K.finite() ? size_t(-1) : 400, level);
  size_t lim = K.finite() ? 3 : std::min<size_t>(n, 5);
  for (size_t a = 0; a < lim; ++a)
    for (size_t b = a + 1; b < lim; ++b)
      for (size_t c = b + 1; c < lim; ++c)
        for (const E& x : xs) {
          E rhs = -((D.diag[a] * x * x + D.diag[b]) / D.diag[c]);
          if (auto z = sq(rhs)) return from_diag({{a, x}, {b, K.one()}, {c, *z}});
        }
  if (!K.finite() && n >= 4) {
    for (const E& x : xs)
      for (size_t k = 0; k < 40 && k < xs.size(); ++k) {
        const E& y = xs[k];
        E rhs = -((D.diag[0] * x * x + D.diag[1] * y * y + D.diag[2]) / D.diag[3]);
        if (auto z = sq(rhs)) return from_diag({{0, x}, {1, y}, {2, K.one()}, {3, *z}});
      }
  }
  return std::nullopt;
}

template <class F>
struct HyperbolicSplit {
  std::vector<std::vector<typename F::Elem>> radical;  // basis of the radical
  // pairs (v, u): q(v) = q(u) = 0, B(v, u) = 1, mutually orthogonal planes
  std::vector<std::pair<std::vector<typename F::Elem>, std::vector<typename F::Elem>>> planes;
  std::vector<std::vector<typename F::Elem>> aniso;  // basis of the anisotropic rest
};

template <class F>
std::vector<std::vector<typename F::Elem>> orth_complement_in(const Mat<F>& G,
                                                              const std::vector<std::vector<typename F::Elem>>& basis,
                                                              const std::vector<std::vector<typename F::Elem>>& against) {
  using E = typename F::Elem;
  const F& K = *G.K;
  if (basis.empty()) return {};
  Mat<F> C(K, against.size(), basis.size());
  for (size_t i = 0; i < against.size(); ++i) {
    auto Ga = mat_vec(G, against[i]);
    for (size_t j = 0; j < basis.size(); ++j) {
      E s = K.zero();
      for (size_t k = 0; k < Ga.size(); ++k) s += Ga[k] * basis[j][k];
      C(i, j) = s;
    }
  }
  std::vector<std::vector<E>> out;
  for (auto& c : nullspace(C)) {
    std::vector<E> v(G.rows, K.zero());
    for (size_t j = 0; j < basis.size(); ++j) axpy(v, c[j], basis[j]);
    out.push_back(v);
  }
  return out;
}

template <class F>
HyperbolicSplit<F> hyperbolic_split(const Mat<F>& G, int level = kFullTower) {
  using E = typename F::Elem;
  const F& K = *G.K;
  size_t n = G.rows;
  HyperbolicSplit<F> S;
  S.radical = nullspace(G);
  // complement of the radical: coordinate vectors not in its span
  std::vector<std::vector<E>> basis;
  {
    std::vector<std::vector<E>> acc = S.radical;
    size_t rk0 = acc.empty() ? 0 : rank(from_rows(K, acc, n));
    for (size_t i = 0; i < n; ++i) {
      std::vector<E> e(n, K.zero());
      e[i] = K.one();
      acc.push_back(e);
      size_t rk = rank(from_rows(K, acc, n));
      if (rk > rk0) {
        basis.push_back(e);
        rk0 = rk;
      } else {
        acc.pop_back();
      }
    }
  }
  while (!basis.empty()) {
    size_t m = basis.size();
    Mat<F> Gb(K, m, m);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j) Gb(i, j) = bil(G, basis[i], basis[j]);
    auto w = find_isotropic(Gb, level);
    if (!w) break;
    std::vector<E> v(n, K.zero());
    for (size_t j = 0; j < m; ++j) axpy(v, (*w)[j], basis[j]);
    std::vector<E> u;
    for (size_t j = 0; j < m; ++j) {
      E b = bil(G, v, basis[j]);
      if (!b.is_zero()) {
        u = basis[j];
        for (auto& x : u) x = x / b;
        break;
      }
    }
    // make u isotropic: q(u - t v) = q(u) - 2t
    E t = qval(G, u) * K.inv(K.from_int(2));
    axpy(u, -t, v);
    S.planes.push_back({v, u});
    basis = orth_complement_in(G, basis, {v, u});
  }
  S.aniso = basis;
  return S;
}

// L with q ∈ (L) of least dimension rk − (Witt index) over K (the Witt index
// is exact over finite fields, a lower estimate over Q).
template <class F>
LinSubspace<F> slice_witness(const Mat<F>& G) {
  using E = typename F::Elem;
  const F& K = *G.K;
  int n = int(G.rows);
  auto S = hyperbolic_split(G);
  std::vector<std::vector<E>> U = S.radical;
  for (auto& [v, u] : S.planes) U.push_back(v);
  if (U.empty()) {
    std::vector<std::vector<E>> all;
    for (int i = 0; i < n; ++i) {
      std::vector<E> e(n, K.zero());
      e[i] = K.one();
      all.push_back(e);
    }
    return LinSubspace<F>::span(K, n, all);
  }
  return LinSubspace<F>::span(K, n, nullspace(from_rows(K, U, size_t(n))));
}

template <class F>
LinSubspace<F> slice_witness(const Poly<F>& q) {
  return slice_witness(gram(q));
}

// ---------------------------------------------------------------- reflections

template <class F>
Mat<F> reflection(const Mat<F>& G, const std::vector<typename F::Elem>& u) {
  // τ_u(x) = x − 2 B(x,u)/B(u,u) u
  const F& K = *G.K;
  auto Quu = qval(G, u);
  if (Quu.is_zero()) fail("SingularMatrix", "reflection in an isotropic vector");
  size_t n = G.rows;
  auto Gu = mat_vec(G, u);
  auto c = K.from_int(2) / Quu;
  Mat<F> T = Mat<F>::identity(K, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) T(i, j) -= c * u[i] * Gu[j];
  return T;
}

// Orthogonal T (T^T G T = G) with T x = y, for q(x) = q(y), x, y nonzero.
template <class F>
std::optional<Mat<F>> orthogonal_map(const Mat<F>& G, const std::vector<typename F::Elem>& x,
                                     const std::vector<typename F::Elem>& y) {
  using E = typename F::Elem;
  const F& K = *G.K;
  size_t n = G.rows;
  auto sub = [](std::vector<E> a, const std::vector<E>& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
  };
  auto add = [](std::vector<E> a, const std::vector<E>& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
  };
  if (x == y) return Mat<F>::identity(K, n);
  auto d = sub(x, y);
  if (!qval(G, d).is_zero()) return reflection(G, d);
  if (!qval(G, y).is_zero()) {
    auto s = add(x, y);
    if (!qval(G, s).is_zero()) return reflection(G, y) * reflection(G, s);
  }
  // go through an intermediate w with q(x−w) ≠ 0 ≠ q(w−y)
  std::vector<std::vector<E>> zs;
  for (size_t i = 0; i < n; ++i) {
    std::vector<E> e(n, K.zero());
    e[i] = K.one();
    zs.push_back(e);
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      for (int s : {1, -1}) {
        std::vector<E> e(n, K.zero());
        e[i] = K.one();
        e[j] = K.from_int(s);
        zs.push_back(e);
      }
  auto qx = qval(G, x);
  for (auto& z : zs) {
    // w = x + t z + ... chosen with q(w) = q(x)
    for (int variant = 0; variant < 2; ++variant) {
      const auto& a = variant == 0 ? x : y;
      auto Bza = bil(G, z, a);
      std::vector<E> w;
      if (!Bza.is_zero()) {
        // w = z + t a, solve q(z) + 2t B(z,a) + t^2 q(a) = q(x); with q(a) = q(x) use t linear when q(x)=0
        if (!qx.is_zero()) continue;
        E t = -(qval(G, z) / (K.from_int(2) * Bza));
        w = z;
        axpy(w, t, a);
      } else {
        continue;
      }
      auto d1 = sub(x, w), d2 = sub(w, y);
      if (qval(G, d1).is_zero() || qval(G, d2).is_zero()) continue;
      return reflection(G, d2) * reflection(G, d1);
    }
  }
  return std::nullopt;
}

}  // namespace strength
