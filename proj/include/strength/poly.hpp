#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "strength/matrix.hpp"
#include "strength/parse.hpp"

namespace strength {

inline constexpr const char* kMonomialOrder = "grlex";

// ---------------------------------------------------------------- monomials

// Monomials of degree d in n variables, stored as sorted variable-index
// multisets.  Order: graded, then lexicographic on exponent vectors with x1
// largest, i.e. ascending lex order of the sorted index lists.
struct Monomials {
  int n = 0, d = 0;
  size_t N = 0;
  std::vector<int> idx;  // N * d
  // div[m * n + v] = index of m / x_v in degree d-1, or npos
  std::vector<uint32_t> div;
  static constexpr uint32_t npos = 0xffffffffu;

  const int* at(size_t m) const { return idx.data() + m * d; }
  size_t rank(const int* s) const;
  size_t rank(const std::vector<int>& s) const { return rank(s.data()); }
  std::vector<int> exponents(size_t m) const {
    std::vector<int> e(n, 0);
    for (int k = 0; k < d; ++k) ++e[at(m)[k]];
    return e;
  }
};

inline uint64_t binom(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  uint64_t r = 1;
  for (uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// multisets of size k from the values {v, ..., n-1}
inline uint64_t multichoose_from(int n, int v, int k) {
  if (k == 0) return 1;
  if (v >= n) return 0;
  return binom(uint64_t(n - v + k - 1), uint64_t(k));
}

inline size_t Monomials::rank(const int* s) const {
  size_t r = 0;
  int prev = 0;
  for (int k = 0; k < d; ++k) {
    for (int v = prev; v < s[k]; ++v) r += multichoose_from(n, v, d - k - 1);
    prev = s[k];
  }
  return r;
}

namespace detail {

inline std::shared_ptr<const Monomials> build_monomials(int n, int d) {
  auto M = std::make_shared<Monomials>();
  M->n = n;
  M->d = d;
  M->N = multichoose_from(n, 0, d);
  M->idx.reserve(M->N * d);
  std::vector<int> s(d, 0);
  if (n > 0 || d == 0) {
    while (true) {
      M->idx.insert(M->idx.end(), s.begin(), s.end());
      int k = d - 1;
      while (k >= 0 && s[k] == n - 1) --k;
      if (k < 0) break;
      int v = s[k] + 1;
      for (int j = k; j < d; ++j) s[j] = v;
    }
  }
  M->N = M->idx.size() / std::max(d, 1);
  if (d == 0) M->N = 1;
  return M;
}

inline std::mutex& table_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

inline const Monomials& monomials(int n, int d) {
  static std::map<std::pair<int, int>, std::shared_ptr<const Monomials>> cache;
  std::lock_guard<std::mutex> lock(detail::table_mutex());
  auto& slot = cache[{n, d}];
  if (!slot) {
    auto M = std::const_pointer_cast<Monomials>(detail::build_monomials(n, d));
    if (d > 0) {
      auto lower = detail::build_monomials(n, d - 1);
      M->div.assign(M->N * n, Monomials::npos);
      std::vector<int> t(d - 1);
      for (size_t m = 0; m < M->N; ++m) {
        const int* s = M->at(m);
        for (int k = 0; k < d; ++k) {
          if (k && s[k] == s[k - 1]) continue;
          int o = 0;
          for (int j = 0; j < d; ++j)
            if (j != k) t[o++] = s[j];
          M->div[m * n + s[k]] = uint32_t(lower->rank(t.data()));
        }
      }
    }
    slot = M;
  }
  return *slot;
}

// Index of the product of monomial i (degree d1) and j (degree d2).
inline const std::vector<uint32_t>& product_table(int n, int d1, int d2) {
  static std::map<std::tuple<int, int, int>, std::vector<uint32_t>> cache;
  const Monomials& A = monomials(n, d1);
  const Monomials& B = monomials(n, d2);
  const Monomials& C = monomials(n, d1 + d2);
  std::lock_guard<std::mutex> lock(detail::table_mutex());
  auto& t = cache[{n, d1, d2}];
  if (t.empty() && A.N * B.N > 0) {
    t.resize(A.N * B.N);
    std::vector<int> s(d1 + d2);
    for (size_t i = 0; i < A.N; ++i)
      for (size_t j = 0; j < B.N; ++j) {
        std::merge(A.at(i), A.at(i) + d1, B.at(j), B.at(j) + d2, s.begin());
        t[i * B.N + j] = uint32_t(C.rank(s.data()));
      }
  }
  return t;
}

// ---------------------------------------------------------------- polynomials

template <class F>
struct Poly {
  using E = typename F::Elem;
  const F* K = nullptr;
  int n = 0, d = 0;
  std::vector<E> c;

  Poly() = default;
  Poly(const F& k, int n_, int d_) : K(&k), n(n_), d(d_), c(monomials(n_, d_).N, k.zero()) {}

  const Monomials& mons() const { return monomials(n, d); }
  bool is_zero() const { return all_zero(c); }
  size_t size() const { return c.size(); }

  static Poly var(const F& k, int n, int i) {
    Poly p(k, n, 1);
    p.c[i] = k.one();
    return p;
  }
  static Poly constant(const F& k, int n, const E& v) {
    Poly p(k, n, 0);
    p.c[0] = v;
    return p;
  }
  static Poly linear(const F& k, const std::vector<E>& coeffs) {
    Poly p(k, int(coeffs.size()), 1);
    p.c = coeffs;
    return p;
  }
};

template <class F>
void check_same(const Poly<F>& f, const Poly<F>& g) {
  if (f.n != g.n || (f.K && g.K && f.K != g.K)) fail("MixedRings", "polynomials over different rings");
}

template <class F>
Poly<F> operator+(const Poly<F>& f, const Poly<F>& g) {
  check_same(f, g);
  if (f.d != g.d) fail("MixedRings", "sum of polynomials of different degrees");
  Poly<F> h = f;
  for (size_t i = 0; i < h.c.size(); ++i) h.c[i] += g.c[i];
  return h;
}

template <class F>
Poly<F> operator-(const Poly<F>& f, const Poly<F>& g) {
  check_same(f, g);
  if (f.d != g.d) fail("MixedRings", "difference of polynomials of different degrees");
  Poly<F> h = f;
  for (size_t i = 0; i < h.c.size(); ++i) h.c[i] -= g.c[i];
  return h;
}

template <class F>
Poly<F> operator-(const Poly<F>& f) {
  Poly<F> h = f;
  for (auto& x : h.c) x = -x;
  return h;
}

template <class F>
Poly<F> operator*(const typename F::Elem& s, const Poly<F>& f) {
  Poly<F> h = f;
  for (auto& x : h.c) x = x * s;
  return h;
}

template <class F>
Poly<F>& operator+=(Poly<F>& f, const Poly<F>& g) {
  check_same(f, g);
  if (f.d != g.d) fail("MixedRings", "sum of polynomials of different degrees");
  for (size_t i = 0; i < f.c.size(); ++i)
    if (!g.c[i].is_zero()) f.c[i] += g.c[i];
  return f;
}

template <class F>
Poly<F>& operator-=(Poly<F>& f, const Poly<F>& g) {
  check_same(f, g);
  if (f.d != g.d) fail("MixedRings", "difference of polynomials of different degrees");
  for (size_t i = 0; i < f.c.size(); ++i)
    if (!g.c[i].is_zero()) f.c[i] -= g.c[i];
  return f;
}

// f += s * g
template <class F>
void add_scaled(Poly<F>& f, const typename F::Elem& s, const Poly<F>& g) {
  if (s.is_zero()) return;
  for (size_t i = 0; i < f.c.size(); ++i)
    if (!g.c[i].is_zero()) f.c[i] += s * g.c[i];
}

template <class F>
bool operator==(const Poly<F>& f, const Poly<F>& g) {
  if (f.n != g.n || f.d != g.d) return false;
  for (size_t i = 0; i < f.c.size(); ++i)
    if (f.c[i] != g.c[i]) return false;
  return true;
}

template <class F>
bool operator!=(const Poly<F>& f, const Poly<F>& g) {
  return !(f == g);
}

// acc += f * g
template <class F>
void mul_acc(Poly<F>& acc, const Poly<F>& f, const Poly<F>& g) {
  const auto& T = product_table(f.n, f.d, g.d);
  size_t N2 = g.c.size();
  std::vector<size_t> nzg;
  for (size_t j = 0; j < N2; ++j)
    if (!g.c[j].is_zero()) nzg.push_back(j);
  for (size_t i = 0; i < f.c.size(); ++i) {
    if (f.c[i].is_zero()) continue;
    const uint32_t* row = T.data() + i * N2;
    for (size_t j : nzg) acc.c[row[j]] += f.c[i] * g.c[j];
  }
}

template <class F>
Poly<F> operator*(const Poly<F>& f, const Poly<F>& g) {
  check_same(f, g);
  const F& K = *(f.K ? f.K : g.K);
  Poly<F> h(K, f.n, f.d + g.d);
  mul_acc(h, f, g);
  return h;
}

template <class F>
Poly<F> galois_apply(const Poly<F>& f, GalEl g) {
  if (g >= f.K->group_order()) fail("LevelOutOfRange", "Galois element outside the tower");
  Poly<F> h = f;
  for (auto& x : h.c) x = f.K->act(x, g);
  return h;
}

template <class F>
bool defined_over_level(const Poly<F>& f, int level) {
  for (auto& x : f.c)
    if (!f.K->in_level(x, level)) return false;
  return true;
}

// ---------------------------------------------------------------- quadrics

template <class F>
Mat<F> gram(const Poly<F>& q) {
  if (q.d != 2) fail("DimensionMismatch", "Gram matrix of a non-quadric");
  const F& K = *q.K;
  auto half = K.inv(K.from_int(2));
  Mat<F> G(K, q.n, q.n);
  const auto& M = q.mons();
  for (size_t m = 0; m < M.N; ++m) {
    int i = M.at(m)[0], j = M.at(m)[1];
    if (i == j) {
      G(i, i) = q.c[m];
    } else {
      G(i, j) = q.c[m] * half;
      G(j, i) = G(i, j);
    }
  }
  return G;
}

template <class F>
Poly<F> quadric(const Mat<F>& G) {
  int n = int(G.rows);
  Poly<F> q(*G.K, n, 2);
  const auto& M = q.mons();
  for (size_t m = 0; m < M.N; ++m) {
    int i = M.at(m)[0], j = M.at(m)[1];
    q.c[m] = i == j ? G(i, i) : G(i, j) + G(j, i);
  }
  return q;
}

// ---------------------------------------------------------------- linear change

// f(Mx): x_i is replaced by sum_j M(i,j) x_j.
template <class F>
Poly<F> linear_change(const Poly<F>& f, const Mat<F>& M) {
  if (int(M.rows) != f.n || M.rows != M.cols) fail("DimensionMismatch", "linear change");
  if (f.d == 2) return quadric(M.transpose() * gram(f) * M);
  const F& K = *f.K;
  std::vector<Poly<F>> L;
  for (int i = 0; i < f.n; ++i) L.push_back(Poly<F>::linear(K, M.row(i)));
  Poly<F> out(K, f.n, f.d);
  if (f.d == 0) return f;
  const auto& Mo = f.mons();
  // walk monomials in order, reusing the product of the shared prefix
  std::vector<Poly<F>> prefix(f.d + 1);
  prefix[0] = Poly<F>::constant(K, f.n, K.one());
  std::vector<int> cur(f.d, -1);
  for (size_t m = 0; m < Mo.N; ++m) {
    if (f.c[m].is_zero()) continue;
    const int* s = Mo.at(m);
    int k = 0;
    while (k < f.d && cur[k] == s[k]) ++k;
    for (int j = k; j < f.d; ++j) {
      prefix[j + 1] = prefix[j] * L[s[j]];
      cur[j] = s[j];
    }
    add_scaled(out, f.c[m], prefix[f.d]);
  }
  return out;
}

// ---------------------------------------------------------------- linear subspaces

template <class F>
struct LinSubspace {
  using E = typename F::Elem;
  const F* K = nullptr;
  int n = 0;
  Mat<F> rows;  // RREF, dim x n
  std::vector<size_t> piv;

  LinSubspace() = default;
  LinSubspace(const F& k, int n_) : K(&k), n(n_), rows(k, 0, n_) {}

  static LinSubspace span(const F& k, int n, const std::vector<std::vector<E>>& gens) {
    LinSubspace P(k, n);
    if (gens.empty()) return P;
    Mat<F> M = from_rows(k, gens, n);
    auto pv = rref(M);
    P.rows = Mat<F>(k, pv.size(), n);
    for (size_t i = 0; i < pv.size(); ++i)
      for (int j = 0; j < n; ++j) P.rows(i, j) = M(i, j);
    P.piv = pv;
    return P;
  }

  size_t dim() const { return piv.size(); }
  std::vector<E> basis(size_t i) const { return rows.row(i); }
  std::vector<std::vector<E>> basis() const {
    std::vector<std::vector<E>> b;
    for (size_t i = 0; i < dim(); ++i) b.push_back(basis(i));
    return b;
  }
  std::vector<Poly<F>> forms() const {
    std::vector<Poly<F>> out;
    for (size_t i = 0; i < dim(); ++i) out.push_back(Poly<F>::linear(*K, basis(i)));
    return out;
  }
  LinSubspace plus(const LinSubspace& o) const {
    auto b = basis();
    auto c = o.basis();
    b.insert(b.end(), c.begin(), c.end());
    return span(*K, n, b);
  }
  LinSubspace plus(const std::vector<std::vector<E>>& more) const {
    auto b = basis();
    b.insert(b.end(), more.begin(), more.end());
    return span(*K, n, b);
  }
  LinSubspace act(GalEl g) const {
    std::vector<std::vector<E>> b;
    for (size_t i = 0; i < dim(); ++i) b.push_back(act_vec(*K, basis(i), g));
    return span(*K, n, b);
  }
  bool contains(const std::vector<E>& v) const {
    std::vector<E> w = v;
    for (size_t i = 0; i < dim(); ++i) {
      E t = w[piv[i]];
      if (t.is_zero()) continue;
      for (int j = 0; j < n; ++j)
        if (!rows(i, j).is_zero()) w[j] -= t * rows(i, j);
    }
    return all_zero(w);
  }
  bool contains(const LinSubspace& o) const {
    for (size_t i = 0; i < o.dim(); ++i)
      if (!contains(o.basis(i))) return false;
    return true;
  }
  bool defined_over_level(int level) const {
    for (auto& x : rows.a)
      if (!K->in_level(x, level)) return false;
    return true;
  }
  std::vector<int> free_vars() const {
    std::vector<char> p(n, 0);
    for (auto v : piv) p[v] = 1;
    std::vector<int> f;
    for (int j = 0; j < n; ++j)
      if (!p[j]) f.push_back(j);
    return f;
  }
};

template <class F>
bool operator==(const LinSubspace<F>& A, const LinSubspace<F>& B) {
  return A.n == B.n && A.piv == B.piv && A.rows == B.rows;
}

// ---------------------------------------------------------------- reduction

template <class F>
struct Reduction {
  Poly<F> remainder;               // involves no pivot variable of P
  std::vector<Poly<F>> quotients;  // f = sum_i P_i * quotients[i] + remainder
};

// Division by the RREF basis of P.  Each basis form is x_p + t_p with t_p free
// of pivot variables, so repeatedly replacing x_p by -t_p clears x_p.
template <class F>
Reduction<F> reduce_mod(const Poly<F>& f, const LinSubspace<F>& P, bool want_quotients = true) {
  const F& K = *f.K;
  Reduction<F> R;
  R.remainder = f;
  if (P.dim() == 0 || f.d == 0) {
    if (want_quotients)
      for (size_t i = 0; i < P.dim(); ++i) R.quotients.emplace_back(K, f.n, std::max(f.d - 1, 0));
    return R;
  }
  const Monomials& M = f.mons();
  int n = f.n;
  for (size_t i = 0; i < P.dim(); ++i) {
    size_t p = P.piv[i];
    Poly<F> tail(K, n, 1);
    for (int j = 0; j < n; ++j)
      if (size_t(j) != p) tail.c[j] = P.rows(i, j);
    Poly<F> h(K, n, f.d - 1);
    for (int iter = 0; iter <= f.d; ++iter) {
      Poly<F> g(K, n, f.d - 1);
      bool any = false;
      for (size_t m = 0; m < M.N; ++m) {
        if (R.remainder.c[m].is_zero()) continue;
        uint32_t q = M.div[m * n + p];
        if (q == Monomials::npos) continue;
        g.c[q] = R.remainder.c[m];
        R.remainder.c[m] = K.zero();
        any = true;
      }
      if (!any) break;
      // f = x_p g + r = (x_p + t) g + (r - t g)
      Poly<F> tg = tail * g;
      R.remainder -= tg;
      if (want_quotients) h += g;
    }
    if (want_quotients) R.quotients.push_back(std::move(h));
  }
  return R;
}

template <class F>
bool in_linear_ideal(const Poly<F>& f, const LinSubspace<F>& P) {
  return reduce_mod(f, P, false).remainder.is_zero();
}

// Restrict a polynomial in the free variables to a ring with only those.
template <class F>
Poly<F> restrict_vars(const Poly<F>& f, const std::vector<int>& vars) {
  std::vector<int> pos(f.n, -1);
  for (size_t k = 0; k < vars.size(); ++k) pos[vars[k]] = int(k);
  Poly<F> out(*f.K, int(vars.size()), f.d);
  const auto& M = f.mons();
  const auto& M2 = out.mons();
  std::vector<int> s(f.d);
  for (size_t m = 0; m < M.N; ++m) {
    if (f.c[m].is_zero()) continue;
    bool ok = true;
    for (int k = 0; k < f.d; ++k) {
      int p = pos[M.at(m)[k]];
      if (p < 0) {
        ok = false;
        break;
      }
      s[k] = p;
    }
    if (!ok) fail("InputError", "polynomial involves eliminated variables");
    out.c[M2.rank(s.data())] = f.c[m];
  }
  return out;
}

// ---------------------------------------------------------------- text

template <class F>
Poly<F> parse_poly(const F& K, const std::string& s, int n, int degree = -1) {
  detail::ExprParser<F> P(K, s);
  auto e = P.parse_all();
  int d = degree;
  for (auto& [m, c] : e) {
    if (d < 0) d = int(m.size());
    if (int(m.size()) != d) fail("ParseError", "polynomial is not homogeneous: " + s);
    for (int v : m)
      if (v >= n) fail("ParseError", "variable x" + std::to_string(v + 1) + " exceeds n = " + std::to_string(n));
  }
  if (d < 0) d = 0;
  Poly<F> f(K, n, d);
  const auto& M = f.mons();
  for (auto& [m, c] : e) f.c[M.rank(m)] = c;
  return f;
}

template <class F>
std::string format_poly(const Poly<F>& f) {
  const F& K = *f.K;
  const auto& M = f.mons();
  std::string out;
  for (size_t m = 0; m < M.N; ++m) {
    if (f.c[m].is_zero()) continue;
    std::string c = K.format(f.c[m]);
    bool neg = c[0] == '-';
    if (neg) c = c.substr(1);
    std::string mono;
    auto e = M.exponents(m);
    for (int v = 0; v < f.n; ++v) {
      if (!e[v]) continue;
      mono += (mono.empty() ? "" : "*") + std::string("x") + std::to_string(v + 1);
      if (e[v] > 1) mono += "^" + std::to_string(e[v]);
    }
    std::string term;
    if (mono.empty())
      term = c;
    else if (c == "1")
      term = mono;
    else
      term = c + "*" + mono;
    if (out.empty())
      out = (neg ? "-" : "") + term;
    else
      out += (neg ? " - " : " + ") + term;
  }
  return out.empty() ? "0" : out;
}

template <class F>
Poly<F> random_poly(const F& K, int n, int d, Rng& rng) {
  Poly<F> f(K, n, d);
  for (auto& x : f.c) x = K.random(rng);
  return f;
}

}  // namespace strength
