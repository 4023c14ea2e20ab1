#pragma once

#include <string>
#include <type_traits>
#include <utility>

#include "strength/descent.hpp"

namespace strength {

inline constexpr const char* kRngAlgorithm = "mt19937_64";

enum class PlantKind { Rational, ConjugateSwapped, ScaledCocycle, LowSrkDegenerate };

inline std::string plant_name(PlantKind k) {
  switch (k) {
    case PlantKind::Rational: return "rational";
    case PlantKind::ConjugateSwapped: return "conjugate-swapped";
    case PlantKind::ScaledCocycle: return "scaled-cocycle";
    default: return "low-srk-degenerate";
  }
}

inline PlantKind parse_plant(const std::string& s) {
  if (s == "rational") return PlantKind::Rational;
  if (s == "conjugate-swapped") return PlantKind::ConjugateSwapped;
  if (s == "scaled-cocycle") return PlantKind::ScaledCocycle;
  if (s == "low-srk-degenerate") return PlantKind::LowSrkDegenerate;
  fail("SpecInvalid", "unknown plant kind '" + s + "'");
}

struct InstanceSpec {
  int n = 8;
  std::string field = "F3(s-1)";
  PlantKind kind = PlantKind::ConjugateSwapped;
  int r2 = 1, r1 = 0;
  uint64_t seed = 1;
  int min_rank = 0;  // every planted quadric factor has at least this rank
};

template <class F>
struct Instance {
  Poly<F> f;
  DecompCert<F> cert;
};

template <class F>
typename F::Elem random_base_elem(const F& K, Rng& rng) {
  if constexpr (std::is_same_v<F, PrimeTower>)
    return K.from_int(long(rng() % K.p()));
  else
    return K.from_int(long(rng() % 7) - 3);
}

template <class F>
Poly<F> random_base_poly(const F& K, int n, int d, Rng& rng) {
  Poly<F> f(K, n, d);
  for (auto& x : f.c) x = random_base_elem(K, rng);
  return f;
}

template <class F>
Poly<F> base_quadric_of_rank(const F& K, int n, int min_rank, Rng& rng) {
  for (int t = 0; t < 1000; ++t) {
    auto q = random_base_poly(K, n, 2, rng);
    if (int(quad_rank(q)) >= min_rank) return q;
  }
  fail("SpecInvalid", "could not draw a quadric of rank " + std::to_string(min_rank));
}

// Exactly rank t: a diagonal form moved by a random invertible base matrix.
template <class F>
Poly<F> quadric_of_rank(const F& K, int n, int t, Rng& rng) {
  if (t > n) fail("SpecInvalid", "rank exceeds n");
  Mat<F> D(K, n, n);
  for (int i = 0; i < t; ++i) {
    do D(i, i) = random_base_elem(K, rng);
    while (D(i, i).is_zero());
  }
  Mat<F> M(K, n, n);
  do
    for (auto& x : M.a) x = random_base_elem(K, rng);
  while (rank(M) < size_t(n));
  return quadric(M.transpose() * D * M);
}

template <class F>
Instance<F> gen_instance(const F& K, const InstanceSpec& s) {
  using E = typename F::Elem;
  if (s.n < 1 || s.r2 < 0 || s.r1 < 0) fail("SpecInvalid", "sizes must be nonnegative, n positive");
  if (s.kind != PlantKind::Rational && K.height() == 0) fail("SpecInvalid", "this plant needs a proper extension");
  if (s.kind == PlantKind::LowSrkDegenerate && s.r2 < 1) fail("SpecInvalid", "degenerate plant needs a pair");
  if (s.min_rank > s.n) fail("SpecInvalid", "min rank exceeds n");
  Rng rng(s.seed);
  int n = s.n;
  GalEl sigma = K.height() ? 1u << (K.height() - 1) : 0;
  E theta = K.height() ? K.basis(sigma) : K.one();
  auto base_q = [&] { return base_quadric_of_rank(K, n, s.min_rank, rng); };
  auto ext_q = [&] {
    for (int t = 0; t < 1000; ++t) {
      auto q = random_base_poly(K, n, 2, rng) + theta * random_base_poly(K, n, 2, rng);
      if (int(quad_rank(q)) >= s.min_rank && int(quad_rank(galois_apply(q, sigma))) >= s.min_rank) return q;
    }
    fail("SpecInvalid", "could not draw an extension quadric of the requested rank");
  };
  auto norm_one = [&] {
    while (true) {
      E x = random_base_elem(K, rng) + random_base_elem(K, rng) * theta;
      if (x.is_zero()) continue;
      E sx = K.act(x, sigma);
      if (sx.is_zero()) continue;
      E u = x / sx;
      if (!K.fixed_by(u, sigma)) return u;
    }
  };
  PairList<F> pairs;
  for (int i = 0; i < s.r2; ++i) {
    switch (s.kind) {
      case PlantKind::Rational: pairs.push_back({base_q(), base_q()}); break;
      case PlantKind::ConjugateSwapped: {
        auto q = ext_q();
        pairs.push_back({q, galois_apply(q, sigma)});
        break;
      }
      case PlantKind::ScaledCocycle: {
        E u = norm_one();
        pairs.push_back({u * base_q(), K.inv(u) * base_q()});
        break;
      }
      case PlantKind::LowSrkDegenerate: {
        if (i == 0) {
          E u = norm_one();
          auto q = base_q();
          auto l = random_base_poly(K, n, 1, rng), m = random_base_poly(K, n, 1, rng);
          pairs.push_back({u * q, K.inv(u) * (q + l * m)});
        } else {
          auto q = ext_q();
          pairs.push_back({q, galois_apply(q, sigma)});
        }
        break;
      }
    }
  }
  Poly<F> f = quartic_of(pairs, K, n);
  std::vector<std::vector<E>> forms;
  for (int j = 0; j < s.r1; ++j) {
    Poly<F> l = random_base_poly(K, n, 1, rng);
    if (s.kind != PlantKind::Rational) l += theta * random_base_poly(K, n, 1, rng);
    auto c = random_base_poly(K, n, 2, rng);
    mul_acc(f, l, galois_apply(l, sigma) * c);
    forms.push_back(l.c);
  }
  Instance<F> I;
  I.f = f;
  I.cert = make_cert(f, pairs, LinSubspace<F>::span(K, n, forms));
  auto v = verify_certificate(I.cert);
  if (!v) fail("InternalError", "planted certificate fails: " + v.reason);
  return I;
}

// Product of k reflections in random anisotropic vectors of G.
template <class F>
Mat<F> random_orthogonal(const Mat<F>& G, int k, Rng& rng) {
  const F& K = *G.K;
  Mat<F> A = Mat<F>::identity(K, G.rows);
  for (int i = 0; i < k; ++i) {
    std::vector<typename F::Elem> u(G.rows, K.zero());
    do
      for (auto& x : u) x = random_base_elem(K, rng);
    while (qval(G, u).is_zero());
    A = A * reflection(G, u);
  }
  return A;
}

template <class F>
struct LemmaPlant {
  PairList<F> qp, pp;
  std::vector<Poly<F>> Q;
};

// sum q q' ≡ sum p p' mod (Q): pp padded to r pairs, moved by an orthogonal
// map of the r-frame, then perturbed by multiples of Q.
template <class F>
LemmaPlant<F> plant_lemma(const F& K, int n, int r, int s, int dimQ, Rng& rng) {
  LemmaPlant<F> P;
  for (int i = 0; i < s; ++i) P.pp.push_back({random_base_poly(K, n, 2, rng), random_base_poly(K, n, 2, rng)});
  for (int j = 0; j < dimQ; ++j) P.Q.push_back(random_base_poly(K, n, 2, rng));
  // padding pairs whose products vanish mod (Q): (g, 0), (w, g) with w ∈ Q,
  // or a cancelling couple (a, b), (a, -b)
  PairList<F> padded = P.pp;
  while (int(padded.size()) < r) {
    auto g = random_base_poly(K, n, 2, rng);
    int kind = int(rng() % 3);
    if (kind == 2 && int(padded.size()) + 2 <= r) {
      auto a = random_base_poly(K, n, 2, rng);
      padded.push_back({a, g});
      padded.push_back({a, -g});
    } else if (kind == 1 && dimQ > 0) {
      padded.push_back({P.Q[rng() % P.Q.size()], g});
    } else {
      padded.push_back({g, Poly<F>(K, n, 2)});
    }
  }
  auto A0 = random_orthogonal(Frame<F>::hyperbolic(K, r).J, 2 * r, rng);
  auto Phi = retuple(flatten(padded), A0);
  for (auto& w : P.Q) Phi[rng() % Phi.size()] += random_base_elem(K, rng) * w;
  P.qp = unflatten(Phi);
  return P;
}

template <class F>
struct AlignmentPlant {
  PairList<F> qp, pp;
  LinSubspace<F> L0;
  Mat<F> A0;
};

// pp = A0-transform of qp plus terms in (L0); the quartics agree mod (L0).
template <class F>
AlignmentPlant<F> plant_alignment(const F& K, int n, int r, int dimL, int min_rank, Rng& rng) {
  AlignmentPlant<F> P;
  for (int i = 0; i < r; ++i)
    P.qp.push_back({base_quadric_of_rank(K, n, min_rank, rng), base_quadric_of_rank(K, n, min_rank, rng)});
  std::vector<std::vector<typename F::Elem>> ls;
  for (int j = 0; j < dimL; ++j) ls.push_back(random_base_poly(K, n, 1, rng).c);
  P.L0 = LinSubspace<F>::span(K, n, ls);
  P.A0 = random_orthogonal(Frame<F>::hyperbolic(K, r).J, 2 * r, rng);
  auto Psi = retuple(flatten(P.qp), P.A0);
  for (auto& l : P.L0.forms())
    for (auto& p : Psi) p += l * random_base_poly(K, n, 1, rng);
  P.pp = unflatten(Psi);
  return P;
}

}  // namespace strength
