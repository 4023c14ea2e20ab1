#include "support.hpp"

using namespace testing_support;
using F = PrimeTower;

namespace {

ScalarCocycle<F> two_element(const F& K, const PElem& c1) {
  ScalarCocycle<F> C;
  C.H = {0, 1};
  C.c[0] = K.one();
  C.c[1] = c1;
  return C;
}

}  // namespace

TEST_CASE("match_factors") {
  auto K = prime("F3(s-1)");
  int n = 4;
  Rng rng(5);
  auto a = random_base_poly(*K, n, 2, rng), b = random_base_poly(*K, n, 2, rng);
  LinSubspace<F> P0(*K, n);
  CHECK(match_factors(a, b, 1, P0).branch == Branch::Fixed);
  auto th = K->basis(1);
  auto m = match_factors(a + th * b, a - th * b, 1, P0);
  CHECK(m.branch == Branch::Swapped);
}

TEST_CASE("hilbert 90") {
  auto K = prime("F3(s-1)");
  auto C = two_element(*K, K->from_int(-1));
  // oracle: some nonzero e of F_9 has e / σ(e) = -1
  bool exists = false;
  for (uint64_t i = 1; i < 9; ++i) exists = exists || K->element(i) == -K->act(K->element(i), 1);
  CHECK(exists);
  auto h = hilbert90_scalar(*K, C);
  CHECK(h.e == -K->act(h.e, 1));
  CHECK_FALSE(h.e.is_zero());
  auto one = hilbert90_scalar(*K, two_element(*K, K->one()));
  CHECK(one.e == K->act(one.e, 1));

  auto K25 = prime("F5(s2)");
  Rng rng(25);
  for (int t = 0; t < 100; ++t) {
    auto x = K25->random_nonzero(rng);
    auto u = x / K25->act(x, 1);
    CHECK(K25->norm_and_trace(u, 0).first == K25->one());
    auto r = hilbert90_scalar(*K25, two_element(*K25, u));
    CHECK(u * K25->act(r.e, 1) == r.e);
  }
  CHECK(error_code([&] { hilbert90_scalar(*K, two_element(*K, K->from_int(2) + K->basis(1))); }) == "NormNotOne");
}

TEST_CASE("scalar cocycle of a scaled plant") {
  auto K = prime("F3(s-1)");
  int n = 5;
  Rng rng(3);
  auto x = K->from_int(1) + K->basis(1);
  auto u = x / K->act(x, 1);
  auto q = base_quadric_of_rank(*K, n, 5, rng), qq = base_quadric_of_rank(*K, n, 5, rng);
  auto C = extract_scalar_cocycle(u * q, K->inv(u) * qq, LinSubspace<F>(*K, n));
  CHECK(C.H.size() == 2);
  CHECK(cocycle_law(*K, C));
  CHECK(C.c[1] == K->act(u, 1) / u);
}

TEST_CASE("orthogonal cocycles") {
  auto K = prime("F3(s-1)");
  int n = 6;
  Rng rng(9);
  auto a = random_base_poly(*K, n, 2, rng), b = random_base_poly(*K, n, 2, rng);
  auto q = a + K->basis(1) * b;
  Budget bud(10'000'000);
  auto R = extract_orth_cocycle<F>(std::nullopt, {{q, galois_apply(q, 1)}}, LinSubspace<F>(*K, n), bud);
  Mat<F> swap(*K, 2, 2);
  swap(0, 1) = swap(1, 0) = K->one();
  CHECK(R.C.R[1] == swap);
  CHECK(orth_cocycle_law(R.C));
  // G0 ~ a^2 + b^2 is anisotropic over F_3: one root is adjoined
  auto T = trivialize_orth_cocycle(*K, R.C);
  auto W = Frame<F>::hyperbolic(*K, 1).quad_gram();
  CHECK(T.level == 1);
  for (auto h : level_subgroup(K->group_order(), T.level)) CHECK(T.B.act(h) * inverse(T.B) == R.C.R[h]);
  CHECK(preserves(T.B, W));

  OrthCocycle<F> I;
  I.r = 2;
  I.R[0] = I.R[1] = Mat<F>::identity(*K, 4);
  auto TI = trivialize_orth_cocycle(*K, I);
  CHECK(TI.level == 0);
  CHECK(TI.B.act(1) == TI.B);

  OrthCocycle<F> bad;
  bad.r = 1;
  bad.R[0] = Mat<F>::identity(*K, 2);
  bad.R[1] = Mat<F>::identity(*K, 2);
  bad.R[1](0, 1) = K->one();  // shear: its square is not the identity
  CHECK(error_code([&] { trivialize_orth_cocycle(*K, bad); }) == "NonCocycle");
}

TEST_CASE("trivialization over Q(s2)") {
  auto K = rational("Q(s2)");
  using G = RationalTower;
  for (int t = 0; t < 10; ++t) {
    Rng rng(100 + t);
    int r = 1 + t % 2;
    auto W = Frame<G>::hyperbolic(*K, r).quad_gram();
    Mat<G> B = Mat<G>::identity(*K, 2 * r);
    for (int k = 0; k < 3; ++k) {
      std::vector<QElem> u(2 * r);
      do
        for (auto& z : u) z = K->random(rng);
      while (qval(W, u).is_zero());
      B = B * reflection(W, u);
    }
    OrthCocycle<G> OC;
    OC.r = r;
    OC.R[0] = Mat<G>::identity(*K, 2 * r);
    OC.R[1] = B.act(1) * inverse(B);
    auto T = trivialize_orth_cocycle(*K, OC);
    CHECK(T.level == 0);
    CHECK(T.B.act(1) * inverse(T.B) == OC.R[1]);
    CHECK(preserves(T.B, W));
  }
}

TEST_CASE("rationalize_quadric") {
  auto K = prime("F3(s-1)");
  auto q = P(*K, "x1^2 + s-1*x2*x3", 3);
  auto R = rationalize_quadric(q, {0, 1});
  CHECK(R.q0 == P(*K, "x1^2", 3));
  CHECK(R.defect == 2);
  CHECK(R.max_moved == 2);
  auto b = P(*K, "x1*x2 - x3^2", 3);
  CHECK(rationalize_quadric(b, {0, 1}).defect == 0);
  Rng rng(2);
  for (int t = 0; t <= 6; ++t) {
    auto d = quadric_of_rank(*K, 7, t, rng);
    auto R2 = rationalize_quadric(random_base_poly(*K, 7, 2, rng) + K->basis(1) * d, {0, 1});
    CHECK(R2.defect == size_t(t));
  }
}

TEST_CASE("widen_to_base") {
  auto K = prime("F3(s-1)");
  InstanceSpec s;
  s.field = "F3(s-1)";
  s.n = 6;
  s.r2 = 1;
  s.r1 = 1;
  auto I = gen_instance(*K, s);
  Ledger L;
  auto w = widen_to_base(I.cert, {0}, &L);
  CHECK(cert_over_base(w));
  CHECK(w.pairs.size() <= 2);
  CHECK(w.P.dim() <= 2);
  CHECK(verify_certificate(cert_to_base(w)));
  CHECK(L.all_pass());
  s.kind = PlantKind::Rational;
  auto J = gen_instance(*K, s);
  auto w2 = widen_to_base(J.cert, {0, 1});
  CHECK(w2.pairs.size() == J.cert.pairs.size());
}

TEST_CASE("alignment with identical pairs") {
  auto K = prime("F3");
  Rng rng(1);
  int n = 12;
  PairList<F> qp{{base_quadric_of_rank(*K, n, 12, rng), base_quadric_of_rank(*K, n, 12, rng)}};
  Budget b(50'000'000);
  auto W = align_decompositions<F>(qp, qp, {}, b);
  CHECK(W.verified);
  CHECK(W.L.dim() == 0);
  auto q0 = base_quadric_of_rank(*K, n, 12, rng);
  auto W2 = align_with_square<F>(q0, qp, -q0, qp, b);
  CHECK(W2.verified);
}

TEST_CASE("descent pipelines") {
  auto K = prime("F3(s-1)");
  for (int i = 0; i < 3; ++i) {
    InstanceSpec s;
    s.field = "F3(s-1)";
    s.n = 10;
    s.r2 = 1;
    s.r1 = i % 2;
    s.seed = 40 + i;
    s.min_rank = 9;
    auto I = gen_instance(*K, s);
    Budget b(100'000'000);
    auto R = descend_quartic_r1(I.f, I.cert, b);
    CHECK(verify_certificate(cert_to_base(R.cert)));
    CHECK(R.cert.pairs.size() <= 2);
    CHECK(R.ledger.all_pass());
    for (auto& C : R.orths) CHECK(orth_cocycle_law(C));
  }
  auto Q = rational("Q(s2)");
  InstanceSpec s;
  s.field = "Q(s2)";
  s.n = 6;
  s.r2 = 1;
  auto I = gen_instance(*Q, s);
  Budget b(100'000'000);
  auto R = descend_quartic_r1(I.f, I.cert, b);
  CHECK(verify_certificate(cert_to_base(R.cert)));

  s.field = "F3(s-1)";
  s.n = 8;
  s.kind = PlantKind::Rational;
  auto J = gen_instance(*K, s);
  auto G = descend_quartic_general(J.f, J.cert, b);
  CHECK(G.route == "already-over-base");
  CHECK(verify_certificate(G.cert));
}
