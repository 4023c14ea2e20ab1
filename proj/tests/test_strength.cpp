#include "support.hpp"

using namespace testing_support;
using F = PrimeTower;

namespace {

// f ∈ (l) iff f vanishes identically after solving l = 0 for its last nonzero variable
bool in_principal(const Poly<F>& f, const std::vector<PElem>& l) {
  const auto& K = *f.K;
  int n = f.n, k = -1;
  for (int i = 0; i < n; ++i)
    if (!l[i].is_zero()) k = i;
  Mat<F> M = Mat<F>::identity(K, n);
  for (int j = 0; j < n; ++j) M(k, j) = j == k ? K.zero() : -(l[j] / l[k]);
  return linear_change(f, M).is_zero();
}

}  // namespace

TEST_CASE("slice rank examples") {
  auto K = prime("F3");
  Budget b(10'000'000);
  CHECK(slice_rank_exact(Poly<F>(*K, 4, 4), b).value == 0);
  auto R = slice_rank_exact(P(*K, "x1*x2*x3*x4", 4), b);
  CHECK(R.value == 1);
  CHECK(R.subspace->dim() == 1);
  auto f = P(*K, "x1^3*x2 + x3^3*x4", 4);
  // no projective linear form divides f: 40 points of P^3(F_3)
  int points = 0;
  bool divides = false;
  for (uint64_t idx = 1; idx < 81; ++idx) {
    std::vector<PElem> l(4);
    uint64_t v = idx;
    for (auto& x : l) {
      x = K->element(v % 3);
      v /= 3;
    }
    int lead = 0;
    while (l[lead].is_zero()) ++lead;
    if (!(l[lead] == K->one())) continue;
    ++points;
    divides = divides || in_principal(f, l);
  }
  CHECK(points == 40);
  CHECK_FALSE(divides);
  CHECK(slice_rank_exact(f, b).value == 2);
}

TEST_CASE("budget exhaustion gives an upper bound") {
  auto K = prime("F3");
  Budget b(10);
  auto R = slice_rank_exact(P(*K, "x1*x2*x3*x4 + x5*x6*x7*x8", 8), b);
  CHECK_FALSE(R.exact);
  CHECK(R.value == 8);
}

TEST_CASE("refined rank search") {
  auto K = prime("F3");
  Budget b(50'000'000);
  auto R = refined_rank_search(P(*K, "x1^4", 3), 0, 1, b);
  REQUIRE(R.cert);
  CHECK(R.cert->P.dim() == 1);
  CHECK(verify_certificate(*R.cert));
  auto q = P(*K, "x1*x2 + x3^2", 3), q2 = P(*K, "x1^2 - x2*x3 + x2^2", 3);
  auto R2 = refined_rank_search(q * q2, 1, 0, b);
  REQUIRE(R2.cert);
  CHECK(R2.cert->pairs.size() == 1);
  CHECK(R2.cert->P.dim() == 0);
  Rng rng(4);
  Poly<F> g = random_poly(*K, 3, 4, rng);
  while (g.is_zero()) g = random_poly(*K, 3, 4, rng);
  CHECK_FALSE(refined_rank_search(g, 0, 0, b).cert);
}

TEST_CASE("schmidt rank") {
  auto K = prime("F3");
  Budget b(50'000'000);
  auto q = P(*K, "x1*x2 + x3^2", 4), q2 = P(*K, "x4^2 + x1*x3", 4);
  CHECK(schmidt_rank_search(q * q2, b).value == 1);
  CHECK(schmidt_rank_search(Poly<F>(*K, 4, 4), b).value == 0);
  CHECK(schmidt_rank_search(P(*K, "x1^3*x2 + x3^3*x4", 4), b).value == 2);
}

TEST_CASE("verify_certificate rejects tampering") {
  auto K = prime("F3(s-1)");
  InstanceSpec s;
  s.field = "F3(s-1)";
  s.n = 5;
  s.r1 = 1;
  auto I = gen_instance(*K, s);
  CHECK(verify_certificate(I.cert));
  auto bad = I.cert;
  bad.f.c[0] = bad.f.c[0] + K->one();
  CHECK_FALSE(verify_certificate(bad));
  auto bad2 = I.cert;
  bad2.r2 = 0;
  CHECK(verify_certificate(bad2).reason == "ClaimTooSmall");
  auto back = cert_from_json(*K, json::parse(to_json(I.cert).dump()));
  CHECK(verify_certificate(back));
}
