#include "support.hpp"

using namespace testing_support;

TEST_CASE("quadric rank examples") {
  auto K = prime("F3");
  CHECK(quad_rank(P(*K, "x1*x2 + x3*x4", 4)) == 4);
  CHECK(quad_rank(Poly<PrimeTower>(*K, 4, 2)) == 0);
  CHECK(quad_rank(P(*K, "x1^2 + x2^2", 4)) == 2);
  CHECK(srk_from_rank(4) == 2);
  CHECK(srk_from_rank(5) == 3);
  CHECK(srk_from_rank(0) == 0);
}

TEST_CASE("slice rank of quadrics over the splitting field is ceil(rank/2)") {
  auto K3 = prime("F3"), K9 = prime("F3(s-1)");
  Rng rng(21);
  for (int t = 0; t < 30; ++t) {
    int n = 1 + int(rng() % 4);
    auto q = random_poly(*K3, n, 2, rng);
    Budget b(10'000'000);
    auto s = slice_rank_exact(lift(*K9, q), b).value;
    CHECK(s == srk_from_rank(quad_rank(q)));
  }
}

TEST_CASE("diagonalize") {
  auto K = prime("F5");
  Rng rng(8);
  for (int k = 0; k <= 6; ++k) {
    auto q = quadric_of_rank(*K, 6, k, rng);
    auto G = gram(q);
    auto D = diagonalize(G);
    Mat<PrimeTower> Dm(*K, 6, 6);
    size_t nz = 0;
    for (size_t i = 0; i < 6; ++i) {
      Dm(i, i) = D.diag[i];
      nz += !D.diag[i].is_zero();
    }
    CHECK(D.M.transpose() * G * D.M == Dm);
    CHECK(rank(D.M) == 6);
    CHECK(nz == size_t(k));
  }
}

TEST_CASE("hyperbolize") {
  auto K = prime("F3");
  auto H = hyperbolize<PrimeTower>(K, {K->one(), K->from_int(-1)});
  CHECK(H.adjoined.empty());
  auto H2 = hyperbolize<PrimeTower>(K, {K->one(), K->one()});
  CHECK(H2.adjoined.size() == 1);
  CHECK(H2.tower->size() == 9);
}

TEST_CASE("is_orthogonal") {
  auto K = prime("F5");
  auto fr = Frame<PrimeTower>::hyperbolic(*K, 2);
  CHECK(is_orthogonal(Mat<PrimeTower>::identity(*K, 4), fr));
  // e_1 -> 2 e_1 alone breaks x y; with f_1 -> f_1 / 2 it is preserved
  auto A = Mat<PrimeTower>::identity(*K, 4);
  A(fr.e(0), fr.e(0)) = K->from_int(2);
  CHECK_FALSE(is_orthogonal(A, fr));
  A(fr.f(0), fr.f(0)) = K->inv(K->from_int(2));
  CHECK(is_orthogonal(A, fr));
  // Ae_1 = e_1, Af_1 = f_1 - sum(c_i f_i + c'_i e_i) - (sum c_i c'_i) e_1, Ae_i = e_i + c'_i e_1, Af_i = f_i + c_i e_1
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    int r = 3;
    auto F = Frame<PrimeTower>::hyperbolic(*K, r);
    auto B = Mat<PrimeTower>::identity(*K, 2 * r);
    auto cc = K->zero();
    for (int i = 1; i < r; ++i) {
      auto c = K->random(rng), c2 = K->random(rng);
      B(F.f(i), F.f(0)) = -c;
      B(F.e(i), F.f(0)) = -c2;
      B(F.e(0), F.e(i)) = c;
      B(F.e(0), F.f(i)) = c2;
      cc = cc + c * c2;
    }
    B(F.e(0), F.f(0)) = -cc;
    CHECK(is_orthogonal(B, F));
  }
}

TEST_CASE("isotropic vectors of the r=1 frame over F3") {
  auto K = prime("F3");
  auto fr = Frame<PrimeTower>::hyperbolic(*K, 1);
  auto v = all_isotropic(fr, 1000);
  // oracle: the 8 nonzero vectors of F_3^2, keep xy = 0, one per line
  std::vector<std::vector<PElem>> want;
  for (uint64_t a = 0; a < 3; ++a)
    for (uint64_t b = 0; b < 3; ++b) {
      auto x = K->element(a), y = K->element(b);
      if ((x.is_zero() && y.is_zero()) || !(x * y).is_zero()) continue;
      if (!((x.is_zero() ? y : x) == K->one())) continue;
      want.push_back({x, y});
    }
  REQUIRE(want.size() == 2);
  REQUIRE(v.size() == 2);
  for (auto& w : want) CHECK(std::find(v.begin(), v.end(), w) != v.end());
  auto sq = Frame<PrimeTower>::with_square(*K, 1);
  CHECK(qval(sq.J, std::vector<PElem>{K->zero(), K->one(), K->zero()}).is_zero());
}

TEST_CASE("modular square roots and factoring") {
  for (long p : {2L, 3L, 5L, 13L, 17L, 97L, 257L, 65537L}) {
    for (long a = 0; a < std::min(p, 60L); ++a) {
      bool exists = false;
      for (long x = 0; x < p && !exists; ++x) exists = (x * x - a) % p == 0;
      auto r = sqrt_mod_prime(mpz_class(a), mpz_class(p));
      CHECK(bool(r) == exists);
      if (r) CHECK(((*r) * (*r) - a) % p == 0);
    }
  }
  Rng rng(1);
  for (int t = 0; t < 30; ++t) {
    mpz_class n = mpz_class(std::to_string(rng() % 1000000007ull)) * mpz_class(std::to_string(rng() % 1000000009ull + 1));
    auto f = factor(n);
    REQUIRE(f);
    mpz_class prod = 1;
    for (auto& [p, e] : *f) {
      CHECK(mpz_probab_prime_p(p.get_mpz_t(), 30) > 0);
      for (int k = 0; k < e; ++k) prod *= p;
    }
    CHECK(prod == abs(n));
  }
}

TEST_CASE("ternary forms over Q") {
  CHECK_FALSE(solve_legendre(1, 1, -3));  // 3 is not a sum of two rational squares
  CHECK_FALSE(solve_legendre(1, 1, 1));
  auto s = solve_legendre(1, 1, -5);
  REQUIRE(s);
  CHECK((*s)[0] * (*s)[0] + (*s)[1] * (*s)[1] - 5 * (*s)[2] * (*s)[2] == 0);
  // planted zeros with large coefficients
  Rng rng(12);
  auto big = [&](int bits) {
    mpz_class v = 1;
    for (int k = 0; k < bits; k += 16) v = v * 65536 + mpz_class(unsigned(rng() % 65536));
    return v;
  };
  for (int t = 0; t < 20; ++t) {
    mpz_class x = big(16), y = big(16), z = big(16) + 1, a = big(16) + 1, b = big(16) + 1;
    mpq_class c = -mpq_class(a * x * x + b * y * y, z * z);
    c.canonicalize();
    auto w = solve_ternary(mpq_class(a), mpq_class(b), c);
    REQUIRE(w);
    CHECK(a * (*w)[0] * (*w)[0] + b * (*w)[1] * (*w)[1] + c * (*w)[2] * (*w)[2] == 0);
    bool nonzero = (*w)[0] != 0 || (*w)[1] != 0 || (*w)[2] != 0;
    CHECK(nonzero);
  }
}

TEST_CASE("find_isotropic over Q uses exact conics") {
  auto K = rational("Q");
  using F = RationalTower;
  Mat<F> G(*K, 3, 3);
  G(0, 0) = K->one();
  G(1, 1) = K->one();
  G(2, 2) = K->from_int(-3);
  CHECK_FALSE(find_isotropic(G));
  // planted zero (8231, 5167, 977) of height far beyond a small search
  mpq_class a(-704, 1343), b(97), x(8231), y(5167), z(977);
  mpq_class c = -(a * x * x + b * y * y) / (z * z);
  G(0, 0) = K->from_mpq(a);
  G(1, 1) = K->from_mpq(b);
  G(2, 2) = K->from_mpq(c);
  auto v = find_isotropic(G);
  REQUIRE(v);
  CHECK(qval(G, *v).is_zero());
}
