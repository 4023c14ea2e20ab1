#include <set>

#include "support.hpp"

using namespace testing_support;

namespace {

// Gaussian integers mod p: independent model of F_p(sqrt d)
struct Pair {
  long a, b;
};
Pair mul(Pair x, Pair y, long p, long d) {
  auto m = [p](long v) { return ((v % p) + p) % p; };
  return {m(x.a * y.a + d * x.b * y.b), m(x.a * y.b + x.b * y.a)};
}

// a + b√2 + c√3 + e√6 over Q
using Q4 = std::array<mpq_class, 4>;
Q4 mul4(const Q4& x, const Q4& y) {
  // basis 1, r2, r3, r6 with r2 r3 = r6, r2 r6 = 2 r3, r3 r6 = 3 r2
  Q4 z;
  z[0] = x[0] * y[0] + 2 * x[1] * y[1] + 3 * x[2] * y[2] + 6 * x[3] * y[3];
  z[1] = x[0] * y[1] + x[1] * y[0] + 3 * (x[2] * y[3] + x[3] * y[2]);
  z[2] = x[0] * y[2] + x[2] * y[0] + 2 * (x[1] * y[3] + x[3] * y[1]);
  z[3] = x[0] * y[3] + x[3] * y[0] + x[1] * y[2] + x[2] * y[1];
  return z;
}

}  // namespace

TEST_CASE("make_tower examples") {
  auto K9 = prime("F3(s-1)");
  CHECK(K9->size() == 9);
  CHECK(K9->height() == 1);
  auto Q2 = rational("Q(s2)");
  CHECK(Q2->height() == 1);
  CHECK(error_code([] { PrimeTower::make(7, {1}); }) == "SquareAdjoined");
  CHECK(error_code([] { parse_field("F4"); }) != "");
  CHECK(error_code([] { parse_field("Q(s4)"); }) == "SquareAdjoined");
}

TEST_CASE("F_9 multiplication agrees with the Gaussian model") {
  auto K = prime("F3(s-1)");
  for (uint64_t i = 0; i < 9; ++i)
    for (uint64_t j = 0; j < 9; ++j) {
      auto x = K->element(i), y = K->element(j);
      auto z = x * y;
      Pair o = mul({long(x.a), long(x.b)}, {long(y.a), long(y.b)}, 3, -1);
      CHECK(long(z.a) == o.a);
      CHECK(long(z.b) == o.b);
    }
}

TEST_CASE("inverse matches Fermat over F_25") {
  auto K = prime("F5(s2)");
  for (uint64_t i = 1; i < 25; ++i) {
    auto x = K->element(i);
    CHECK(K->inv(x) == K->pow(x, 23));
    CHECK(x * K->inv(x) == K->one());
  }
}

TEST_CASE("Q(s2)(s3) arithmetic matches the four-term model") {
  auto K = rational("Q(s2)(s3)");
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    auto x = K->random(rng), y = K->random(rng);
    Q4 a, b;
    // flat basis e_S: S = 1 -> √2, 2 -> √3, 3 -> √6
    for (unsigned S = 0; S < 4; ++S) {
      a[S] = x.c.empty() ? mpq_class(0) : x.c[S];
      b[S] = y.c.empty() ? mpq_class(0) : y.c[S];
    }
    auto z = x * y;
    auto o = mul4(a, b);
    for (unsigned S = 0; S < 4; ++S) CHECK((z.c.empty() ? mpq_class(0) : z.c[S]) == o[S]);
  }
}

TEST_CASE("conjugation") {
  auto K = rational("Q(s2)");
  auto x = K->from_int(3) + K->from_int(5) * K->basis(1);
  CHECK(K->conjugate(x, 0) == K->from_int(3) - K->from_int(5) * K->basis(1));
  CHECK(K->conjugate(K->conjugate(x, 0), 0) == x);
  CHECK(K->conjugate(K->from_ratio(2, 7), 0) == K->from_ratio(2, 7));
}

TEST_CASE("is_square") {
  auto K7 = prime("F7");
  auto w = K7->is_square(K7->from_int(2));
  REQUIRE(w);
  CHECK((*w) * (*w) == K7->from_int(2));
  CHECK(K7->is_square(K7->zero()));
  CHECK_FALSE(rational("Q")->is_square(rational("Q")->from_int(2)));
  // exhaustive over F_25 and F_49
  for (auto d : {"F5(s2)", "F7(s3)"}) {
    auto K = prime(d);
    std::set<uint64_t> squares;
    for (uint64_t i = 0; i < K->size(); ++i) squares.insert(K->index(K->element(i) * K->element(i)));
    for (uint64_t i = 0; i < K->size(); ++i) {
      auto s = K->is_square(K->element(i));
      CHECK(bool(s) == bool(squares.count(i)));
      if (s) CHECK((*s) * (*s) == K->element(i));
    }
  }
}

TEST_CASE("norm and trace") {
  auto K9 = prime("F3(s-1)");
  auto i = K9->basis(1);
  CHECK(K9->norm_and_trace(i, 0).first == K9->one());
  auto x = K9->from_int(2);
  auto [n, t] = K9->norm_and_trace(x, 0);
  CHECK(n == x * x);
  CHECK(t == x + x);
  auto Q = rational("Q(s2)");
  auto y = Q->from_int(3) + Q->from_int(2) * Q->basis(1);
  CHECK(Q->norm_and_trace(y, 0).first == Q->from_int(1));  // 9 - 2*4
}

TEST_CASE("conjugation is a field automorphism (exhaustive over F_25)") {
  auto K = prime("F5(s2)");
  for (uint64_t i = 0; i < 25; ++i)
    for (uint64_t j = 0; j < 25; ++j) {
      auto x = K->element(i), y = K->element(j);
      CHECK(K->act(x * y, 1) == K->act(x, 1) * K->act(y, 1));
      CHECK(K->act(x + y, 1) == K->act(x, 1) + K->act(y, 1));
    }
}

TEST_CASE("element text round-trip") {
  auto K = rational("Q(s2)(s3)");
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    auto x = K->random(rng);
    CHECK(K->parse(K->format(x)) == x);
  }
  auto K9 = prime("F3(s-1)");
  for (uint64_t i = 0; i < 9; ++i) CHECK(K9->parse(K9->format(K9->element(i))) == K9->element(i));
}
