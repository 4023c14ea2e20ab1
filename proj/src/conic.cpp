#include "strength/conic.hpp"

#include <utility>
#include <vector>

namespace strength {

namespace {

bool rho_split(const mpz_class& n, mpz_class& d, unsigned long cap) {
  if (n % 2 == 0) {
    d = 2;
    return true;
  }
  // Brent's variant with batched gcds
  for (unsigned long c = 1; c < 20; ++c) {
    mpz_class y = 2, x, ys, q = 1, g = 1;
    unsigned long r = 1, steps = 0;
    const unsigned long m = 128;
    auto f = [&](const mpz_class& v) { return mpz_class((v * v + c) % n); };
    while (g == 1 && steps < cap) {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = f(y);
      steps += r;
      unsigned long k = 0;
      while (k < r && g == 1) {
        ys = y;
        for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = q * mpz_class(abs(x - y)) % n;
        }
        g = gcd(q, n);
        k += m;
        steps += m;
      }
      r *= 2;
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(mpz_class(abs(x - ys)), n);
      } while (g == 1);
    }
    if (g != n && g != 1) {
      d = g;
      return true;
    }
  }
  return false;
}

bool is_prime(const mpz_class& n) { return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0; }

bool factor_into(const mpz_class& n, Factorization& out, unsigned long cap) {
  if (n <= 1) return true;
  if (is_prime(n)) {
    ++out[n];
    return true;
  }
  mpz_class d;
  if (!rho_split(n, d, cap)) return false;
  return factor_into(d, out, cap) && factor_into(mpz_class(n / d), out, cap);
}

mpz_class powm(const mpz_class& b, const mpz_class& e, const mpz_class& m) {
  mpz_class r;
  mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

mpz_class mod(const mpz_class& a, const mpz_class& m) {
  mpz_class r = a % m;
  if (r < 0) r += m;
  return r;
}

mpz_class invmod(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  mpz_invert(r.get_mpz_t(), mod(a, m).get_mpz_t(), m.get_mpz_t());
  return r;
}

// squarefree coefficient as sign and odd-exponent primes
struct Coef {
  int sign = 1;
  std::map<mpz_class, int> primes;  // exponent 1 after normalization
  mpz_class value() const {
    mpz_class v = sign;
    for (auto& [p, _] : primes) v *= p;
    return v;
  }
};

// r^2 ≡ t mod m for squarefree m given by its primes
std::optional<mpz_class> sqrt_mod_squarefree(const mpz_class& t, const std::map<mpz_class, int>& primes) {
  mpz_class r = 0, acc = 1;
  for (auto& [p, _] : primes) {
    auto s = sqrt_mod_prime(t, p);
    if (!s) return std::nullopt;
    mpz_class k = mod((*s - r) * invmod(acc, p), p);
    r += k * acc;
    acc *= p;
  }
  return r;
}

// Kernel of v -> s.v mod N as three column vectors of Z^3.
std::array<std::array<mpz_class, 3>, 3> kernel_mod(const std::array<mpz_class, 3>& s, const mpz_class& N) {
  std::array<mpz_class, 4> row{s[0], s[1], s[2], N};
  std::array<std::array<mpz_class, 4>, 4> U{};  // columns
  for (int i = 0; i < 4; ++i) U[i][i] = 1;
  auto colop = [&](int j, int i, const mpz_class& q) {  // col j -= q col i
    row[j] -= q * row[i];
    for (int k = 0; k < 4; ++k) U[j][k] -= q * U[i][k];
  };
  while (true) {
    int piv = -1;
    for (int i = 0; i < 4; ++i)
      if (row[i] != 0 && (piv < 0 || abs(row[i]) < abs(row[piv]))) piv = i;
    bool done = true;
    for (int j = 0; j < 4; ++j) {
      if (j == piv || row[j] == 0) continue;
      mpz_class q;
      mpz_fdiv_q(q.get_mpz_t(), row[j].get_mpz_t(), row[piv].get_mpz_t());
      colop(j, piv, q);
      if (row[j] != 0) done = false;
    }
    if (done) {
      std::array<std::array<mpz_class, 3>, 3> out;
      int o = 0;
      for (int j = 0; j < 4; ++j)
        if (j != piv) out[o++] = {U[j][0], U[j][1], U[j][2]};
      return out;
    }
  }
}

// LLL (delta 3/4) for the inner product diag(w)
void lll(std::array<std::array<mpz_class, 3>, 3>& b, const std::array<mpz_class, 3>& w) {
  auto dot = [&](const std::array<mpz_class, 3>& x, const std::array<mpz_class, 3>& y) {
    mpz_class s = 0;
    for (int i = 0; i < 3; ++i) s += w[i] * x[i] * y[i];
    return s;
  };
  const int n = 3;
  auto gso = [&](std::array<std::array<mpq_class, 3>, 3>& mu, std::array<mpq_class, 3>& Bn) {
    std::array<std::array<mpq_class, 3>, 3> bs;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < 3; ++k) bs[i][k] = b[i][k];
      for (int j = 0; j < i; ++j) {
        mpq_class d = 0;
        for (int k = 0; k < 3; ++k) d += mpq_class(w[k] * b[i][k]) * bs[j][k];
        mu[i][j] = d / Bn[j];
        for (int k = 0; k < 3; ++k) bs[i][k] -= mu[i][j] * bs[j][k];
      }
      Bn[i] = 0;
      for (int k = 0; k < 3; ++k) Bn[i] += mpq_class(w[k]) * bs[i][k] * bs[i][k];
    }
  };
  std::array<std::array<mpq_class, 3>, 3> mu;
  std::array<mpq_class, 3> Bn;
  gso(mu, Bn);
  int k = 1;
  for (int guard = 0; k < n && guard < 100000; ++guard) {
    for (int j = k - 1; j >= 0; --j) {
      mpz_class q;
      mpq_class m = mu[k][j];
      mpz_class num = m.get_num() * 2 + m.get_den();
      mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), mpz_class(2 * m.get_den()).get_mpz_t());
      if (q != 0) {
        for (int t = 0; t < 3; ++t) b[k][t] -= q * b[j][t];
        gso(mu, Bn);
      }
    }
    if (Bn[k] >= (mpq_class(3, 4) - mu[k][k - 1] * mu[k][k - 1]) * Bn[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      gso(mu, Bn);
      k = std::max(k - 1, 1);
    }
  }
  (void)dot;
}

}  // namespace

std::optional<Factorization> factor(const mpz_class& n, unsigned long rho_cap) {
  Factorization out;
  mpz_class m = abs(n);
  if (m == 0) return std::nullopt;
  for (unsigned long p = 2; p < 2000 && mpz_class(p) * p <= m; p += (p == 2 ? 1 : 2)) {
    while (m % p == 0) {
      ++out[mpz_class(p)];
      m /= p;
    }
  }
  if (!factor_into(m, out, rho_cap)) return std::nullopt;
  return out;
}

std::optional<mpz_class> sqrt_mod_prime(const mpz_class& a0, const mpz_class& p) {
  mpz_class a = mod(a0, p);
  if (a == 0 || p == 2) return a;
  if (powm(a, (p - 1) / 2, p) != 1) return std::nullopt;
  // Tonelli-Shanks
  mpz_class q = p - 1;
  unsigned long s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  mpz_class z = 2;
  while (powm(z, (p - 1) / 2, p) != p - 1) ++z;
  mpz_class c = powm(z, q, p), r = powm(a, (q + 1) / 2, p), t = powm(a, q, p);
  unsigned long m = s;
  while (t != 1) {
    unsigned long i = 0;
    mpz_class tt = t;
    while (tt != 1) {
      tt = tt * tt % p;
      ++i;
    }
    mpz_class b = c;
    for (unsigned long j = 0; j + i + 1 < m; ++j) b = b * b % p;
    r = r * b % p;
    c = b * b % p;
    t = t * c % p;
    m = i;
  }
  return r;
}

std::optional<std::array<mpz_class, 3>> solve_legendre(const mpz_class& a, const mpz_class& b, const mpz_class& c) {
  if (a == 0) return std::array<mpz_class, 3>{1, 0, 0};
  if (b == 0) return std::array<mpz_class, 3>{0, 1, 0};
  if (c == 0) return std::array<mpz_class, 3>{0, 0, 1};
  if (sgn(a) == sgn(b) && sgn(b) == sgn(c)) return std::nullopt;
  // normal form: squarefree, pairwise coprime; X = alpha x
  std::array<Coef, 3> C;
  std::array<mpz_class, 3> alpha{1, 1, 1};
  const mpz_class in[3] = {a, b, c};
  for (int i = 0; i < 3; ++i) {
    auto f = factor(in[i]);
    if (!f) return std::nullopt;
    C[i].sign = sgn(in[i]);
    for (auto& [p, e] : *f) {
      for (int k = 0; k < e / 2; ++k) alpha[i] *= p;
      if (e % 2) C[i].primes[p] = 1;
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < 3 && !changed; ++i)
      for (int j = i + 1; j < 3 && !changed; ++j)
        for (auto& [p, _] : C[i].primes) {
          if (!C[j].primes.count(p)) continue;
          // multiply through by p: (a/p)(p x)^2 + (b/p)(p y)^2 + (c p) z^2
          mpz_class P = p;
          int k = 3 - i - j;
          C[i].primes.erase(P);
          C[j].primes.erase(P);
          alpha[i] *= P;
          alpha[j] *= P;
          if (C[k].primes.count(P)) {
            C[k].primes.erase(P);
            alpha[k] *= P;  // c p = (c/p) p^2
          } else {
            C[k].primes[P] = 1;
          }
          changed = true;
          break;
        }
  }
  mpz_class A = C[0].value(), B = C[1].value(), Cc = C[2].value();
  mpz_class Na = abs(A), Nb = abs(B), Nc = abs(Cc), N = Na * Nb * Nc;
  // y ≡ λ z (a), z ≡ μ x (b), x ≡ ν y (c)
  auto lam = sqrt_mod_squarefree(mpz_class(-Cc * invmod(B, Na > 1 ? Na : 1)), C[0].primes);
  auto mu = sqrt_mod_squarefree(mpz_class(-A * invmod(Cc, Nb > 1 ? Nb : 1)), C[1].primes);
  auto nu = sqrt_mod_squarefree(mpz_class(-B * invmod(A, Nc > 1 ? Nc : 1)), C[2].primes);
  if (!lam || !mu || !nu) return std::nullopt;
  // CRT idempotents
  auto idem = [&](const mpz_class& m) {
    if (m == 1) return mpz_class(0);
    mpz_class rest = N / m;
    return mpz_class(rest * invmod(rest, m));
  };
  mpz_class ea = idem(Na), eb = idem(Nb), ec = idem(Nc);
  std::array<mpz_class, 3> s{mod(-eb * *mu + ec, N), mod(ea - ec * *nu, N), mod(-ea * *lam + eb, N)};
  auto basis = kernel_mod(s, N);
  std::array<mpz_class, 3> w{Na, Nb, Nc};
  lll(basis, w);
  auto Q = [&](const std::array<mpz_class, 3>& v) { return A * v[0] * v[0] + B * v[1] * v[1] + Cc * v[2] * v[2]; };
  auto finish = [&](const std::array<mpz_class, 3>& v) -> std::optional<std::array<mpz_class, 3>> {
    // back to the original variables: x = X / alpha, cleared of denominators
    mpq_class x(v[0], alpha[0]), y(v[1], alpha[1]), z(v[2], alpha[2]);
    x.canonicalize();
    y.canonicalize();
    z.canonicalize();
    mpz_class L = lcm(lcm(x.get_den(), y.get_den()), z.get_den());
    std::array<mpz_class, 3> out{mpz_class(x * L), mpz_class(y * L), mpz_class(z * L)};
    if (a * out[0] * out[0] + b * out[1] * out[1] + c * out[2] * out[2] != 0) return std::nullopt;
    return out;
  };
  // 2Q/N on the reduced basis is an integral form with small entries
  std::array<std::array<mpz_class, 3>, 3> S;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      mpz_class bij = A * basis[i][0] * basis[j][0] + B * basis[i][1] * basis[j][1] + Cc * basis[i][2] * basis[j][2];
      S[i][j] = 2 * bij / N;
    }
  const long H = 40;
  bool fits = true;
  long long Sl[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      fits = fits && S[i][j].fits_slong_p();
      if (fits) Sl[i][j] = S[i][j].get_si();
    }
  for (long r = 1; r <= H; r = r < 4 ? r + 1 : r * 2) {
    long R = std::min(r, H);
    for (long c0 = 0; c0 <= R; ++c0)
      for (long c1 = (c0 ? -R : 0); c1 <= R; ++c1)
        for (long c2 = (c0 || c1 ? -R : 1); c2 <= R; ++c2) {
          if (std::max({std::labs(c0), std::labs(c1), std::labs(c2)}) < (r < 4 ? r : r / 2 + 1)) continue;
          bool zero;
          if (fits) {
            __int128 cs[3] = {c0, c1, c2}, t = 0;
            for (int i = 0; i < 3; ++i)
              for (int j = 0; j < 3; ++j) t += cs[i] * cs[j] * __int128(Sl[i][j]);
            zero = t == 0;
          } else {
            std::array<mpz_class, 3> v;
            for (int k = 0; k < 3; ++k) v[k] = c0 * basis[0][k] + c1 * basis[1][k] + c2 * basis[2][k];
            zero = Q(v) == 0;
          }
          if (!zero) continue;
          std::array<mpz_class, 3> v;
          for (int k = 0; k < 3; ++k) v[k] = c0 * basis[0][k] + c1 * basis[1][k] + c2 * basis[2][k];
          if (v[0] == 0 && v[1] == 0 && v[2] == 0) continue;
          if (auto o = finish(v)) return o;
        }
    if (R == H) break;
  }
  return std::nullopt;
}

std::optional<std::array<mpq_class, 3>> solve_ternary(const mpq_class& a, const mpq_class& b, const mpq_class& c) {
  // a x^2 = (num den)(x/den)^2 makes every coefficient integral
  mpz_class ai = a.get_num() * a.get_den(), bi = b.get_num() * b.get_den(), ci = c.get_num() * c.get_den();
  auto s = solve_legendre(ai, bi, ci);
  if (!s) return std::nullopt;
  std::array<mpq_class, 3> out{mpq_class((*s)[0]) * a.get_den(), mpq_class((*s)[1]) * b.get_den(),
                               mpq_class((*s)[2]) * c.get_den()};
  for (auto& v : out) v.canonicalize();
  if (a * out[0] * out[0] + b * out[1] * out[1] + c * out[2] * out[2] != 0) return std::nullopt;
  return out;
}

}  // namespace strength
