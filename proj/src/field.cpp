#include "strength/field.hpp"

#include <sstream>

#include "strength/parse.hpp"

namespace strength {

namespace {

bool is_prime(long p) {
  if (p < 2) return false;
  for (long q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

uint32_t mod_of(const mpz_class& v, uint32_t p) {
  mpz_class r = v % p;
  if (r < 0) r += p;
  return uint32_t(r.get_ui());
}

}  // namespace

// ---------------------------------------------------------------- PrimeTower

std::shared_ptr<const PrimeTower> PrimeTower::make(long p, const std::vector<long>& ds) {
  if (p == 2) fail("CharTwo", "characteristic 2 is not supported");
  if (!is_prime(p)) fail("InputError", std::to_string(p) + " is not prime");
  if (p > 65521) fail("InputError", "prime too large (limit 65521)");
  auto base = std::shared_ptr<PrimeTower>(new PrimeTower());
  base->p_ = uint32_t(p);
  if (ds.empty()) return base;
  if (ds.size() > 1)
    fail("SquareAdjoined", "every element of F_" + std::to_string(p) + " is already a square after one adjunction");
  uint32_t d = mod_of(mpz_class(ds[0]), uint32_t(p));
  if (d == 0 || base->is_square(base->make_elem(d, 0)))
    fail("SquareAdjoined", std::to_string(ds[0]) + " is a square in F_" + std::to_string(p));
  auto t = std::shared_ptr<PrimeTower>(new PrimeTower());
  t->p_ = uint32_t(p);
  t->d_ = d;
  t->h_ = 1;
  t->d_orig_ = ds[0];
  t->base_ = base;
  return t;
}

std::shared_ptr<const PrimeTower> PrimeTower::base() const {
  if (h_ == 0) return shared_from_this();
  return base_;
}

std::string PrimeTower::descriptor() const {
  std::string s = "F" + std::to_string(p_);
  if (h_) s += "(s" + std::to_string(d_orig_) + ")";
  return s;
}

PElem PrimeTower::from_int(long v) const { return {this, mod_of(mpz_class(v), p_), 0}; }

PElem PrimeTower::from_ratio(long num, long den) const { return from_mpq(mpq_class(num, den)); }

PElem PrimeTower::from_mpq(const mpq_class& v) const {
  uint32_t den = mod_of(v.get_den(), p_);
  if (den == 0) fail("DivisionByZero", "denominator divisible by p");
  PElem n{this, mod_of(v.get_num(), p_), 0};
  return n * inv(PElem{this, den, 0});
}

PElem PrimeTower::root_symbol(const mpz_class& d) const {
  uint32_t r = mod_of(d, p_);
  if (h_ == 1 && r == d_) return {this, 0, 1};
  if (auto y = is_square(PElem{this, r, 0})) return *y;
  fail("ParseError", "s" + d.get_str() + " is not available in " + descriptor());
}

PElem PrimeTower::basis(unsigned S) const {
  if (S == 0) return one();
  if (S == 1 && h_ == 1) return {this, 0, 1};
  fail("LevelOutOfRange", "basis index");
}

PElem PrimeTower::component(const PElem& x, unsigned S) const {
  if (S == 0) return {this, x.a, 0};
  if (S == 1 && h_ == 1) return {this, x.b, 0};
  fail("LevelOutOfRange", "component index");
}

PElem PrimeTower::random(Rng& rng) const {
  std::uniform_int_distribution<uint32_t> u(0, p_ - 1);
  PElem x{this, u(rng), 0};
  if (h_) x.b = u(rng);
  return x;
}

PElem PrimeTower::random_nonzero(Rng& rng) const {
  while (true) {
    PElem x = random(rng);
    if (!x.is_zero()) return x;
  }
}

PElem PrimeTower::act(const PElem& x, GalEl g) const {
  if ((g & 1u) && h_ && x.b) return {this, x.a, p_ - x.b};
  return {this, x.a, x.b};
}

PElem PrimeTower::conjugate(const PElem& x, int level) const {
  if (level < 0 || level >= h_) fail("LevelOutOfRange", "conjugate at level " + std::to_string(level));
  return act(x, 1u << level);
}

PElem PrimeTower::pow(PElem x, uint64_t e) const {
  PElem r = one();
  if (!x.F) x.F = this;
  while (e) {
    if (e & 1) r = r * x;
    x = x * x;
    e >>= 1;
  }
  return r;
}

PElem PrimeTower::inv(const PElem& x) const {
  if (x.is_zero()) fail("DivisionByZero", "inverse of zero");
  uint64_t p = p_;
  uint64_t n = (uint64_t(x.a) * x.a + (p - uint64_t(d_) * (uint64_t(x.b) * x.b % p) % p)) % p;
  // n^(p-2) in F_p
  uint64_t r = 1, b = n, e = p - 2;
  while (e) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return {this, uint32_t(x.a * r % p), uint32_t((p - x.b) % p * r % p)};
}

namespace {

// Tonelli-Shanks in a finite field of order q given by its elements [0, q).
std::optional<PElem> tonelli(const PrimeTower& K, const PElem& x, uint64_t q) {
  if (x.is_zero()) return K.zero();
  if (K.pow(x, (q - 1) / 2) != K.one()) return std::nullopt;
  uint64_t t = q - 1;
  int s = 0;
  while (t % 2 == 0) {
    t /= 2;
    ++s;
  }
  PElem z;
  for (uint64_t i = 2; i < q; ++i) {
    z = K.element(i);
    if (K.pow(z, (q - 1) / 2) != K.one()) break;
  }
  int M = s;
  PElem c = K.pow(z, t), tt = K.pow(x, t), R = K.pow(x, (t + 1) / 2);
  while (tt != K.one()) {
    int i = 0;
    PElem u = tt;
    while (u != K.one()) {
      u = u * u;
      ++i;
    }
    PElem b = c;
    for (int j = 0; j < M - i - 1; ++j) b = b * b;
    M = i;
    c = b * b;
    tt = tt * c;
    R = R * b;
  }
  return R;
}

}  // namespace

std::optional<PElem> PrimeTower::is_square(const PElem& x) const { return is_square_in_level(x, h_); }

std::optional<PElem> PrimeTower::is_square_in_level(const PElem& x, int j) const {
  PElem y{this, x.a, x.b};
  if (j >= h_) return tonelli(*this, y, size());
  if (y.b) return std::nullopt;
  return tonelli(*this, y, p_);
}

std::pair<PElem, PElem> PrimeTower::norm_and_trace(const PElem& x, int level) const {
  PElem s = conjugate(x, level);
  return {x * s, x + s};
}

std::string PrimeTower::format(const PElem& x) const {
  long a = balanced(x.a), b = balanced(x.b);
  std::string sd = "s" + std::to_string(d_orig_);
  if (b == 0) return std::to_string(a);
  std::string bs = b == 1 ? sd : b == -1 ? "-" + sd : std::to_string(b) + "*" + sd;
  if (a == 0) return bs;
  return "(" + std::to_string(a) + (b > 0 ? "+" : "") + bs + ")";
}

PElem PrimeTower::parse(const std::string& s) const {
  detail::ExprParser<PrimeTower> P(*this, s);
  auto e = P.parse_all();
  if (e.empty()) return zero();
  if (e.size() != 1 || !e.begin()->first.empty()) fail("ParseError", "not a constant: " + s);
  return e.begin()->second;
}

PElem PrimeTower::to_base(const PElem& x) const {
  if (x.b) fail("FNotOverBase", "element " + format(x) + " is not in the base field");
  return {base().get(), x.a, 0};
}

// ---------------------------------------------------------------- RationalTower

namespace {

using QVec = std::vector<mpq_class>;

std::optional<mpq_class> rational_sqrt(const mpq_class& x) {
  if (sgn(x) < 0) return std::nullopt;
  if (!mpz_perfect_square_p(x.get_num_mpz_t()) || !mpz_perfect_square_p(x.get_den_mpz_t())) return std::nullopt;
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), x.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), x.get_den_mpz_t());
  return mpq_class(n, d);
}

}  // namespace

struct QOps {
  const RationalTower& T;

  QVec mul(int h, const QVec& x, const QVec& y) const {
    size_t N = size_t(1) << h;
    QVec r(N);
    for (size_t S = 0; S < N; ++S) {
      if (sgn(x[S]) == 0) continue;
      for (size_t U = 0; U < N; ++U) {
        if (sgn(y[U]) == 0) continue;
        r[S ^ U] += T.dprod_[S & U] * x[S] * y[U];
      }
    }
    return r;
  }
  QVec inv(int h, const QVec& x) const {
    if (h == 0) return {1 / x[0]};
    size_t T2 = size_t(1) << (h - 1);
    QVec a(x.begin(), x.begin() + T2), b(x.begin() + T2, x.end());
    const mpq_class& d = T.ds_[h - 1];
    QVec n = mul(h - 1, a, a), bb = mul(h - 1, b, b);
    for (size_t i = 0; i < T2; ++i) n[i] -= d * bb[i];
    QVec ni = inv(h - 1, n);
    QVec ra = mul(h - 1, a, ni), rb = mul(h - 1, b, ni);
    QVec r(2 * T2);
    for (size_t i = 0; i < T2; ++i) {
      r[i] = ra[i];
      r[T2 + i] = -rb[i];
    }
    return r;
  }
  static bool zero(const QVec& v) {
    for (auto& c : v)
      if (sgn(c)) return false;
    return true;
  }
  std::optional<QVec> sqrt(int h, const QVec& x) const {
    if (h == 0) {
      auto r = rational_sqrt(x[0]);
      if (!r) return std::nullopt;
      return QVec{*r};
    }
    size_t T2 = size_t(1) << (h - 1);
    QVec a(x.begin(), x.begin() + T2), b(x.begin() + T2, x.end());
    const mpq_class& d = T.ds_[h - 1];
    auto join = [&](const QVec& u, const QVec& v) {
      QVec r(2 * T2);
      for (size_t i = 0; i < T2; ++i) {
        r[i] = u[i];
        r[T2 + i] = v[i];
      }
      return r;
    };
    if (zero(b)) {
      if (auto s = sqrt(h - 1, a)) return join(*s, QVec(T2));
      QVec ad = a;
      for (auto& c : ad) c /= d;
      if (auto t = sqrt(h - 1, ad)) return join(QVec(T2), *t);
      return std::nullopt;
    }
    QVec n = mul(h - 1, a, a), bb = mul(h - 1, b, b);
    for (size_t i = 0; i < T2; ++i) n[i] -= d * bb[i];
    auto rn = sqrt(h - 1, n);
    if (!rn) return std::nullopt;
    for (int sign : {1, -1}) {
      QVec u2(T2);
      for (size_t i = 0; i < T2; ++i) u2[i] = (a[i] + sign * (*rn)[i]) / 2;
      auto u = sqrt(h - 1, u2);
      if (!u || zero(*u)) continue;
      QVec two_u = *u;
      for (auto& c : two_u) c *= 2;
      QVec v = mul(h - 1, b, inv(h - 1, two_u));
      return join(*u, v);
    }
    return std::nullopt;
  }
};

std::shared_ptr<const RationalTower> RationalTower::make(const std::vector<mpq_class>& ds) {
  auto base = std::shared_ptr<RationalTower>(new RationalTower());
  base->dprod_ = {mpq_class(1)};
  std::shared_ptr<RationalTower> cur = base;
  for (size_t j = 0; j < ds.size(); ++j) {
    mpq_class d = ds[j];
    d.canonicalize();
    QElem x = cur->from_mpq(d);
    if (sgn(d) == 0 || cur->is_square(x))
      fail("SquareAdjoined", d.get_str() + " is a square in " + cur->descriptor());
    auto t = std::shared_ptr<RationalTower>(new RationalTower());
    t->ds_ = cur->ds_;
    t->ds_.push_back(d);
    t->h_ = int(t->ds_.size());
    t->dprod_.assign(size_t(1) << t->h_, mpq_class(1));
    for (size_t S = 0; S < t->dprod_.size(); ++S)
      for (int i = 0; i < t->h_; ++i)
        if (S >> i & 1) t->dprod_[S] *= t->ds_[i];
    t->base_ = base;
    cur = t;
  }
  return cur;
}

std::shared_ptr<const RationalTower> RationalTower::base() const {
  if (h_ == 0) return shared_from_this();
  return base_;
}

std::shared_ptr<const RationalTower> RationalTower::extend(const std::vector<mpq_class>& more) const {
  std::vector<mpq_class> all = ds_;
  all.insert(all.end(), more.begin(), more.end());
  return make(all);
}

std::string RationalTower::descriptor() const {
  std::string s = "Q";
  for (auto& d : ds_) s += "(s" + d.get_str() + ")";
  return s;
}

QElem RationalTower::zero() const { return {this, QVec(size_t(1) << h_)}; }
QElem RationalTower::one() const {
  QElem x = zero();
  x.c[0] = 1;
  return x;
}
QElem RationalTower::from_int(long v) const {
  QElem x = zero();
  x.c[0] = v;
  return x;
}
QElem RationalTower::from_ratio(long num, long den) const {
  if (den == 0) fail("DivisionByZero", "zero denominator");
  QElem x = zero();
  x.c[0] = mpq_class(num, den);
  x.c[0].canonicalize();
  return x;
}
QElem RationalTower::from_mpq(const mpq_class& v) const {
  QElem x = zero();
  x.c[0] = v;
  return x;
}
QElem RationalTower::root_symbol(const mpz_class& d) const {
  for (int j = 0; j < h_; ++j)
    if (ds_[j] == mpq_class(d)) return basis(1u << j);
  if (auto y = is_square(from_mpq(mpq_class(d)))) return *y;
  fail("ParseError", "s" + d.get_str() + " is not available in " + descriptor());
}
QElem RationalTower::basis(unsigned S) const {
  if (S >= (1u << h_)) fail("LevelOutOfRange", "basis index");
  QElem x = zero();
  x.c[S] = 1;
  return x;
}
QElem RationalTower::component(const QElem& x, unsigned S) const {
  if (S >= (1u << h_)) fail("LevelOutOfRange", "component index");
  QElem r = zero();
  if (!x.c.empty()) r.c[0] = x.c[S];
  return r;
}

QElem RationalTower::random(Rng& rng) const {
  std::uniform_int_distribution<int> u(-3, 3);
  QElem x = zero();
  for (auto& c : x.c) c = u(rng);
  return x;
}
QElem RationalTower::random_nonzero(Rng& rng) const {
  while (true) {
    QElem x = random(rng);
    if (!x.is_zero()) return x;
  }
}

QElem RationalTower::act(const QElem& x, GalEl g) const {
  if (x.c.empty()) return zero();
  QElem r{this, x.c};
  for (size_t S = 0; S < r.c.size(); ++S)
    if (popcount(unsigned(S) & g) & 1) r.c[S] = -r.c[S];
  return r;
}
QElem RationalTower::conjugate(const QElem& x, int level) const {
  if (level < 0 || level >= h_) fail("LevelOutOfRange", "conjugate at level " + std::to_string(level));
  return act(x, 1u << level);
}
bool RationalTower::fixed_by(const QElem& x, GalEl g) const {
  for (size_t S = 0; S < x.c.size(); ++S)
    if ((popcount(unsigned(S) & g) & 1) && sgn(x.c[S])) return false;
  return true;
}
bool RationalTower::in_level(const QElem& x, int j) const {
  if (j >= h_) return true;
  for (size_t S = 0; S < x.c.size(); ++S)
    if ((S >> j) && sgn(x.c[S])) return false;
  return true;
}

std::optional<QElem> RationalTower::is_square(const QElem& x) const { return is_square_in_level(x, h_); }

std::optional<QElem> RationalTower::is_square_in_level(const QElem& x, int j) const {
  if (j > h_) j = h_;
  if (x.c.empty()) return zero();
  if (!in_level(x, j)) return std::nullopt;
  QVec pre(x.c.begin(), x.c.begin() + (size_t(1) << j));
  auto r = QOps{*this}.sqrt(j, pre);
  if (!r) return std::nullopt;
  QElem y = zero();
  std::copy(r->begin(), r->end(), y.c.begin());
  return y;
}

std::pair<QElem, QElem> RationalTower::norm_and_trace(const QElem& x, int level) const {
  QElem s = conjugate(x, level);
  return {mul(x, s), add(x, s)};
}

QElem RationalTower::add(const QElem& x, const QElem& y) const {
  if (x.c.empty()) return y.c.empty() ? zero() : QElem{this, y.c};
  QElem r{this, x.c};
  if (!y.c.empty())
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] += y.c[i];
  return r;
}
QElem RationalTower::sub(const QElem& x, const QElem& y) const { return add(x, neg(y)); }
QElem RationalTower::neg(const QElem& x) const {
  if (x.c.empty()) return zero();
  QElem r{this, x.c};
  for (auto& c : r.c) c = -c;
  return r;
}
QElem RationalTower::mul(const QElem& x, const QElem& y) const {
  if (x.c.empty() || y.c.empty()) return zero();
  if (h_ == 0) return {this, {x.c[0] * y.c[0]}};
  return {this, QOps{*this}.mul(h_, x.c, y.c)};
}
QElem RationalTower::inv(const QElem& x) const {
  if (x.is_zero()) fail("DivisionByZero", "inverse of zero");
  return {this, QOps{*this}.inv(h_, x.c)};
}
bool RationalTower::eq(const QElem& x, const QElem& y) const {
  size_t N = size_t(1) << h_;
  for (size_t i = 0; i < N; ++i) {
    int sx = i < x.c.size() ? 1 : 0, sy = i < y.c.size() ? 1 : 0;
    if (sx && sy) {
      if (x.c[i] != y.c[i]) return false;
    } else if (sx) {
      if (sgn(x.c[i])) return false;
    } else if (sy) {
      if (sgn(y.c[i])) return false;
    }
  }
  return true;
}

std::string RationalTower::format(const QElem& x) const {
  if (x.c.empty()) return "0";
  std::vector<std::pair<unsigned, mpq_class>> nz;
  for (size_t S = 0; S < x.c.size(); ++S)
    if (sgn(x.c[S])) nz.emplace_back(unsigned(S), x.c[S]);
  if (nz.empty()) return "0";
  auto sym = [&](unsigned S) {
    std::string s;
    for (int j = 0; j < h_; ++j)
      if (S >> j & 1) s += (s.empty() ? "" : "*") + std::string("s") + ds_[j].get_str();
    return s;
  };
  auto term = [&](unsigned S, const mpq_class& c) {
    if (S == 0) return c.get_str();
    if (c == 1) return sym(S);
    if (c == -1) return "-" + sym(S);
    return c.get_str() + "*" + sym(S);
  };
  if (nz.size() == 1) return term(nz[0].first, nz[0].second);
  std::string s = "(";
  for (size_t i = 0; i < nz.size(); ++i) {
    std::string t = term(nz[i].first, nz[i].second);
    if (i && t[0] != '-') s += "+";
    s += t;
  }
  return s + ")";
}

QElem RationalTower::parse(const std::string& s) const {
  detail::ExprParser<RationalTower> P(*this, s);
  auto e = P.parse_all();
  if (e.empty()) return zero();
  if (e.size() != 1 || !e.begin()->first.empty()) fail("ParseError", "not a constant: " + s);
  return e.begin()->second;
}

QElem RationalTower::to_base(const QElem& x) const {
  for (size_t S = 1; S < x.c.size(); ++S)
    if (sgn(x.c[S])) fail("FNotOverBase", "element " + format(x) + " is not in the base field");
  auto b = base();
  QElem r = b->zero();
  if (!x.c.empty()) r.c[0] = x.c[0];
  return r;
}

QElem RationalTower::from_base(const QElem& x) const {
  QElem r = zero();
  if (!x.c.empty()) r.c[0] = x.c[0];
  return r;
}

QElem RationalTower::embed(const QElem& x) const {
  QElem r = zero();
  if (x.c.size() > r.c.size()) fail("LevelOutOfRange", "embedding from a larger tower");
  std::copy(x.c.begin(), x.c.end(), r.c.begin());
  return r;
}

// ---------------------------------------------------------------- descriptors

AnyTower parse_field(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) fail("InputError", "empty field descriptor");
  size_t pos = 0;
  bool rational = false;
  long p = 0;
  if (s[0] == 'Q') {
    rational = true;
    pos = 1;
  } else if (s[0] == 'F') {
    pos = 1;
    size_t st = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (st == pos) fail("InputError", "expected prime after F in \"" + text + "\"");
    p = std::stol(s.substr(st, pos - st));
  } else {
    fail("InputError", "field descriptor must start with F or Q: \"" + text + "\"");
  }
  std::vector<mpz_class> ds;
  while (pos < s.size()) {
    if (s.compare(pos, 2, "(s") != 0) fail("InputError", "expected (sN) in \"" + text + "\"");
    pos += 2;
    size_t st = pos;
    if (pos < s.size() && s[pos] == '-') ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos >= s.size() || s[pos] != ')' || pos == st) fail("InputError", "malformed root in \"" + text + "\"");
    ds.emplace_back(s.substr(st, pos - st));
    ++pos;
  }
  if (rational) {
    std::vector<mpq_class> q(ds.begin(), ds.end());
    return RationalTower::make(q);
  }
  std::vector<long> l;
  for (auto& d : ds) l.push_back(d.get_si());
  return PrimeTower::make(p, l);
}

std::string descriptor(const AnyTower& t) {
  return std::visit([](const auto& T) { return T->descriptor(); }, t);
}

}  // namespace strength
