#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <future>
#include <map>
#include <string>
#include <vector>

#include "strength/bounds.hpp"
#include "strength/serialize.hpp"

namespace strength {

struct PropertyTally {
  size_t passed = 0, failed = 0, skipped = 0;
};

struct Counterexample {
  std::string property;
  InstanceSpec spec;
  std::string detail;
};

struct SuiteResult {
  std::map<std::string, PropertyTally> properties;
  std::vector<Counterexample> counterexamples;
  double millis = 0;  // not part of the deterministic payload

  bool pass() const {
    for (auto& [_, t] : properties)
      if (t.failed) return false;
    return true;
  }
};

struct BatteryConfig {
  uint64_t seed = 1;
  std::map<std::string, int> suites;  // suite name -> case count
  bool inject_fault = false;
  bool parallel = true;
};

struct BatteryReport {
  uint64_t seed = 1;
  std::map<std::string, SuiteResult> suites;
  std::vector<std::string> warnings;

  bool pass() const {
    for (auto& [_, s] : suites)
      if (!s.pass()) return false;
    return true;
  }
  int exit_code() const { return pass() ? 0 : 1; }
};

class Recorder {
 public:
  explicit Recorder(SuiteResult& out) : out_(out) {}

  void check(const std::string& prop, bool ok, const InstanceSpec& spec, const std::string& detail = "") {
    auto& t = out_.properties[prop];
    if (ok) {
      ++t.passed;
    } else {
      ++t.failed;
      out_.counterexamples.push_back({prop, spec, detail});
    }
  }
  void skip(const std::string& prop) { ++out_.properties[prop].skipped; }

  // Runs body; an exception becomes a failure of prop.
  void guard(const std::string& prop, const InstanceSpec& spec, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      check(prop, false, spec, e.what());
    }
  }

 private:
  SuiteResult& out_;
};

template <class Fn>
void with_tower(const std::string& desc, Fn&& fn) {
  std::visit([&](const auto& ptr) { fn(*ptr); }, parse_field(desc));
}

inline InstanceSpec case_spec(const std::string& field, int n, uint64_t seed) {
  InstanceSpec s;
  s.field = field;
  s.n = n;
  s.seed = seed;
  s.kind = PlantKind::Rational;
  return s;
}

// ---------------------------------------------------------------- suites

namespace suites {

inline void fieldtower(Recorder& rec, int count, uint64_t seed) {
  for (std::string desc : {"F3", "F3(s-1)", "F5(s2)", "F7(s3)", "Q(s2)(s3)"}) {
    with_tower(desc, [&](const auto& K) {
      for (int i = 0; i < count; ++i) {
        uint64_t cs = seed * 1000003u + uint64_t(i);
        auto spec = case_spec(desc, 1, cs);
        rec.guard("field-axioms", spec, [&] {
          Rng rng(cs);
          auto x = K.random(rng), y = K.random(rng), z = K.random(rng);
          bool ok = (x * y) * z == x * (y * z) && x * (y + z) == x * y + x * z && x * y == y * x &&
                    x + (y + z) == (x + y) + z && x - x == K.zero() && x * K.one() == x;
          if (!x.is_zero()) ok = ok && x * K.inv(x) == K.one();
          rec.check("field-axioms", ok, spec);
          bool aut = true;
          for (GalEl g = 0; g < K.group_order(); ++g) {
            aut = aut && K.act(x * y, g) == K.act(x, g) * K.act(y, g) && K.act(x + y, g) == K.act(x, g) + K.act(y, g) &&
                  K.act(K.act(x, g), g) == x;
          }
          rec.check("conjugation-automorphism", aut, spec);
          auto sq = K.is_square(x);
          if (sq) {
            rec.check("is-square-root", (*sq) * (*sq) == x, spec);
          } else if constexpr (std::is_same_v<std::decay_t<decltype(K)>, PrimeTower>) {
            bool none = true;
            for (uint64_t t = 0; t < K.size(); ++t) none = none && !(K.element(t) * K.element(t) == x);
            rec.check("is-square-none-exhaustive", none, spec);
          } else {
            rec.skip("is-square-none-exhaustive");
          }
        });
      }
    });
  }
}

inline void polyring(Recorder& rec, int count, uint64_t seed) {
  for (std::string desc : {"F3(s-1)", "Q(s2)"}) {
    with_tower(desc, [&](const auto& K) {
      using F = std::decay_t<decltype(K)>;
      for (int i = 0; i < count; ++i) {
        uint64_t cs = seed * 1000003u + uint64_t(i);
        int n = 3;
        auto spec = case_spec(desc, n, cs);
        rec.guard("ring-axioms", spec, [&] {
          Rng rng(cs);
          auto f = random_poly(K, n, 1, rng), g = random_poly(K, n, 1, rng), h = random_poly(K, n, 1, rng);
          auto u = random_poly(K, n, 2, rng);
          rec.check("ring-axioms",
                    (f * g) * h == f * (g * h) && f * (g + h) == f * g + f * h && f * g == g * f && (u * f) * g == u * (f * g),
                    spec);
          bool aut = true;
          for (GalEl s = 0; s < K.group_order(); ++s)
            aut = aut && galois_apply(u * f, s) == galois_apply(u, s) * galois_apply(f, s) &&
                  galois_apply(galois_apply(u, s), s) == u;
          rec.check("galois-automorphism", aut, spec);
          Mat<F> M(K, n, n), N(K, n, n);
          for (auto& x : M.a) x = K.random(rng);
          for (auto& x : N.a) x = K.random(rng);
          auto ug = u * g;
          bool ringmap = linear_change(ug, M) == linear_change(u, M) * linear_change(g, M) && linear_change(ug, M).d == 3;
          rec.check("linear-change-ring-map", ringmap, spec);
          rec.check("linear-change-functorial", linear_change(linear_change(ug, M), N) == linear_change(ug, M * N), spec);
          auto q = random_poly(K, n, 1 + int(rng() % 4), rng);
          rec.check("parse-format-roundtrip", parse_poly(K, format_poly(q), n, q.d) == q, spec, format_poly(q));
        });
      }
    });
  }
}

// Slice rank of a quadric over the splitting field equals ceil(rank/2).
inline void quadforms(Recorder& rec, int count, uint64_t seed) {
  for (auto [base, split] : {std::pair<std::string, std::string>{"F3", "F3(s-1)"}, {"F5", "F5(s2)"}}) {
    auto Kb = std::get<std::shared_ptr<const PrimeTower>>(parse_field(base));
    auto Ks = std::get<std::shared_ptr<const PrimeTower>>(parse_field(split));
    using F = PrimeTower;
    for (int i = 0; i < count; ++i) {
      uint64_t cs = seed * 1000003u + uint64_t(i);
      Rng rng(cs);
      int n = 1 + int(rng() % 4);
      auto spec = case_spec(base, n, cs);
      rec.guard("srk-equals-half-rank", spec, [&] {
        auto q = random_poly(*Kb, n, 2, rng);
        size_t rk = quad_rank(q);
        Budget b(50'000'000);
        auto srk = slice_rank_exact(lift(*Ks, q), b).value;
        rec.check("srk-equals-half-rank", srk == (rk + 1) / 2, spec, "rank " + std::to_string(rk) + " srk " + std::to_string(srk));
        rec.check("srk-sandwich", 2 * srk <= rk + 1 && rk <= 2 * srk, spec);
        Mat<F> M(*Kb, n, n);
        do
          for (auto& x : M.a) x = Kb->random(rng);
        while (rank(M) < size_t(n));
        auto q2 = linear_change(q, M);
        rec.check("rank-invariant", quad_rank(q2) == rk && slice_rank_quadric(q2) == slice_rank_quadric(q), spec);
        std::vector<PElem> diag;
        int m = 1 + int(rng() % 5);
        for (int j = 0; j < m; ++j) diag.push_back(Kb->random_nonzero(rng));
        auto H = hyperbolize<F>(Kb, diag);
        const F& T = *H.tower;
        Mat<F> D(T, m, m);
        for (int j = 0; j < m; ++j) D(j, j) = lift(T, diag[j]);
        Mat<F> J(T, m, m);
        auto half = T.inv(T.from_int(2));
        for (int j = 0; j < m / 2; ++j) J(j, m / 2 + j) = J(m / 2 + j, j) = half;
        if (m % 2) J(m - 1, m - 1) = *H.residual;
        rec.check("hyperbolize-congruence", H.M.transpose() * D * H.M == J && H.adjoined.size() <= size_t(m / 2), spec);
        int r = 1 + int(rng() % 2);
        auto fr = Frame<F>::hyperbolic(*Kb, r);
        auto A = random_orthogonal(fr.J, 3, rng), B = random_orthogonal(fr.J, 2, rng);
        rec.check("orthogonal-closure", is_orthogonal(A * B, fr) && is_orthogonal(inverse(A), fr), spec);
      });
    }
  }
}

inline void gradedideal(Recorder& rec, int count, uint64_t seed) {
  auto K = std::get<std::shared_ptr<const PrimeTower>>(parse_field("F3"));
  using F = PrimeTower;
  for (int i = 0; i < count; ++i) {
    uint64_t cs = seed * 1000003u + uint64_t(i);
    Rng rng(cs);
    int n = 2 + int(rng() % 2);
    auto spec = case_spec("F3", n, cs);
    rec.guard("contains-oracle", spec, [&] {
      // two quadric generators, target of degree 3 (n=3) or 4 (n=2): at most 3^6 combinations
      int d = n == 3 ? 3 : 4;
      std::vector<Poly<F>> gens{random_poly(*K, n, 2, rng), random_poly(*K, n, 2, rng)};
      Poly<F> f = rng() % 2 ? random_poly(*K, n, d, rng)
                            : gens[0] * random_poly(*K, n, d - 2, rng) + gens[1] * random_poly(*K, n, d - 2, rng);
      size_t m = monomials(n, d - 2).N;
      bool found = false;
      for_each_vector<F>(*K, 2 * m, [&](const auto& v) {
        Poly<F> a(*K, n, d - 2), b(*K, n, d - 2);
        for (size_t j = 0; j < m; ++j) {
          a.c[j] = v[j];
          b.c[j] = v[m + j];
        }
        found = gens[0] * a + gens[1] * b == f;
        return !found;
      });
      auto mem = contains(f, gens);
      bool mult_ok = !mem.member || gens[0] * mem.multipliers[0] + gens[1] * mem.multipliers[1] == f;
      rec.check("contains-oracle", mem.member == found && mult_ok, spec);

      int nn = 5;
      auto q = random_poly(*K, nn, 2, rng);
      auto l = random_poly(*K, nn, 1, rng);
      auto P = LinSubspace<F>::span(*K, nn, {l.c});
      auto img = reduce_mod_linear(q, P);
      rec.check("reduce-srk-drop", slice_rank_quadric(img) + P.dim() >= slice_rank_quadric(q), spec);

      Budget b(10'000'000);
      std::vector<Poly<F>> qs{random_poly(*K, nn, 2, rng), random_poly(*K, nn, 2, rng)};
      auto m1 = min_slice_rank<F>({qs[0]}, {}, b).value;
      auto m2 = min_slice_rank<F>(qs, {}, b).value;
      rec.check("min-srk-monotone", m2 <= m1, spec);

      // u*v in (Q, L) by construction: Q = {u + l m, w}; needs rank >= 7
      nn = 9;
      l = random_poly(*K, nn, 1, rng);
      P = LinSubspace<F>::span(*K, nn, {l.c});
      auto u = random_poly(*K, nn, 2, rng), v = random_poly(*K, nn, 2, rng), mm = random_poly(*K, nn, 1, rng);
      std::vector<Poly<F>> Q{u + l * mm, random_poly(*K, nn, 2, rng)};
      if (!prime_criterion_hypothesis(Q, P, b)) {
        rec.skip("prime-consequence");
      } else {
        bool prod = u * v == Q[0] * v - l * (mm * v);
        bool either = quad_in_span_mod(u, Q, P).has_value() || quad_in_span_mod(v, Q, P).has_value();
        rec.check("prime-consequence", prod && either, spec);
      }
    });
  }
}

inline void strength_suite(Recorder& rec, int count, uint64_t seed, bool inject_fault) {
  auto K3 = std::get<std::shared_ptr<const PrimeTower>>(parse_field("F3"));
  auto K9 = std::get<std::shared_ptr<const PrimeTower>>(parse_field("F3(s-1)"));
  using F = PrimeTower;
  for (int i = 0; i < count; ++i) {
    uint64_t cs = seed * 1000003u + uint64_t(i);
    Rng rng(cs);
    int n = 4;
    auto spec = case_spec("F3", n, cs);
    spec.r2 = 1;
    spec.r1 = 1;
    rec.guard("refined-search-verifies", spec, [&] {
      auto f = random_poly(*K3, n, 2, rng) * random_poly(*K3, n, 2, rng) + random_poly(*K3, n, 1, rng) * random_poly(*K3, n, 3, rng);
      Budget b(50'000'000);
      auto R = refined_rank_search(f, 1, 1, b);
      bool ok = R.cert.has_value();
      if (ok) {
        auto c = *R.cert;
        if (inject_fault) c.f += Poly<F>::var(*K3, n, 0) * Poly<F>::var(*K3, n, 0) * Poly<F>::var(*K3, n, 0) * Poly<F>::var(*K3, n, 0);
        ok = bool(verify_certificate(c));
      }
      rec.check("refined-search-verifies", ok, spec, inject_fault ? "injected fault" : "");
      auto S = schmidt_rank_search(f, b);
      rec.check("schmidt-below-refined", S.value <= 2, spec);
      Mat<F> M(*K3, n, n);
      do
        for (auto& x : M.a) x = K3->random(rng);
      while (rank(M) < size_t(n));
      auto g = random_poly(*K3, n, 1, rng) * random_poly(*K3, n, 3, rng) + random_poly(*K3, n, 1, rng) * random_poly(*K3, n, 3, rng);
      auto s1 = slice_rank_exact(g, b).value, s2 = slice_rank_exact(linear_change(g, M), b).value;
      rec.check("srk-invariant", s1 == s2, spec);
      // l·σ(l)·c over F_3 with l over F_9: slice rank 1 upstairs
      auto l = random_poly(*K9, n, 1, rng);
      auto h = l * galois_apply(l, 1) * lift(*K9, random_poly(*K3, n, 2, rng));
      auto hb = poly_to_base(*K3, h);
      auto up = slice_rank_exact(h, b).value, down = slice_rank_exact(hb, b).value;
      rec.check("extension-slice-descent", down <= 2 * up && down <= 4 * up, spec,
                std::to_string(down) + " vs " + std::to_string(up));
    });
  }
}

inline void bounds_suite(Recorder& rec, uint64_t seed) {
  auto spec = case_spec("Q", 1, seed);
  rec.guard("constants-nonnegative", spec, [&] {
    bool ok = true;
    for (long r = 0; r <= 12; ++r)
      for (long q = 0; q <= 12; ++q) ok = ok && C_const(r, q) >= 0 && D_const(r, q) >= 0 && c_const(r, 0, q) == r + q - 1;
    rec.check("constants-nonnegative", ok, spec);
    rec.check("proof-inequalities", verify_proof_inequalities(12, 12).all_pass(), spec);
    bool thr = true;
    for (long r = 1; r <= 6; ++r) {
      mpz_class t;
      mpz_ui_pow_ui(t.get_mpz_t(), 10 * r + 1, 10 * r + 1);
      mpz_class re = 8 * r * 41 + 160 * r * t;
      thr = thr && thmB_bound(r) >= 40 * r && thmB_bound(r) == re;
    }
    rec.check("thmB-thresholds", thr, spec);
  });
}

inline void descent_suite(Recorder& rec, int count, uint64_t seed) {
  for (std::string desc : {"F3(s-1)", "F5(s2)", "Q(s2)"}) {
    with_tower(desc, [&](const auto& K) {
      using F = std::decay_t<decltype(K)>;
      for (int i = 0; i < count; ++i) {
        uint64_t cs = seed * 1000003u + uint64_t(i);
        auto spec = case_spec(desc, 6, cs);
        rec.guard("hilbert90", spec, [&] {
          Rng rng(cs);
          auto x = K.random_nonzero(rng);
          ScalarCocycle<F> C;
          C.H = {0, 1};
          C.c[0] = K.one();
          C.c[1] = x / K.act(x, 1);
          auto h = hilbert90_scalar(K, C);
          rec.check("hilbert90", C.c[1] * K.act(h.e, 1) == h.e && !h.e.is_zero(), spec);

          int n = 6, t = 1 + int(rng() % 4);
          auto d = quadric_of_rank(K, n, t, rng);
          auto q = random_base_poly(K, n, 2, rng) + K.basis(1) * d;
          auto R = rationalize_quadric(q, {0, 1});
          rec.check("rationalize-defect", R.defect == size_t(t) && R.defect <= R.max_moved && defined_over_level(R.q0, 0), spec);

          int r = 1 + int(rng() % 2);
          auto fr = Frame<F>::hyperbolic(K, r);
          auto W = fr.quad_gram();
          Mat<F> B = Mat<F>::identity(K, 2 * r);
          for (int k = 0; k < 3; ++k) {
            std::vector<typename F::Elem> u(2 * r);
            do
              for (auto& z : u) z = K.random(rng);
            while (qval(W, u).is_zero());
            B = B * reflection(W, u);
          }
          OrthCocycle<F> OC;
          OC.r = r;
          OC.R[0] = Mat<F>::identity(K, 2 * r);
          OC.R[1] = B.act(1) * inverse(B);
          auto T = trivialize_orth_cocycle(K, OC);
          rec.check("trivialize-coboundary",
                    orth_cocycle_law(OC) && T.B.act(1) * inverse(T.B) == OC.R[1] && preserves(T.B, W) && T.level <= r, spec);
        });
      }
    });
  }
  auto K = std::get<std::shared_ptr<const PrimeTower>>(parse_field("F3(s-1)"));
  using F = PrimeTower;
  for (int i = 0; i < std::max(1, count / 10); ++i) {
    InstanceSpec spec;
    spec.field = "F3(s-1)";
    spec.n = 10;
    spec.r2 = 1;
    spec.r1 = i % 2;
    spec.seed = seed * 1000003u + uint64_t(i);
    rec.guard("descend-r1", spec, [&] {
      auto I = gen_instance(*K, spec);
      Budget b(100'000'000);
      auto R = descend_quartic_r1(I.f, I.cert, b);
      bool laws = true;
      for (auto& C : R.scalars) laws = laws && cocycle_law(*K, C);
      for (auto& C : R.orths) laws = laws && orth_cocycle_law(C);
      rec.check("cocycle-laws", laws, spec);
      bool ok = cert_over_base(R.cert) && verify_certificate(cert_to_base(R.cert)) && R.cert.r2 <= 2 &&
                mpz_class(R.cert.r1) <= thmB_bound(spec.r1) && R.ledger.all_pass();
      rec.check("descend-r1", ok, spec, R.route);
    });
  }
  for (int i = 0; i < std::max(1, count / 10); ++i) {
    uint64_t cs = seed * 1000003u + uint64_t(i);
    auto spec = case_spec("F3", 25, cs);
    spec.r2 = 1 + i % 2;
    rec.guard("alignment", spec, [&] {
      auto Kb = K->base();
      Rng rng(cs);
      auto P = plant_alignment(*Kb, 25, spec.r2, i % 3, 19, rng);
      Quotient<F> Qt(P.L0);
      Budget b(100'000'000);
      auto W = align_decompositions<F>(Qt.down(P.qp), Qt.down(P.pp), {}, b);
      bool ok = W.verified && is_orthogonal(W.A, Frame<F>::hyperbolic(*Kb, spec.r2)) &&
                check_alignment<F>(flatten(P.qp), flatten(P.pp), W.A, {}, Qt.up(W.L)) && W.L.dim() <= W.dim_bound;
      rec.check("alignment", ok, spec);
    });
  }
}

inline void serialization(Recorder& rec, int count, uint64_t seed) {
  auto K = std::get<std::shared_ptr<const PrimeTower>>(parse_field("F3(s-1)"));
  for (int i = 0; i < count; ++i) {
    InstanceSpec spec;
    spec.field = "F3(s-1)";
    spec.n = 6;
    spec.r2 = 1;
    spec.r1 = i % 3;
    spec.kind = PlantKind(i % 4);
    spec.seed = seed * 1000003u + uint64_t(i);
    rec.guard("cert-roundtrip", spec, [&] {
      auto I = gen_instance(*K, spec);
      auto j = to_json(I.cert);
      auto back = cert_from_json(*K, json::parse(j.dump()));
      rec.check("cert-roundtrip", to_json(back) == j && verify_certificate(back), spec);
      rec.check("spec-roundtrip", to_json(spec_from_json(to_json(spec))) == to_json(spec), spec);
      auto again = gen_instance(*K, spec);
      rec.check("gen-deterministic", to_json(again.cert).dump() == j.dump(), spec);
      if (spec.kind != PlantKind::LowSrkDegenerate) {
        Budget b(100'000'000);
        auto R = descend_quartic_r1(I.f, I.cert, b);
        auto lj = to_json(R.ledger);
        rec.check("ledger-roundtrip", to_json(ledger_from_json(json::parse(lj.dump()))) == lj, spec);
      }
    });
  }
}

}  // namespace suites

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"bounds", "descent", "fieldtower", "gradedideal",
                                              "polyring", "quadforms", "serialization", "strength"};
  return names;
}

inline BatteryConfig default_battery_config(uint64_t seed = 1) {
  BatteryConfig c;
  c.seed = seed;
  c.suites = {{"bounds", 1},      {"descent", 20},  {"fieldtower", 200},   {"gradedideal", 20},
              {"polyring", 50},   {"quadforms", 50}, {"serialization", 8}, {"strength", 5}};
  return c;
}

inline SuiteResult run_suite(const std::string& name, int count, uint64_t seed, bool inject_fault) {
  SuiteResult out;
  Recorder rec(out);
  auto t0 = std::chrono::steady_clock::now();
  if (name == "fieldtower") suites::fieldtower(rec, count, seed);
  else if (name == "polyring") suites::polyring(rec, count, seed);
  else if (name == "quadforms") suites::quadforms(rec, count, seed);
  else if (name == "gradedideal") suites::gradedideal(rec, count, seed);
  else if (name == "strength") suites::strength_suite(rec, count, seed, inject_fault);
  else if (name == "bounds") suites::bounds_suite(rec, seed);
  else if (name == "descent") suites::descent_suite(rec, count, seed);
  else if (name == "serialization") suites::serialization(rec, count, seed);
  else fail("InputError", "unknown suite '" + name + "'");
  out.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline BatteryReport run_battery(const BatteryConfig& cfg) {
  BatteryReport rep;
  rep.seed = cfg.seed;
  if (cfg.suites.empty()) {
    rep.warnings.push_back("empty configuration: no suites run");
    return rep;
  }
  for (auto& [name, _] : cfg.suites)
    if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end())
      fail("InputError", "unknown suite '" + name + "'");
  std::map<std::string, std::future<SuiteResult>> jobs;
  for (auto& [name, count] : cfg.suites) {
    auto policy = cfg.parallel ? std::launch::async : std::launch::deferred;
    jobs[name] = std::async(policy, run_suite, name, count, cfg.seed, cfg.inject_fault);
  }
  for (auto& [name, job] : jobs) rep.suites[name] = job.get();
  return rep;
}

inline json to_json(const BatteryReport& rep, bool with_timing = true) {
  json j;
  j["schema"] = kBatterySchema;
  j["rng"] = kRngAlgorithm;
  j["seed"] = rep.seed;
  j["pass"] = rep.pass();
  j["warnings"] = rep.warnings;
  json S = json::object();
  for (auto& [name, s] : rep.suites) {
    json props = json::object();
    for (auto& [p, t] : s.properties) props[p] = {{"passed", t.passed}, {"failed", t.failed}, {"skipped", t.skipped}};
    json cex = json::array();
    for (auto& c : s.counterexamples) cex.push_back({{"property", c.property}, {"spec", to_json(c.spec)}, {"detail", c.detail}});
    S[name] = {{"properties", props}, {"counterexamples", cex}};
  }
  j["suites"] = S;
  if (with_timing) {
    json T = json::object();
    for (auto& [name, s] : rep.suites) T[name] = s.millis;
    j["timing_ms"] = T;
  }
  return j;
}

inline BatteryReport battery_from_json(const json& j) {
  BatteryReport rep;
  rep.seed = j.at("seed").get<uint64_t>();
  rep.warnings = j.at("warnings").get<std::vector<std::string>>();
  for (auto& [name, s] : j.at("suites").items()) {
    SuiteResult r;
    for (auto& [p, t] : s.at("properties").items())
      r.properties[p] = {t.at("passed").get<size_t>(), t.at("failed").get<size_t>(), t.at("skipped").get<size_t>()};
    for (auto& c : s.at("counterexamples"))
      r.counterexamples.push_back({c.at("property").get<std::string>(), spec_from_json(c.at("spec")), c.at("detail").get<std::string>()});
    if (j.contains("timing_ms") && j["timing_ms"].contains(name)) r.millis = j["timing_ms"][name].get<double>();
    rep.suites[name] = std::move(r);
  }
  return rep;
}

inline BatteryConfig battery_config_from_json(const json& j) {
  BatteryConfig c;
  c.seed = j.value("seed", c.seed);
  c.inject_fault = j.value("inject_fault", false);
  c.parallel = j.value("parallel", true);
  if (j.contains("suites")) c.suites = j.at("suites").get<std::map<std::string, int>>();
  return c;
}

}  // namespace strength
