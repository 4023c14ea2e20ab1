#include "strength/bounds.hpp"

#include "strength/error.hpp"

namespace strength {

namespace {

mpq_class pow2(long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? mpq_class(1, p) : mpq_class(p);
}

mpz_class to_int(const mpq_class& v, const char* what) {
  mpq_class c = v;
  c.canonicalize();
  if (c.get_den() != 1) fail("InternalError", std::string(what) + " is not an integer");
  return c.get_num();
}

mpz_class ipow(const mpz_class& b, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

}  // namespace

mpz_class c_const(long r, long s, long q0) {
  return to_int(pow2(s) * (r + q0) + pow2(s - 1) * (s - 2), "c(r,s,q0)");
}

mpz_class C_const(long r, long q0) {
  return to_int(pow2(r) * (r + q0) + pow2(r - 1) * (r - 2) + 1, "C(r,q0)");
}

mpz_class D_const(long r, long q0) {
  return to_int((pow2(r) - 1) * (r + q0 - 1) + pow2(r - 1) * r, "D(r,q0)");
}

mpz_class thmB_bound(long r) {
  if (r < 0) fail("InputError", "thmB_bound needs r >= 0");
  return 8 * r * (41 + 20 * ipow(mpz_class(10 * r + 1), static_cast<unsigned long>(10 * r + 1)));
}

ThmAConstants thmA_constants(long p, long r) {
  if (p < 0 || r < 1) fail("InputError", "thmA_constants needs p >= 0, r >= 1");
  ThmAConstants k;
  k.N = 2 * p + C_const(r, 0);
  k.N1 = k.N * (2 + ipow(2 * k.N + 1, k.N.get_ui() * 2 + 1));
  k.N2 = p + 2 * r * k.N1;
  return k;
}

Case2Constants case2_constants(long p_prime, long r) {
  if (r < 1) fail("InputError", "case2_constants needs r >= 1");
  Case2Constants k;
  k.N1 = D_const(r - 1, 0) + c_const(r, r - 1, 0);
  k.N2 = k.N1 * (2 + ipow(2 * k.N1 + 1, k.N1.get_ui() * 2 + 1));
  k.M = p_prime + (2 * r - 1) * k.N2;
  return k;
}

mpz_class rationalization_bound(long r) {
  return 2 * r * (2 + ipow(mpz_class(r + 1), static_cast<unsigned long>(r + 1)));
}

bool InequalityReport::all_pass() const {
  for (auto& it : items)
    if (!it.failures.empty()) return false;
  return true;
}

InequalityReport verify_proof_inequalities(long r_max, long q_max) {
  InequalityReport rep;
  rep.r_max = r_max;
  rep.q_max = q_max;
  auto tuple = [](std::initializer_list<long> v) {
    std::string s = "(";
    bool first = true;
    for (long x : v) {
      s += (first ? "" : ",") + std::to_string(x);
      first = false;
    }
    return s + ")";
  };
  auto item = [&](const char* id, const char* st) -> InequalityItem& {
    rep.items.push_back({id, st, 0, 0, {}});
    return rep.items.back();
  };

  {
    auto& it = item("a", "c(r,s,q) >= c(r,s-1,q+1)");
    for (long r = 0; r <= r_max; ++r)
      for (long s = 0; s <= r_max; ++s)
        for (long q = 0; q <= q_max; ++q) {
          if (s < 1 || s >= r) {
            ++it.not_applicable;
            continue;
          }
          ++it.checked;
          if (!(c_const(r, s, q) >= c_const(r, s - 1, q + 1))) it.failures.push_back(tuple({r, s, q}));
        }
  }
  {
    auto& it = item("b", "c(r-1,s-1,q+1) + c(r,s-1,q+1) = c(r,s,q)");
    for (long r = 0; r <= r_max; ++r)
      for (long s = 0; s <= r_max; ++s)
        for (long q = 0; q <= q_max; ++q) {
          if (s < 1 || s >= r) {
            ++it.not_applicable;
            continue;
          }
          ++it.checked;
          if (c_const(r - 1, s - 1, q + 1) + c_const(r, s - 1, q + 1) != c_const(r, s, q))
            it.failures.push_back(tuple({r, s, q}));
        }
  }
  auto per_rq = [&](const char* id, const char* st, long rmin, auto pred) {
    auto& it = item(id, st);
    for (long r = 0; r <= r_max; ++r)
      for (long q = 0; q <= q_max; ++q) {
        if (r < rmin) {
          ++it.not_applicable;
          continue;
        }
        ++it.checked;
        if (!pred(r, q)) it.failures.push_back(tuple({r, q}));
      }
  };
  per_rq("c", "C(r,q) >= c(r,r-1,q+1) + 1", 1, [](long r, long q) { return C_const(r, q) >= c_const(r, r - 1, q + 1) + 1; });
  per_rq("d", "c(r,r-1,q) + c(r,r-1,q+1) <= C(r,q) - 1", 1,
         [](long r, long q) { return c_const(r, r - 1, q) + c_const(r, r - 1, q + 1) <= C_const(r, q) - 1; });
  per_rq("e", "C(r,q) >= q + D(r,q) + 1", 1, [](long r, long q) { return C_const(r, q) >= q + D_const(r, q) + 1; });
  per_rq("f", "D(r-1,q+1) + c(r,r-1,q+1) = D(r,q)", 1,
         [](long r, long q) { return D_const(r - 1, q + 1) + c_const(r, r - 1, q + 1) == D_const(r, q); });
  {
    auto& it = item("g", "D(r,0) <= C(r,0)");
    for (long r = 0; r <= r_max; ++r) {
      ++it.checked;
      if (!(D_const(r, 0) <= C_const(r, 0))) it.failures.push_back(tuple({r}));
    }
  }
  {
    auto& it = item("h", "3D(r-1,0) + 3c(r,r-1,0) >= C(r-1,0) + c(r-1,r-2,0)");
    for (long r = 0; r <= r_max; ++r) {
      if (r < 2) {
        ++it.not_applicable;
        continue;
      }
      ++it.checked;
      if (!(3 * D_const(r - 1, 0) + 3 * c_const(r, r - 1, 0) >= C_const(r - 1, 0) + c_const(r - 1, r - 2, 0)))
        it.failures.push_back(tuple({r}));
    }
  }
  per_rq("i", "C(r,q) - c(r,r-1,q+1) >= C(r-1,q+1)", 1,
         [](long r, long q) { return C_const(r, q) - c_const(r, r - 1, q + 1) >= C_const(r - 1, q + 1); });
  return rep;
}

}  // namespace strength
