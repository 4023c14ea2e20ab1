#pragma once

#include <json.hpp>

#include <string>

#include "strength/descent.hpp"
#include "strength/harness.hpp"

namespace strength {

using json = nlohmann::ordered_json;

inline constexpr const char* kCertSchema = "strength-cert/1";
inline constexpr const char* kDescentSchema = "strength-descent/1";
inline constexpr const char* kBatterySchema = "strength-battery/1";

template <class F>
json to_json(const DecompCert<F>& c) {
  json j;
  j["schema"] = kCertSchema;
  j["field"] = c.field;
  j["n"] = c.n();
  j["monomial_order"] = c.order;
  j["f"] = format_poly(c.f);
  j["pairs"] = json::array();
  for (auto& [q, qq] : c.pairs) j["pairs"].push_back({format_poly(q), format_poly(qq)});
  j["P_basis"] = json::array();
  for (auto& l : c.P.forms()) j["P_basis"].push_back(format_poly(l));
  j["residual_witness"] = json::array();
  for (auto& h : c.residual) j["residual_witness"].push_back(format_poly(h));
  j["claims"] = {{"r2", c.r2}, {"r1", c.r1}};
  return j;
}

// Parses against a tower the caller built from j["field"].
template <class F>
DecompCert<F> cert_from_json(const F& K, const json& j) {
  try {
    if (j.at("schema").get<std::string>() != kCertSchema) fail("InputError", "unknown certificate schema");
    DecompCert<F> c;
    c.K = &K;
    c.field = j.at("field").get<std::string>();
    c.order = j.at("monomial_order").get<std::string>();
    int n = j.at("n").get<int>();
    c.f = parse_poly(K, j.at("f").get<std::string>(), n, 4);
    for (auto& pr : j.at("pairs")) {
      if (pr.size() != 2) fail("InputError", "a pair needs two quadrics");
      c.pairs.push_back({parse_poly(K, pr[0].get<std::string>(), n, 2), parse_poly(K, pr[1].get<std::string>(), n, 2)});
    }
    c.P = LinSubspace<F>(K, n);
    auto& B = j.at("P_basis");
    c.P.rows = Mat<F>(K, B.size(), size_t(n));
    for (size_t i = 0; i < B.size(); ++i) {
      auto l = parse_poly(K, B[i].get<std::string>(), n, 1);
      c.P.rows.set_row(i, l.c);
      for (int v = 0; v < n; ++v)
        if (!l.c[size_t(v)].is_zero()) {
          c.P.piv.push_back(size_t(v));
          break;
        }
    }
    for (auto& h : j.at("residual_witness")) c.residual.push_back(parse_poly(K, h.get<std::string>(), n, 3));
    c.r2 = j.at("claims").at("r2").get<size_t>();
    c.r1 = j.at("claims").at("r1").get<size_t>();
    return c;
  } catch (const json::exception& e) {
    fail("InputError", std::string("malformed certificate: ") + e.what());
  }
}

inline json to_json(const Ledger& L) {
  json a = json::array();
  for (auto& e : L.entries)
    a.push_back({{"step", e.step},
                 {"anchor", e.anchor},
                 {"inputs", e.inputs},
                 {"outputs", e.outputs},
                 {"bound", e.bound},
                 {"pass", e.pass}});
  return a;
}

inline Ledger ledger_from_json(const json& a) {
  Ledger L;
  for (auto& e : a)
    L.add(e.at("step"), e.at("anchor"), e.at("inputs"), e.at("outputs"), e.at("bound"), e.at("pass").get<bool>());
  return L;
}

inline bool operator==(const LedgerEntry& a, const LedgerEntry& b) {
  return a.step == b.step && a.anchor == b.anchor && a.inputs == b.inputs && a.outputs == b.outputs &&
         a.bound == b.bound && a.pass == b.pass;
}

inline json to_json(const InstanceSpec& s) {
  return {{"n", s.n},       {"field", s.field}, {"plant", plant_name(s.kind)}, {"r2", s.r2},
          {"r1", s.r1},     {"seed", s.seed},   {"min_rank", s.min_rank},      {"rng", kRngAlgorithm}};
}

inline InstanceSpec spec_from_json(const json& j) {
  InstanceSpec s;
  s.n = j.value("n", s.n);
  s.field = j.value("field", s.field);
  s.kind = parse_plant(j.value("plant", plant_name(s.kind)));
  s.r2 = j.value("r2", s.r2);
  s.r1 = j.value("r1", s.r1);
  s.seed = j.value("seed", s.seed);
  s.min_rank = j.value("min_rank", s.min_rank);
  return s;
}

}  // namespace strength
