#include "support.hpp"

using namespace testing_support;
using F = PrimeTower;

TEST_CASE("gen_instance plants") {
  auto K = prime("F3(s-1)");
  InstanceSpec s;
  s.field = "F3(s-1)";
  s.n = 6;
  s.kind = PlantKind::Rational;
  auto I = gen_instance(*K, s);
  CHECK(cert_over_base(I.cert));
  s.kind = PlantKind::ConjugateSwapped;
  auto J = gen_instance(*K, s);
  REQUIRE(J.cert.pairs.size() == 1);
  auto& [q, qq] = J.cert.pairs[0];
  CHECK(qq == galois_apply(q, 1));
  CHECK(defined_over_level(J.f, 0));
  // f = a^2 - d b^2 with a, b over F_3
  auto a = rationalize_quadric(q, {0, 1}).q0;
  auto b = q - a;
  CHECK(J.f == a * a - b * b);
  s.kind = PlantKind::ScaledCocycle;
  auto S = gen_instance(*K, s);
  CHECK(verify_certificate(S.cert));
  CHECK(error_code([&] {
          auto t = s;
          t.n = 0;
          gen_instance(*K, t);
        }) == "SpecInvalid");
  CHECK(error_code([&] {
          auto t = s;
          t.min_rank = 9;
          gen_instance(*K, t);
        }) == "SpecInvalid");
}

TEST_CASE("seeded generation is deterministic") {
  auto K = prime("F5(s2)");
  InstanceSpec s;
  s.field = "F5(s2)";
  s.n = 5;
  s.r1 = 2;
  s.seed = 77;
  CHECK(to_json(gen_instance(*K, s).cert) == to_json(gen_instance(*K, s).cert));
  auto t = s;
  t.seed = 78;
  CHECK(to_json(gen_instance(*K, s).cert) != to_json(gen_instance(*K, t).cert));
}

TEST_CASE("serialization round-trips") {
  auto K = prime("F3(s-1)");
  for (int k = 0; k < 4; ++k) {
    InstanceSpec s;
    s.field = "F3(s-1)";
    s.n = 6;
    s.r1 = k % 2;
    s.kind = PlantKind(k);
    s.seed = 5 + k;
    auto I = gen_instance(*K, s);
    auto j = to_json(I.cert);
    auto back = cert_from_json(*K, json::parse(j.dump()));
    CHECK(to_json(back) == j);
    CHECK(verify_certificate(back));
    CHECK(to_json(spec_from_json(json::parse(to_json(s).dump()))) == to_json(s));
  }
  Ledger L;
  L.add("step", "anchor", "in", "out", "1 <= 2", true);
  L.add("other", "anchor", "in", "out", "3 <= 2", false);
  auto back = ledger_from_json(json::parse(to_json(L).dump()));
  REQUIRE(back.entries.size() == 2);
  CHECK(back.entries[0] == L.entries[0]);
  CHECK(back.entries[1] == L.entries[1]);
  CHECK(error_code([&] { cert_from_json(*K, json::parse(R"({"schema":"strength-cert/1"})")); }) == "InputError");
  CHECK(error_code([&] { cert_from_json(*K, json::parse(R"({"schema":"other"})")); }) == "InputError");
}

TEST_CASE("battery") {
  BatteryConfig empty;
  auto r0 = run_battery(empty);
  CHECK(r0.pass());
  CHECK(r0.exit_code() == 0);
  CHECK(r0.warnings.size() == 1);

  BatteryConfig c;
  c.seed = 3;
  c.suites = {{"fieldtower", 5}, {"bounds", 1}, {"serialization", 2}};
  auto a = run_battery(c), b = run_battery(c);
  CHECK(a.pass());
  CHECK(to_json(a, false).dump() == to_json(b, false).dump());
  auto again = battery_from_json(json::parse(to_json(a).dump()));
  CHECK(to_json(again, false) == to_json(a, false));

  BatteryConfig f;
  f.suites = {{"strength", 1}};
  f.inject_fault = true;
  auto bad = run_battery(f);
  CHECK_FALSE(bad.pass());
  CHECK(bad.exit_code() == 1);
  REQUIRE_FALSE(bad.suites["strength"].counterexamples.empty());
  // the payload replays
  auto spec = bad.suites["strength"].counterexamples[0].spec;
  CHECK(spec.field == "F3");

  BatteryConfig u;
  u.suites = {{"nope", 1}};
  CHECK(error_code([&] { run_battery(u); }) == "InputError");
}
