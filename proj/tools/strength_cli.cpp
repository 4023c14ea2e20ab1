#include <CLI11.hpp>

#include <fstream>
#include <set>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "strength/battery.hpp"
#include "strength/bounds.hpp"
#include "strength/serialize.hpp"

using namespace strength;

namespace {

enum Exit { kOk = 0, kUnverified = 1, kHypothesis = 2, kBudget = 3, kInput = 4 };

int exit_for(const std::string& code) {
  static const std::set<std::string> hypothesis{
      "HypothesisViolated", "RankHypothesisFailed", "NoBranch",       "BothBranches", "BZeroContradiction",
      "ExtensionRequired",  "NotQuadraticLevel",    "NonCocycle",     "CocycleLawViolated", "NormNotOne"};
  if (code == "BudgetExceeded") return kBudget;
  if (hypothesis.count(code)) return kHypothesis;
  if (code == "InternalError") return kUnverified;
  return kInput;
}

struct Common {
  std::string field = "F3";
  int n = 4;
  uint64_t seed = 1;
  uint64_t budget = kDefaultBudget;
  bool json = false;
};

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) fail("InputError", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(slurp(path));
  } catch (const json::exception& e) {
    fail("InputError", std::string("bad JSON in ") + path + ": " + e.what());
  }
}

void emit(const json& j, bool as_json, const std::function<void()>& text) {
  if (as_json)
    std::cout << j.dump(2) << "\n";
  else
    text();
}

template <class Fn>
void with_field(const std::string& desc, Fn&& fn) {
  std::visit([&](const auto& ptr) { fn(*ptr); }, parse_field(desc));
}

// ---------------------------------------------------------------- rank

int cmd_rank(const Common& o, const std::string& text, bool schmidt) {
  int code = kOk;
  with_field(o.field, [&](const auto& K) {
    auto f = parse_poly(K, text, o.n);
    Budget b(o.budget);
    json j{{"field", o.field}, {"n", o.n}, {"degree", f.d}, {"poly", format_poly(f)}};
    if (f.d == 2) {
      j["rank"] = quad_rank(f);
    }
    if (K.finite()) {
      auto S = slice_rank_exact(f, b);
      j["slice_rank"] = S.value;
      j["slice_rank_mode"] = S.exact ? "exact" : "upper-bound";
      if (S.subspace) {
        json basis = json::array();
        for (auto& l : S.subspace->forms()) basis.push_back(format_poly(l));
        j["slice_witness"] = basis;
      }
      if (!S.exact) code = kBudget;
    } else if (f.d == 2) {
      j["slice_rank"] = slice_rank_quadric(f);
      j["slice_rank_mode"] = "quadric-formula";
    } else {
      fail("UnsupportedExactOverRationals", "slice rank enumeration needs a finite field");
    }
    if (schmidt && f.d == 4) {
      Budget b2(o.budget);
      auto R = schmidt_rank_search(f, b2);
      j["schmidt_rank"] = R.value;
      j["schmidt_rank_mode"] = R.exact ? "exact" : "upper-bound";
      if (R.cert) j["certificate"] = to_json(*R.cert);
      if (!R.exact) code = kBudget;
    }
    j["spent"] = b.spent;
    emit(j, o.json, [&] {
      if (j.contains("rank")) std::cout << "rank          " << j["rank"] << "\n";
      std::cout << "slice rank    " << j["slice_rank"] << " (" << j["slice_rank_mode"].get<std::string>() << ")\n";
      if (j.contains("schmidt_rank"))
        std::cout << "schmidt rank  " << j["schmidt_rank"] << " (" << j["schmidt_rank_mode"].get<std::string>() << ")\n";
    });
  });
  return code;
}

// ---------------------------------------------------------------- strength

int cmd_strength(const Common& o, const std::string& text, size_t r2, size_t r1) {
  int code = kOk;
  with_field(o.field, [&](const auto& K) {
    auto f = parse_poly(K, text, o.n, 4);
    Budget b(o.budget);
    auto R = refined_rank_search(f, r2, r1, b);
    json j{{"field", o.field}, {"n", o.n}, {"r2", r2}, {"r1", r1}, {"member", bool(R.cert)}, {"spent", b.spent}};
    if (R.cert) j["certificate"] = to_json(*R.cert);
    code = R.cert ? kOk : kUnverified;
    emit(j, o.json, [&] {
      std::cout << (R.cert ? "f has refined rank <= (" : "no decomposition of shape (") << r2 << ", " << r1 << ")\n";
      if (R.cert) std::cout << to_json(*R.cert).dump(2) << "\n";
    });
  });
  return code;
}

// ---------------------------------------------------------------- gen

InstanceSpec spec_of(const Common& o, const std::string& plant, int r2, int r1, int min_rank) {
  InstanceSpec s;
  s.field = o.field;
  s.n = o.n;
  s.seed = o.seed;
  s.kind = parse_plant(plant);
  s.r2 = r2;
  s.r1 = r1;
  s.min_rank = min_rank;
  return s;
}

int cmd_gen(const Common& o, const InstanceSpec& s) {
  with_field(s.field, [&](const auto& K) {
    auto I = gen_instance(K, s);
    json j{{"spec", to_json(s)}, {"certificate", to_json(I.cert)}};
    emit(j, true, [] {});
  });
  (void)o;
  return kOk;
}

// ---------------------------------------------------------------- verify / descend

template <class Fn>
void with_cert(const json& cj, Fn&& fn) {
  std::string field;
  try {
    field = cj.at("field").get<std::string>();
  } catch (const json::exception&) {
    fail("InputError", "certificate has no field descriptor");
  }
  with_field(field, [&](const auto& K) { fn(K, cert_from_json(K, cj)); });
}

json unwrap_cert(const json& j) { return j.contains("certificate") ? j["certificate"] : j; }

int cmd_verify(const Common& o, const std::string& path) {
  int code = kOk;
  with_cert(unwrap_cert(read_json(path)), [&](const auto&, const auto& c) {
    auto v = verify_certificate(c);
    json j{{"verified", v.ok}, {"reason", v.reason}, {"r2", c.r2}, {"r1", c.r1}};
    code = v.ok ? kOk : kUnverified;
    emit(j, o.json, [&] { std::cout << (v.ok ? "verified" : "REJECTED: " + v.reason) << "\n"; });
  });
  return code;
}

int cmd_descend(const Common& o, const std::string& path, const std::string& pipeline, bool ledger) {
  with_cert(unwrap_cert(read_json(path)), [&](const auto&, const auto& c) {
    Budget b(o.budget);
    json j{{"schema", kDescentSchema}, {"pipeline", pipeline}};
    auto report = [&](const auto& R) {
      j["route"] = R.route;
      j["certificate"] = to_json(R.cert);
      j["r2"] = R.cert.pairs.size();
      j["r1"] = R.cert.P.dim();
      if (ledger) j["ledger"] = to_json(R.ledger);
    };
    if (pipeline == "r1")
      report(descend_quartic_r1(c.f, c, b));
    else if (pipeline == "general")
      report(descend_quartic_general(c.f, c, b));
    else
      fail("InputError", "pipeline is r1 or general");
    emit(j, o.json, [&] {
      std::cout << "route " << j["route"].get<std::string>() << ": r2 " << j["r2"] << ", r1 " << j["r1"] << "\n";
      if (ledger)
        for (auto& e : j["ledger"])
          std::cout << (e["pass"].get<bool>() ? "  ok   " : "  FAIL ") << e["step"].get<std::string>() << "  "
                    << e["bound"].get<std::string>() << "\n";
      std::cout << j["certificate"].dump(2) << "\n";
    });
  });
  return kOk;
}

// ---------------------------------------------------------------- bounds

int cmd_bounds(const Common& o, long rmax, long qmax) {
  json table = json::array();
  for (long r = 1; r <= rmax; ++r)
    for (long q = 0; q <= qmax; ++q)
      table.push_back({{"r", r},
                       {"q0", q},
                       {"c", c_const(r, 0, q).get_str()},
                       {"C", C_const(r, q).get_str()},
                       {"D", D_const(r, q).get_str()}});
  json thmB = json::array();
  for (long r = 0; r <= std::min(rmax, 4L); ++r) thmB.push_back({{"r", r}, {"bound", thmB_bound(r).get_str()}});
  auto rep = verify_proof_inequalities(rmax, qmax);
  json items = json::array();
  for (auto& it : rep.items)
    items.push_back({{"id", it.id},
                     {"statement", it.statement},
                     {"checked", it.checked},
                     {"not_applicable", it.not_applicable},
                     {"failures", it.failures}});
  json j{{"r_max", rmax}, {"q0_max", qmax}, {"table", table}, {"thmB", thmB}, {"inequalities", items}, {"pass", rep.all_pass()}};
  emit(j, o.json, [&] {
    std::cout << std::setw(4) << "r" << std::setw(5) << "q0" << std::setw(10) << "c(r,0,q0)" << std::setw(12) << "C(r,q0)"
              << std::setw(12) << "D(r,q0)" << "\n";
    for (auto& row : table)
      std::cout << std::setw(4) << row["r"].get<long>() << std::setw(5) << row["q0"].get<long>() << std::setw(10) << row["c"].get<std::string>()
                << std::setw(12) << row["C"].get<std::string>() << std::setw(12) << row["D"].get<std::string>() << "\n";
    std::cout << "\n";
    for (auto& t : thmB) std::cout << "thmB(" << t["r"] << ") = " << t["bound"].get<std::string>() << "\n";
    std::cout << "\n";
    for (auto& it : rep.items)
      std::cout << (it.failures.empty() ? "ok   " : "FAIL ") << std::left << std::setw(4) << it.id << std::right
                << std::setw(7) << it.checked << " checked " << std::setw(5) << it.not_applicable << " n/a  "
                << it.statement << "\n";
  });
  return rep.all_pass() ? kOk : kUnverified;
}

// ---------------------------------------------------------------- battery

int cmd_battery(const Common& o, const std::string& config, const std::vector<std::string>& only, bool fault,
                bool timing, bool seed_given) {
  BatteryConfig cfg = default_battery_config(o.seed);
  if (!config.empty()) {
    cfg = battery_config_from_json(read_json(config));
    if (seed_given) cfg.seed = o.seed;
  }
  if (!only.empty()) {
    std::map<std::string, int> pick;
    for (auto& s : only) {
      auto eq = s.find('=');
      std::string name = s.substr(0, eq);
      int count = 0;
      if (eq != std::string::npos) {
        count = std::atoi(s.c_str() + eq + 1);
      } else {
        auto d = default_battery_config().suites;
        if (!d.count(name)) fail("InputError", "unknown suite '" + name + "'");
        count = d[name];
      }
      pick[name] = count;
    }
    cfg.suites = pick;
  }
  cfg.inject_fault = cfg.inject_fault || fault;
  auto rep = run_battery(cfg);
  std::cout << to_json(rep, timing).dump(2) << "\n";
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact slice rank, strength, and Galois descent for quartics"};
  app.require_subcommand(1);
  Common o;
  auto common = [&](CLI::App* s) {
    s->add_option("--field", o.field, "field descriptor, e.g. F3, F3(s-1), Q(s2)")->capture_default_str();
    s->add_option("--n", o.n, "number of variables")->capture_default_str();
    s->add_option("--seed", o.seed, "PRNG seed (mt19937_64)")->capture_default_str();
    s->add_option("--budget", o.budget, "enumeration budget")->capture_default_str();
    s->add_flag("--json", o.json, "JSON output");
  };

  std::string poly, cert_path = "-", pipeline = "r1", plant = "conjugate-swapped", config;
  bool schmidt = false, ledger = false, fault = false, no_timing = false;
  size_t sr2 = 1, sr1 = 1;
  int gr2 = 1, gr1 = 0, min_rank = 0;
  long rmax = 12, qmax = 12;
  std::vector<std::string> only;

  auto* rank = app.add_subcommand("rank", "slice rank (and Schmidt rank of a quartic)");
  common(rank);
  rank->add_option("poly", poly, "homogeneous polynomial in x1..xn")->required();
  rank->add_flag("--schmidt", schmidt, "also search the Schmidt rank");

  auto* str = app.add_subcommand("strength", "is f in (q_1..q_r2, l_1..l_r1)?");
  common(str);
  str->add_option("poly", poly, "quartic")->required();
  str->add_option("--r2", sr2)->capture_default_str();
  str->add_option("--r1", sr1)->capture_default_str();

  auto* desc = app.add_subcommand("descend", "descend a certificate over an extension to the base field");
  common(desc);
  desc->add_option("cert", cert_path, "certificate JSON ('-' for stdin)")->capture_default_str();
  desc->add_option("--pipeline", pipeline, "r1 or general")->capture_default_str()->check(CLI::IsMember({"r1", "general"}));
  desc->add_flag("--ledger", ledger, "emit the step ledger");

  auto* bnd = app.add_subcommand("bounds", "constant tables and the inequality report");
  common(bnd);
  bnd->add_option("--r-max", rmax)->capture_default_str();
  bnd->add_option("--q-max", qmax)->capture_default_str();

  auto* gen = app.add_subcommand("gen", "planted instance with its certificate over the extension");
  common(gen);
  gen->add_option("--plant", plant, "rational, conjugate-swapped, scaled-cocycle, low-srk-degenerate")->capture_default_str();
  gen->add_option("--r2", gr2)->capture_default_str();
  gen->add_option("--r1", gr1)->capture_default_str();
  gen->add_option("--min-rank", min_rank)->capture_default_str();

  auto* bat = app.add_subcommand("battery", "property suites");
  common(bat);
  bat->add_option("--config", config, "battery config JSON");
  bat->add_option("--suite", only, "name or name=count; repeatable");
  bat->add_flag("--inject-fault", fault, "perturb certificates (negative control)");
  bat->add_flag("--no-timing", no_timing, "omit timing from the report");

  auto* ver = app.add_subcommand("verify", "check a certificate");
  common(ver);
  ver->add_option("cert", cert_path, "certificate JSON ('-' for stdin)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*rank) return cmd_rank(o, poly, schmidt);
    if (*str) return cmd_strength(o, poly, sr2, sr1);
    if (*desc) return cmd_descend(o, cert_path, pipeline, ledger);
    if (*bnd) return cmd_bounds(o, rmax, qmax);
    if (*gen) return cmd_gen(o, spec_of(o, plant, gr2, gr1, min_rank));
    if (*bat) return cmd_battery(o, config, only, fault, !no_timing, bat->count("--seed") > 0);
    if (*ver) return cmd_verify(o, cert_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
