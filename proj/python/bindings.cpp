// JSON-string bridge; the Python package decodes.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "strength/battery.hpp"

namespace py = pybind11;
using namespace strength;

namespace {

template <class Fn>
void with_field(const std::string& desc, Fn&& fn) {
  std::visit([&](const auto& ptr) { fn(*ptr); }, parse_field(desc));
}

template <class Fn>
void with_cert(const json& cj, Fn&& fn) {
  if (!cj.contains("field")) fail("InputError", "certificate has no field descriptor");
  with_field(cj["field"].get<std::string>(), [&](const auto& K) { fn(K, cert_from_json(K, cj)); });
}

json parse(const std::string& s) {
  try {
    return json::parse(s);
  } catch (const json::exception& e) {
    fail("InputError", e.what());
  }
}

std::string quad_rank_(const std::string& poly, int n, const std::string& field) {
  std::string out;
  with_field(field, [&](const auto& K) {
    auto f = parse_poly(K, poly, n, 2);
    out = json{{"rank", quad_rank(f)}, {"slice_rank", slice_rank_quadric(f)}}.dump();
  });
  return out;
}

std::string slice_rank_(const std::string& poly, int n, const std::string& field, uint64_t budget) {
  std::string out;
  with_field(field, [&](const auto& K) {
    auto f = parse_poly(K, poly, n);
    Budget b(budget);
    auto S = slice_rank_exact(f, b);
    json w = json::array();
    if (S.subspace)
      for (auto& l : S.subspace->forms()) w.push_back(format_poly(l));
    out = json{{"value", S.value}, {"exact", S.exact}, {"witness", w}, {"spent", b.spent}}.dump();
  });
  return out;
}

std::string refined_(const std::string& poly, int n, size_t r2, size_t r1, const std::string& field, uint64_t budget) {
  std::string out = "null";
  with_field(field, [&](const auto& K) {
    auto f = parse_poly(K, poly, n, 4);
    Budget b(budget);
    auto R = refined_rank_search(f, r2, r1, b);
    if (R.cert) out = to_json(*R.cert).dump();
  });
  return out;
}

std::string generate_(const std::string& spec) {
  auto s = spec_from_json(parse(spec));
  std::string out;
  with_field(s.field, [&](const auto& K) {
    auto I = gen_instance(K, s);
    out = json{{"spec", to_json(s)}, {"certificate", to_json(I.cert)}}.dump();
  });
  return out;
}

std::pair<bool, std::string> verify_(const std::string& cert) {
  std::pair<bool, std::string> out;
  with_cert(parse(cert), [&](const auto&, const auto& c) {
    auto v = verify_certificate(c);
    out = {v.ok, v.reason};
  });
  return out;
}

std::string descend_(const std::string& cert, const std::string& pipeline, uint64_t budget) {
  std::string out;
  with_cert(parse(cert), [&](const auto&, const auto& c) {
    Budget b(budget);
    auto pack = [&](const auto& R) {
      out = json{{"schema", kDescentSchema}, {"pipeline", pipeline}, {"route", R.route}, {"certificate", to_json(R.cert)},
                 {"ledger", to_json(R.ledger)}}
                .dump();
    };
    if (pipeline == "r1")
      pack(descend_quartic_r1(c.f, c, b));
    else if (pipeline == "general")
      pack(descend_quartic_general(c.f, c, b));
    else
      fail("InputError", "pipeline is r1 or general");
  });
  return out;
}

std::string battery_(uint64_t seed, const std::map<std::string, int>& suites) {
  auto cfg = default_battery_config(seed);
  if (!suites.empty()) cfg.suites = suites;
  return to_json(run_battery(cfg), false).dump();
}

}  // namespace

PYBIND11_MODULE(_strength, m) {
  static py::exception<Error> exc(m, "StrengthError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetObject(exc.ptr(), py::make_tuple(e.code(), std::string(e.what())).ptr());
    }
  });
  m.def("quad_rank", &quad_rank_, py::arg("poly"), py::arg("n"), py::arg("field"));
  m.def("slice_rank", &slice_rank_, py::arg("poly"), py::arg("n"), py::arg("field"), py::arg("budget"));
  m.def("refined_rank", &refined_, py::arg("poly"), py::arg("n"), py::arg("r2"), py::arg("r1"), py::arg("field"),
        py::arg("budget"));
  m.def("generate", &generate_, py::arg("spec"));
  m.def("verify", &verify_, py::arg("cert"));
  m.def("descend", &descend_, py::arg("cert"), py::arg("pipeline"), py::arg("budget"));
  m.def("battery", &battery_, py::arg("seed"), py::arg("suites"));
  m.def("c_const", [](long r, long s, long q0) { return c_const(r, s, q0).get_str(); });
  m.def("C_const", [](long r, long q0) { return C_const(r, q0).get_str(); });
  m.def("D_const", [](long r, long q0) { return D_const(r, q0).get_str(); });
  m.def("thmB_bound", [](long r) { return thmB_bound(r).get_str(); });
  m.def("inequalities_pass", [](long r, long q) { return verify_proof_inequalities(r, q).all_pass(); });
}
