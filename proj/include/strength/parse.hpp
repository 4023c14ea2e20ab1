#pragma once

#include <algorithm>
#include <cctype>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "strength/error.hpp"

namespace strength::detail {

// Sparse polynomial used only while reading text: sorted variable-index
// multiset -> coefficient.
template <class F>
using SparseExpr = std::map<std::vector<int>, typename F::Elem>;

// Recursive-descent reader for sums of products of numbers, fractions,
// root symbols sN, variables xN and parenthesized subexpressions, with ^ on
// variables and parenthesized groups.
template <class F>
class ExprParser {
 public:
  using E = typename F::Elem;
  using Expr = SparseExpr<F>;

  ExprParser(const F& K, const std::string& s) : K_(K), s_(s) {}

  Expr parse_all() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  const F& K_;
  const std::string& s_;
  size_t pos_ = 0;

  [[noreturn]] void error(const std::string& m) {
    fail("ParseError", m + " at offset " + std::to_string(pos_) + " in \"" + s_ + "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static void accumulate(Expr& into, const std::vector<int>& m, const E& c) {
    auto it = into.find(m);
    if (it == into.end()) {
      if (!c.is_zero()) into.emplace(m, c);
      return;
    }
    it->second = it->second + c;
    if (it->second.is_zero()) into.erase(it);
  }
  static Expr mul(const Expr& a, const Expr& b) {
    Expr r;
    for (const auto& [ma, ca] : a)
      for (const auto& [mb, cb] : b) {
        std::vector<int> m;
        m.reserve(ma.size() + mb.size());
        std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(m));
        accumulate(r, m, ca * cb);
      }
    return r;
  }
  Expr constant(const E& c) {
    Expr r;
    if (!c.is_zero()) r.emplace(std::vector<int>{}, c);
    return r;
  }
  std::string digits() {
    skip();
    size_t st = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (st == pos_) error("expected digits");
    return s_.substr(st, pos_ - st);
  }
  Expr expr() {
    Expr acc;
    bool first = true;
    while (true) {
      skip();
      bool neg = false;
      if (eat('+')) {
      } else if (eat('-')) {
        neg = true;
      } else if (!first) {
        break;
      }
      Expr t = term();
      for (auto& [m, c] : t) accumulate(acc, m, neg ? -c : c);
      first = false;
      skip();
      if (pos_ >= s_.size() || (s_[pos_] != '+' && s_[pos_] != '-')) break;
    }
    return acc;
  }
  Expr term() {
    Expr acc = factor();
    while (eat('*')) acc = mul(acc, factor());
    return acc;
  }
  Expr factor() {
    Expr base = atom();
    if (eat('^')) {
      long e = std::stol(digits());
      Expr r = constant(K_.one());
      for (long i = 0; i < e; ++i) r = mul(r, base);
      return r;
    }
    return base;
  }
  Expr atom() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!eat(')')) error("expected ')'");
      return e;
    }
    if (c == 'x') {
      ++pos_;
      int v = std::stoi(digits());
      if (v < 1) error("variables are numbered from x1");
      Expr r;
      r.emplace(std::vector<int>{v - 1}, K_.one());
      return r;
    }
    if (c == 's') {
      ++pos_;
      bool neg = false;
      if (pos_ < s_.size() && s_[pos_] == '-') {
        neg = true;
        ++pos_;
      }
      std::string d = digits();
      mpz_class v(d);
      if (neg) v = -v;
      return constant(K_.root_symbol(v));
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mpq_class q{mpz_class(digits())};
      if (eat('/')) {
        mpz_class den(digits());
        if (den == 0) error("zero denominator");
        q = mpq_class(q.get_num(), den);
        q.canonicalize();
      }
      return constant(K_.from_mpq(q));
    }
    error("unexpected '" + std::string(1, c) + "'");
  }
};

}  // namespace strength::detail
