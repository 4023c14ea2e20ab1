#pragma once

#include <stdexcept>
#include <string>

namespace strength {

// Named failure. `code` is one of the stable identifiers listed in README
// (CharTwo, SquareAdjoined, HypothesisViolated, ...).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace strength
