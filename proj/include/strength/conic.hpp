#pragma once

#include <gmpxx.h>

#include <array>
#include <map>
#include <optional>

namespace strength {

// prime -> exponent of |n|; nullopt when the rho iteration cap is hit
using Factorization = std::map<mpz_class, int>;
std::optional<Factorization> factor(const mpz_class& n, unsigned long rho_cap = 2'000'000);

// r with r^2 ≡ a mod p, p prime
std::optional<mpz_class> sqrt_mod_prime(const mpz_class& a, const mpz_class& p);

// Nontrivial integer zero of a x^2 + b y^2 + c z^2.  nullopt when none
// exists, or when factoring or the reduced-lattice search gives up.
std::optional<std::array<mpz_class, 3>> solve_legendre(const mpz_class& a, const mpz_class& b, const mpz_class& c);

// Nontrivial rational zero of a x^2 + b y^2 + c z^2.
std::optional<std::array<mpq_class, 3>> solve_ternary(const mpq_class& a, const mpq_class& b, const mpq_class& c);

}  // namespace strength
