#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace strength {

// c(r,s,q0) = 2^s (r+q0) + 2^(s-1) (s-2)
mpz_class c_const(long r, long s, long q0);
// C(r,q0) = 2^r (r+q0) + 2^(r-1) (r-2) + 1
mpz_class C_const(long r, long q0);
// D(r,q0) = (2^r - 1)(r+q0-1) + r 2^(r-1)
mpz_class D_const(long r, long q0);
// 8r (41 + 20 (10r+1)^(10r+1))
mpz_class thmB_bound(long r);

struct ThmAConstants {
  mpz_class N, N1, N2;  // N, N', N''
};
ThmAConstants thmA_constants(long p, long r);

// Case 2 of the general pipeline: N' = D(r-1,0) + c(r,r-1,0),
// N'' = N'(2 + (2N'+1)^(2N'+1)), M = p' + (2r-1) N''.
struct Case2Constants {
  mpz_class N1, N2, M;
};
Case2Constants case2_constants(long p_prime, long r);

// rank bound 2r(2 + (r+1)^(r+1)) for almost invariant quadrics
mpz_class rationalization_bound(long r);

struct InequalityItem {
  std::string id;
  std::string statement;
  long checked = 0;
  long not_applicable = 0;
  std::vector<std::string> failures;  // witness tuples
};

struct InequalityReport {
  long r_max = 0, q_max = 0;
  std::vector<InequalityItem> items;
  bool all_pass() const;
};

InequalityReport verify_proof_inequalities(long r_max = 12, long q_max = 12);

}  // namespace strength
