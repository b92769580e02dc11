#pragma once

#include <gmpxx.h>

#include "nwheat/numeric_env.hpp"

namespace nwheat {

/// i-th positive rational in breadth-first Calkin-Wilf tree order (i >= 1):
/// q_1 = 1/1, and node i has children 2i -> a/(a+b), 2i+1 -> (a+b)/b. Walking
/// the binary digits of i below the leading bit reproduces the path from the
/// root, so each value costs O(log i) exact integer additions.
inline mpq_class calkin_wilf(unsigned long i) {
  if (i == 0) throw domain_error("Calkin-Wilf index starts at 1");
  int top = 63;
  while (top > 0 && !((i >> top) & 1UL)) --top;
  mpz_class a = 1, b = 1;
  for (int bit = top - 1; bit >= 0; --bit) {
    if ((i >> bit) & 1UL)
      a += b;  // right child (a+b)/b
    else
      b += a;  // left child a/(a+b)
  }
  return mpq_class(a, b);  // already canonical: tree entries are reduced
}

/// The fixed enumeration of all rationals used by u2:
///   r_1 = 0, r_{2i} = q_i, r_{2i+1} = -q_i
/// with q_i the i-th Calkin-Wilf positive rational. Bijective onto Q.
inline mpq_class enumerate_rational(unsigned long k) {
  if (k == 0) throw domain_error("rational enumeration index starts at 1");
  if (k == 1) return mpq_class(0);
  unsigned long i = k / 2;
  mpq_class q = calkin_wilf(i);
  return (k % 2 == 0) ? q : mpq_class(-q);
}

}  // namespace nwheat
