#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace regulab {

using Int = mpz_class;
using Rat = mpq_class;

// num/den with the 0/0 = 0 convention.
Rat ratio(const Int& num, const Int& den);

Rat rat(long num, long den = 1);
Rat pow(const Rat& x, unsigned k);
Int ipow(const Int& x, unsigned k);
Int binom(unsigned n, unsigned k);

// Exact comparison x < sqrt(y) for x, y >= 0.
bool less_than_sqrt(const Rat& x, const Rat& y);

// Accepts "3", "-2", "1/4", "0.25".
Rat parse_rational(const std::string& s);
std::string to_string(const Rat& x);

Int from_i128(__int128 v);

}  // namespace regulab
