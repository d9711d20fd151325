#pragma once

#include <string>

#include "regulab/rational.hpp"

namespace regulab {

// psi(x) = min(c * x^k, x), evaluated exactly.
struct PolyFunction {
    Rat c{1};
    unsigned k = 1;

    PolyFunction() = default;
    PolyFunction(Rat coeff, unsigned exponent);

    Rat operator()(const Rat& x) const;
    std::string str() const;
    // Parses "c,k", e.g. "1/16,3".
    static PolyFunction parse(const std::string& s);
};

}  // namespace regulab
