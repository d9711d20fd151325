#include "regulab/rational.hpp"

#include "regulab/errors.hpp"

namespace regulab {

Rat ratio(const Int& num, const Int& den) {
    if (den == 0) {
        if (num != 0) throw DomainError("nonzero numerator over zero denominator");
        return Rat(0);
    }
    Rat r(num, den);
    r.canonicalize();
    return r;
}

Rat rat(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

Rat pow(const Rat& x, unsigned k) {
    Int n, d;
    mpz_pow_ui(n.get_mpz_t(), x.get_num_mpz_t(), k);
    mpz_pow_ui(d.get_mpz_t(), x.get_den_mpz_t(), k);
    Rat r(n, d);
    r.canonicalize();
    return r;
}

Int ipow(const Int& x, unsigned k) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), x.get_mpz_t(), k);
    return r;
}

Int binom(unsigned n, unsigned k) {
    Int r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

bool less_than_sqrt(const Rat& x, const Rat& y) {
    if (x < 0) return true;
    return x * x < y;
}

Rat parse_rational(const std::string& s) {
    if (s.empty()) throw ParseError("empty rational");
    auto dot = s.find('.');
    Rat r;
    try {
        if (dot != std::string::npos) {
            std::string whole = s.substr(0, dot);
            std::string frac = s.substr(dot + 1);
            bool neg = !whole.empty() && whole[0] == '-';
            if (neg) whole = whole.substr(1);
            if (whole.empty()) whole = "0";
            if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos ||
                whole.find_first_not_of("0123456789") != std::string::npos)
                throw ParseError("bad decimal '" + s + "'");
            Int scale = ipow(Int(10), static_cast<unsigned>(frac.size()));
            r = Rat(Int(whole) * scale + Int(frac), scale);
            if (neg) r = -r;
        } else {
            if (s.find_first_not_of("-0123456789/") != std::string::npos)
                throw ParseError("bad rational '" + s + "'");
            r = Rat(s);
        }
    } catch (const std::invalid_argument&) {
        throw ParseError("bad rational '" + s + "'");
    }
    if (r.get_den() == 0) throw ParseError("zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
}

std::string to_string(const Rat& x) { return x.get_str(); }

Int from_i128(__int128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
    Int hi(static_cast<unsigned long>(static_cast<uint64_t>(u >> 64)));
    Int lo(static_cast<unsigned long>(static_cast<uint64_t>(u)));
    Int r = (hi << 64) + lo;
    return neg ? Int(-r) : r;
}

}  // namespace regulab
