#include "regulab/poly.hpp"

#include "regulab/errors.hpp"

namespace regulab {

PolyFunction::PolyFunction(Rat coeff, unsigned exponent) : c(std::move(coeff)), k(exponent) {
    if (c <= 0 || c > 1) throw DomainError("psi coefficient must lie in (0,1]");
    if (k == 0) throw DomainError("psi exponent must be positive");
}

Rat PolyFunction::operator()(const Rat& x) const {
    if (x <= 0) return Rat(0);
    Rat v = c * pow(x, k);
    return v < x ? v : x;
}

std::string PolyFunction::str() const { return c.get_str() + "," + std::to_string(k); }

PolyFunction PolyFunction::parse(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw ParseError("psi must be given as c,k");
    Rat c = parse_rational(s.substr(0, comma));
    std::string ks = s.substr(comma + 1);
    if (ks.empty() || ks.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("psi exponent must be a positive integer");
    try {
        return PolyFunction(c, static_cast<unsigned>(std::stoul(ks)));
    } catch (const DomainError& e) {
        throw ParseError(e.what());
    }
}

}  // namespace regulab
