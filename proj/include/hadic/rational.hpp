#ifndef HADIC_RATIONAL_HPP
#define HADIC_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hadic {

// Exact rational scalar. Everything in the engine is computed over Q,
// never floating point; cpp_rational keeps the canonical reduced form
// with positive denominator.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rat rat(long long n) { return Rat(n); }
inline Rat rat(long long n, long long d) {
    if (d == 0) throw std::invalid_argument("rat: zero denominator");
    return Rat(n, d);
}

// Parses "p", "-p", or "p/q". Used for CLI levels and config files.
inline std::optional<Rat> rat_parse(const std::string& s) {
    if (s.empty()) return std::nullopt;
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) return std::nullopt;
        return Rat(num, den);
    } catch (...) {
        return std::nullopt;
    }
}

// Canonical "p/q" (or "p" when q = 1); decimal-free, reduced.
inline std::string rat_str(const Rat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

inline Rat factorial(unsigned n) {
    Rat r = 1;
    for (unsigned k = 2; k <= n; ++k) r *= k;
    return r;
}

// binomial(a, k) for integer a (possibly negative), k >= 0.
inline Rat binomial(long long a, unsigned k) {
    Rat r = 1;
    for (unsigned j = 0; j < k; ++j) {
        r *= Rat(a - static_cast<long long>(j));
        r /= Rat(j + 1);
    }
    return r;
}

inline Rat pow_rat(const Rat& b, unsigned e) {
    Rat r = 1, p = b;
    unsigned k = e;
    while (k) {
        if (k & 1u) r *= p;
        p *= p;
        k >>= 1u;
    }
    return r;
}

} // namespace hadic

#endif
