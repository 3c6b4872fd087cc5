#ifndef HADIC_OPSERIES_HPP
#define HADIC_OPSERIES_HPP

#include <map>

#include "hadic/hseries.hpp"

namespace hadic {

// Operator series in hbar and the formal derivative of one variable:
//
//   O = sum_k hbar^k * P_k(D_v),   k >= koff_min (koff_min = -1 allowed)
//
// Houses F(D), G(D), L(z D) for z in hbar*Q, q^{cD} = e^{c hbar D}, and the
// q-brackets [m]. F carries the 1/(2 hbar) prefactor, so applying it can
// lower the hbar order of its input by one.
class OpSeries {
public:
    // table: offset k -> (derivative degree d -> coefficient)
    static OpSeries zero();
    static OpSeries identity();
    static OpSeries monomial(int koff, int d, const Rat& c);

    // G(x) = (q^x - q^-x)/x = 2 hbar (1 + sum_{n>=1} hbar^{2n} x^{2n}/(2n+1)!)
    static OpSeries G(int nmax);
    // G_m(x) = (q^{mx} - q^{-mx})/x for rational m
    static OpSeries G_m(const Rat& m, int nmax);
    // F(x) = 1/G(x), offsets -1, 1, 3, ...
    static OpSeries F(int nmax);
    // L(c hbar^p D) with L(x) = (e^x - 1)/x; p >= 1
    static OpSeries L(const Rat& c, int p, int nmax);
    // q^{cD} = e^{c hbar D}
    static OpSeries qpow(const Rat& c, int nmax);
    // [m] with v = q^{D}: finite shift sum for integer m, F o G_m for rationals
    static OpSeries qbracket_int(long long m, int nmax);
    static OpSeries qbracket(const Rat& m, int nmax);

    OpSeries add(const OpSeries& o) const;
    OpSeries sub(const OpSeries& o) const;
    OpSeries scaled(const Rat& c) const;
    OpSeries compose(const OpSeries& o, int nmax) const;

    bool is_zero() const { return t_.empty(); }
    int koff_min() const;
    int koff_max() const;
    int max_deriv() const;
    // true when the table is the entire operator (no truncated tail)
    bool complete() const { return complete_; }

    // first difference between tables up to offset nmax
    bool eq_upto(const OpSeries& o, int nmax) const;

    HSeries apply(const HSeries& a, int v) const;

    // offset -> (derivative degree -> coefficient)
    const std::map<int, std::map<int, Rat>>& table() const { return t_; }

    std::string str() const;

private:
    std::map<int, std::map<int, Rat>> t_;
    bool complete_ = true;
    void put(int k, int d, const Rat& c);
};

} // namespace hadic

#endif
