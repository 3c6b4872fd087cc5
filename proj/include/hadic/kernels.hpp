#ifndef HADIC_KERNELS_HPP
#define HADIC_KERNELS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hadic/hseries.hpp"

namespace hadic {

// Exact sparse polynomial in a variable set plus hbar. Used for kernel
// numerators and for the truncation-free identity checker.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<int> vars);
    static Poly constant(std::vector<int> vars, const Rat& c);
    static Poly monomial(std::vector<int> vars, const Rat& c, int hpow, const std::vector<int>& exps);
    // linear form big - small + c*hbar
    static Poly linear(std::vector<int> vars, int big, int small, const Rat& c);

    const std::vector<int>& vars() const { return vars_; }
    const std::map<HKey, Rat>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }

    Poly with_vars(const std::vector<int>& all_vars) const;
    Poly add(const Poly& o) const;
    Poly sub(const Poly& o) const;
    Poly mul(const Poly& o) const;
    Poly scaled(const Rat& c) const;
    Poly neg() const { return scaled(Rat(-1)); }
    Poly pow(unsigned e) const;

    // expansion into a windowed series (exact; polynomials are known everywhere)
    HSeries expand(const Window& w) const;

    std::optional<std::pair<HKey, Rat>> leading() const;
    std::string str() const;

private:
    std::vector<int> vars_;
    std::map<HKey, Rat> t_;
    void put(const HKey& k, const Rat& c);
};

// (big - small + c*hbar)^e; for e < 0 the iota-expansion direction is
// "big variable large". small = -1 encodes a single-variable factor
// (big + c*hbar)^e.
struct LinFactor {
    int big = 0;
    int small = -1;
    Rat c = 0;
    int e = 1;

    bool same_base(const LinFactor& o) const { return big == o.big && small == o.small && c == o.c; }
    Poly poly(const std::vector<int>& vars) const;
    std::string str() const;
};

// Symbolic rational kernel: coef * hbar^hpow * num * prod factors^{e_i},
// with negative-exponent factors iota-expanded in their declared direction.
class Kernel {
public:
    Rat coef = 1;
    int hpow = 0;
    Poly num;                     // polynomial numerator (default 1)
    std::vector<LinFactor> den;   // all linear factors, any exponent sign

    Kernel() = default;
    static Kernel one(std::vector<int> vars);
    static Kernel scalar(std::vector<int> vars, const Rat& c, int hpow = 0);
    static Kernel factor(std::vector<int> vars, int big, int small, const Rat& c, int e);

    const std::vector<int>& vars() const { return num.vars(); }
    bool is_zero() const { return coef == 0 || num.is_zero(); }

    Kernel mul(const Kernel& o) const;
    Kernel mul_factor(int big, int small, const Rat& c, int e) const;
    Kernel scaled(const Rat& c, int dh = 0) const;
    // multiplicative inverse; numerator must be a monomial
    Kernel inverse() const;
    Kernel with_vars(const std::vector<int>& all_vars) const;
    // substitute v -> v + c*hbar in every factor and the numerator
    Kernel shifted(int v, const Rat& c) const;
    // rename variable (v_from must not collide with an existing factor pair)
    Kernel renamed(int v_from, int v_to) const;
    // diagonal substitution v_from -> v_to, performed symbolically: factors
    // in the pair collapse to hbar scalars (pole on the diagonal throws)
    Kernel subst_equal(int v_from, int v_to) const;

    // iota-expansion on a window; exact
    HSeries expand(const Window& w) const;

    void normalize();             // merge equal factors, drop e = 0
    std::string str() const;      // canonical (used as cache key)

private:
    HSeries expand_factor(const LinFactor& f, const Window& w) const;
};

// Linear combination of kernels (a "kernel combination" in identity checks).
using KernelSum = std::vector<Kernel>;

struct IdentityWitness {
    HKey key;
    Rat coeff;
    std::string monomial;
};

// Clears denominators and checks that lhs - rhs is identically zero as a
// rational function; exact, no truncation. On failure returns a nonzero
// monomial of the cross-multiplied difference.
std::optional<IdentityWitness> rational_identity_residual(const KernelSum& lhs, const KernelSum& rhs);
inline bool rational_identity_check(const KernelSum& lhs, const KernelSum& rhs) {
    return !rational_identity_residual(lhs, rhs).has_value();
}

// Expansion cache hook (see cache.hpp); expand() consults it when installed.
using KernelExpandFn = std::function<HSeries(const Kernel&, const Window&)>;
void set_kernel_cache(std::function<std::optional<HSeries>(const std::string&)> get,
                      std::function<void(const std::string&, const HSeries&)> put);
void clear_kernel_cache_hooks();
std::string kernel_cache_key(const Kernel& k, const Window& w);

} // namespace hadic

#endif
