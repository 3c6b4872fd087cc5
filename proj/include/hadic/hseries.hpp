#ifndef HADIC_HSERIES_HPP
#define HADIC_HSERIES_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hadic/rational.hpp"
#include "hadic/window.hpp"

namespace hadic {

// One exponent slot per variable plus the hbar power.
struct HKey {
    int h = 0;
    std::vector<int> e;
    bool operator<(const HKey& o) const {
        if (h != o.h) return h < o.h;
        return e < o.e;
    }
    bool operator==(const HKey& o) const { return h == o.h && e == o.e; }
};

// Windowed, hbar-truncated multivariate Laurent series over exact rationals.
//
// The coefficient table stores only keys inside the window, never zeros.
// Equality of two series is defined on the intersection of their windows.
// Every operation returns a series exact on the window computed by the
// margin rules in window.hpp; an operation that cannot guarantee a nonempty
// window throws.
class HSeries {
public:
    HSeries() = default;
    HSeries(std::vector<int> vars, Window win);

    static HSeries zero(std::vector<int> vars, Window win);
    // Polynomial-style monomial: support hull recorded per variable.
    static HSeries monomial(const std::vector<int>& vars, const Rat& c, int hpow,
                            const std::vector<int>& exps, int n_trunc);
    static HSeries constant(const std::vector<int>& vars, const Rat& c, int n_trunc);

    const std::vector<int>& vars() const { return vars_; }
    const Window& window() const { return win_; }
    const std::map<HKey, Rat>& terms() const { return c_; }
    bool is_zero() const { return c_.empty(); }

    int var_index(int v) const;  // position of variable id in vars_

    Rat coeff(int hpow, const std::vector<int>& exps) const;

    // --- arithmetic; windows per the margin rules --------------------------
    HSeries add(const HSeries& o) const;
    HSeries sub(const HSeries& o) const;
    HSeries mul(const HSeries& o) const;
    HSeries scaled(const Rat& c) const;
    HSeries neg() const { return scaled(Rat(-1)); }
    // multiply by c * hbar^k * v^d monomials without window loss beyond shifts
    HSeries mul_monomial(const Rat& c, int hpow, const std::vector<int>& exps) const;

    HSeries derive(int v, int times = 1) const;
    // v -> v + c*hbar
    HSeries shift(int v, const Rat& c) const;
    // coefficient series of v^{-1} (v removed)
    HSeries residue(int v) const;
    // strictly negative / nonnegative degree part in v
    HSeries sing_part(int v) const;
    HSeries reg_part(int v) const;
    // replace v_from by v_to (exponents merged, v_from removed)
    HSeries substitute_equal(int v_from, int v_to) const;
    // drop v (requires the series constant in v); keeps window of the rest
    HSeries drop_var(int v) const;
    // extend the variable set (new vars constant, known everywhere)
    HSeries with_vars(const std::vector<int>& all_vars) const;

    // truncated log(1+f) and exp(f); f topologically nilpotent (hbar floor >= 1)
    HSeries log1p() const;
    HSeries exp0() const;

    // restrict to a smaller window (keys outside dropped)
    HSeries restricted(Window w) const;

    // v := value * hbar (hbar-multiple substitution); v removed.
    HSeries eval_var_hbar(int v, const Rat& value) const;

    // set hbar-floor knowledge: series is known to have no orders below k
    HSeries with_h_floor(int k) const;

    // first nonzero (h, key) difference on the window intersection
    struct Diff {
        HKey key;
        Rat lhs, rhs;
    };
    std::optional<Diff> diff_on(const HSeries& o) const;
    bool eq_on(const HSeries& o) const { return !diff_on(o).has_value(); }

    std::string str() const;
    std::string json() const;  // serialization per the report schema

    // adds into the table; zeros pruned, keys outside the window dropped
    void put(const HKey& k, const Rat& v);

private:
    std::vector<int> vars_;
    Window win_;
    std::map<HKey, Rat> c_;

    bool key_in_window(const HKey& k) const;
    friend HSeries delta_series(int num, int den, int d, const Window& w,
                                const std::vector<int>& vars);
};

// Truncation of (1/d!) (d/d num)^d delta(num/den) to w: the two-variable
// formal delta sum over the window, with no support bounds.
HSeries delta_series(int num, int den, int d, const Window& w, const std::vector<int>& vars);

} // namespace hadic

#endif
