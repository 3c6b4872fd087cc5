#ifndef HADIC_WINDOW_HPP
#define HADIC_WINDOW_HPP

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hadic {

// Interned formal-variable names. Ids are stable within a process and never
// reach a report, so allocation order cannot affect output determinism.
class Vars {
public:
    static int id(const std::string& name);
    static const std::string& name(int id);
};

// Hard cap on degrees the engine will ever reason about; window scans and
// "effectively unbounded" knowledge intervals are clipped here.
inline constexpr int kDegCap = 64;

// Knowledge and support data for one variable of a windowed series.
//
//   [lo, hi]  : degrees where stored coefficients equal the true object
//   slo / shi : optional bounds on the *true* support (true coefficients
//               vanish below slo / above shi), supplied by constructors
//               that know them and propagated by the margin rules.
//
// A degree is "known" if it lies in the band or is provably zero from a
// support bound. Empty band is encoded lo > hi.
struct VarWin {
    int lo = 0;
    int hi = -1;
    std::optional<int> slo;
    std::optional<int> shi;

    bool empty() const { return lo > hi; }
    bool known(int d) const {
        if (lo <= d && d <= hi) return true;
        if (slo && d < *slo) return true;
        if (shi && d > *shi) return true;
        return false;
    }
    bool in_support(int d) const {
        if (slo && d < *slo) return false;
        if (shi && d > *shi) return false;
        return true;
    }
    static VarWin band(int lo, int hi) {
        VarWin w;
        w.lo = lo;
        w.hi = hi;
        return w;
    }
    static VarWin with_support(int lo, int hi, std::optional<int> slo, std::optional<int> shi) {
        VarWin w;
        w.lo = lo;
        w.hi = hi;
        w.slo = slo;
        w.shi = shi;
        return w;
    }
    // Finite known support: everything outside [slo, shi] is known zero.
    static VarWin exact(int slo, int shi) { return with_support(-kDegCap, kDegCap, slo, shi); }
    bool operator==(const VarWin& o) const {
        return lo == o.lo && hi == o.hi && slo == o.slo && shi == o.shi;
    }
};

// Window of an HSeries: one band per variable plus the hbar band.
// Invariant: h.slo is always present (hbar-Laurent floor) -- every series in
// the calculus has hbar-order bounded below.
struct Window {
    std::map<int, VarWin> vars;
    VarWin h = VarWin::with_support(0, 0, 0, std::nullopt);

    // truncation order N: knowledge is h-orders [h.lo, N)
    int trunc_n() const { return h.hi + 1; }

    bool empty() const {
        if (h.empty()) return true;
        for (auto& [v, b] : vars)
            if (b.empty()) return true;
        return false;
    }
    VarWin& at(int v) {
        auto it = vars.find(v);
        if (it == vars.end()) throw std::out_of_range("Window: unknown variable " + Vars::name(v));
        return it->second;
    }
    const VarWin& at(int v) const {
        auto it = vars.find(v);
        if (it == vars.end()) throw std::out_of_range("Window: unknown variable " + Vars::name(v));
        return it->second;
    }
    bool has(int v) const { return vars.count(v) != 0; }
    bool operator==(const Window& o) const { return vars == o.vars && h == o.h; }
};

// ---- margin algebra -------------------------------------------------------

Window win_add(const Window& a, const Window& b);
Window win_mul(const Window& a, const Window& b);
Window win_derive(const Window& a, int v, int d = 1);
// v -> v + c*hbar; uses derivatives up to dmax = N-1-h.slo internally.
Window win_shift(const Window& a, int v);
// operator series in derivative of v with hbar offsets >= koff_min and
// derivative degree <= dmax.
Window win_op_apply(const Window& a, int v, int koff_min, int dmax);
Window win_residue(const Window& a, int v);
// merge v_from into v_to (delta-function substitution)
Window win_subst(const Window& a, int v_from, int v_to);
// plain band intersection, for equality tests
Window win_intersect(const Window& a, const Window& b);

// Symmetric box: all vars banded [-k, k], hbar known on [hlo, n).
Window box_window(const std::vector<int>& vars, int k, int n, int hlo = 0);

} // namespace hadic

#endif
