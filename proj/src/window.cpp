#include "hadic/window.hpp"

#include <cassert>
#include <functional>
#include <mutex>

namespace hadic {

namespace {
std::mutex g_vars_mx;
std::vector<std::string>& var_table() {
    static std::vector<std::string> t;
    return t;
}

int clip(int d) { return std::max(-kDegCap - 1, std::min(kDegCap + 1, d)); }

// Longest interval of degrees satisfying `valid`, scanned over the capped
// range. All valid sets produced by the margin rules are intervals (the
// constraints are one-sided in d); the scan keeps the longest run anyway.
VarWin longest_run(const std::function<bool(int)>& valid) {
    int best_lo = 1, best_hi = 0, cur_lo = 0;
    bool in_run = false;
    for (int d = -kDegCap; d <= kDegCap; ++d) {
        if (valid(d)) {
            if (!in_run) cur_lo = d, in_run = true;
            if (in_run && (best_lo > best_hi || d - cur_lo > best_hi - best_lo)) {
                best_lo = cur_lo;
                best_hi = d;
            }
        } else {
            in_run = false;
        }
    }
    VarWin w;
    w.lo = best_lo;
    w.hi = best_hi;
    return w;
}

bool mul_valid_at(const VarWin& a, const VarWin& b, int d) {
    long long ilo = a.slo ? *a.slo : std::numeric_limits<long long>::min();
    long long ihi = a.shi ? *a.shi : std::numeric_limits<long long>::max();
    if (b.shi) ilo = std::max(ilo, (long long)d - *b.shi);
    if (b.slo) ihi = std::min(ihi, (long long)d - *b.slo);
    if (ilo > ihi) return true;  // no contributing split: exactly zero
    if (ilo == std::numeric_limits<long long>::min() || ihi == std::numeric_limits<long long>::max())
        return false;
    for (long long i = ilo; i <= ihi; ++i)
        if (!a.known((int)i) || !b.known((int)(d - i))) return false;
    return true;
}

VarWin add_var(const VarWin& a, const VarWin& b) {
    VarWin r = longest_run([&](int d) { return a.known(d) && b.known(d); });
    // cap at the hull of the operand bands: support-derived knowledge beyond
    // it stays available through slo/shi, but bands must not balloon to the
    // degree cap or truncation orders would run away
    r.lo = std::max(r.lo, std::min(a.lo, b.lo));
    r.hi = std::min(r.hi, std::max(a.hi, b.hi));
    if (a.slo && b.slo) r.slo = std::min(*a.slo, *b.slo);
    if (a.shi && b.shi) r.shi = std::max(*a.shi, *b.shi);
    return r;
}

VarWin mul_var(const VarWin& a, const VarWin& b) {
    VarWin r = longest_run([&](int d) { return mul_valid_at(a, b, d); });
    r.lo = std::max(r.lo, clip(a.lo + b.lo));
    r.hi = std::min(r.hi, clip(a.hi + b.hi));
    if (a.slo && b.slo) r.slo = clip(*a.slo + *b.slo);
    if (a.shi && b.shi) r.shi = clip(*a.shi + *b.shi);
    return r;
}

} // namespace

int Vars::id(const std::string& name) {
    std::lock_guard<std::mutex> lk(g_vars_mx);
    auto& t = var_table();
    for (size_t i = 0; i < t.size(); ++i)
        if (t[i] == name) return static_cast<int>(i);
    t.push_back(name);
    return static_cast<int>(t.size()) - 1;
}

const std::string& Vars::name(int id) {
    std::lock_guard<std::mutex> lk(g_vars_mx);
    return var_table().at(static_cast<size_t>(id));
}

Window win_add(const Window& a, const Window& b) {
    if (a.vars.size() != b.vars.size()) throw std::invalid_argument("win_add: variable sets differ");
    Window r;
    for (auto& [v, wa] : a.vars) r.vars[v] = add_var(wa, b.at(v));
    r.h = add_var(a.h, b.h);
    return r;
}

Window win_mul(const Window& a, const Window& b) {
    if (a.vars.size() != b.vars.size()) throw std::invalid_argument("win_mul: variable sets differ");
    Window r;
    for (auto& [v, wa] : a.vars) r.vars[v] = mul_var(wa, b.at(v));
    r.h = mul_var(a.h, b.h);
    return r;
}

Window win_derive(const Window& a, int v, int d) {
    Window r = a;
    VarWin& w = r.at(v);
    w.lo = clip(w.lo - d);
    w.hi = clip(w.hi - d);
    if (w.slo) w.slo = clip(*w.slo - d);
    if (w.shi) w.shi = clip(*w.shi - d);
    return r;
}

Window win_shift(const Window& a, int v) {
    int dmax = std::max(0, a.trunc_n() - 1 - *a.h.slo);
    return win_op_apply(a, v, 0, dmax);
}

Window win_op_apply(const Window& a, int v, int koff_min, int dmax) {
    Window r = a;
    r.h.lo = clip(a.h.lo + koff_min);
    r.h.hi = clip(a.h.hi + koff_min);
    r.h.slo = clip(*a.h.slo + koff_min);
    VarWin& w = r.at(v);
    // d-th derivative is exact on [lo-d, hi-d]; with an upper support bound
    // inside the band the top degrees lost to differentiation are known
    // zero, so the band survives.
    if (!(w.shi && *w.shi <= w.hi)) w.hi = clip(w.hi - dmax);
    if (w.slo) w.slo = clip(*w.slo - dmax);
    return r;
}

Window win_residue(const Window& a, int v) {
    Window r = a;
    if (!a.at(v).known(-1))
        throw std::invalid_argument("win_residue: degree -1 of " + Vars::name(v) + " not in window");
    r.vars.erase(v);
    return r;
}

Window win_subst(const Window& a, int v_from, int v_to) {
    Window r = a;
    VarWin merged = mul_var(a.at(v_from), a.at(v_to));
    r.vars.erase(v_from);
    r.at(v_to) = merged;
    return r;
}

Window win_intersect(const Window& a, const Window& b) {
    Window r;
    for (auto& [v, wa] : a.vars) {
        if (!b.has(v)) continue;
        VarWin w;
        w.lo = std::max(wa.lo, b.at(v).lo);
        w.hi = std::min(wa.hi, b.at(v).hi);
        r.vars[v] = w;
    }
    r.h.lo = std::max(a.h.lo, b.h.lo);
    r.h.hi = std::min(a.h.hi, b.h.hi);
    r.h.slo = std::min(*a.h.slo, *b.h.slo);
    return r;
}

Window box_window(const std::vector<int>& vars, int k, int n, int hlo) {
    Window w;
    for (int v : vars) w.vars[v] = VarWin::band(-k, k);
    w.h = VarWin::with_support(hlo, n - 1, hlo, std::nullopt);
    return w;
}

} // namespace hadic
