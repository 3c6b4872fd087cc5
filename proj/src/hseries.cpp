#include "hadic/hseries.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace hadic {

namespace {
std::vector<int> union_vars(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> r = a;
    for (int v : b)
        if (std::find(r.begin(), r.end(), v) == r.end()) r.push_back(v);
    std::sort(r.begin(), r.end());
    return r;
}
} // namespace

HSeries::HSeries(std::vector<int> vars, Window win) : vars_(std::move(vars)), win_(std::move(win)) {
    std::sort(vars_.begin(), vars_.end());
    for (int v : vars_)
        if (!win_.has(v)) throw std::invalid_argument("HSeries: window missing variable " + Vars::name(v));
}

HSeries HSeries::zero(std::vector<int> vars, Window win) { return HSeries(std::move(vars), std::move(win)); }

HSeries HSeries::monomial(const std::vector<int>& vars, const Rat& c, int hpow,
                          const std::vector<int>& exps, int n_trunc) {
    if (exps.size() != vars.size()) throw std::invalid_argument("monomial: exponent arity");
    std::vector<int> sv = vars;
    std::sort(sv.begin(), sv.end());
    Window w;
    std::vector<int> se(sv.size(), 0);
    for (size_t i = 0; i < vars.size(); ++i) {
        size_t pos = static_cast<size_t>(std::find(sv.begin(), sv.end(), vars[i]) - sv.begin());
        se[pos] = exps[i];
    }
    for (size_t i = 0; i < sv.size(); ++i) w.vars[sv[i]] = VarWin::exact(se[i], se[i]);
    w.h = VarWin::with_support(hpow, std::max(hpow, n_trunc - 1), hpow, hpow);
    HSeries s(sv, w);
    HKey k;
    k.h = hpow;
    k.e = se;
    s.put(k, c);
    return s;
}

HSeries HSeries::constant(const std::vector<int>& vars, const Rat& c, int n_trunc) {
    std::vector<int> exps(vars.size(), 0);
    return monomial(vars, c, 0, exps, n_trunc);
}

int HSeries::var_index(int v) const {
    auto it = std::find(vars_.begin(), vars_.end(), v);
    if (it == vars_.end()) throw std::out_of_range("HSeries: unknown variable " + Vars::name(v));
    return static_cast<int>(it - vars_.begin());
}

Rat HSeries::coeff(int hpow, const std::vector<int>& exps) const {
    HKey k;
    k.h = hpow;
    k.e = exps;
    auto it = c_.find(k);
    return it == c_.end() ? Rat(0) : it->second;
}

bool HSeries::key_in_window(const HKey& k) const {
    if (k.h < win_.h.lo || k.h > win_.h.hi) return false;
    for (size_t i = 0; i < vars_.size(); ++i) {
        const VarWin& b = win_.at(vars_[i]);
        if (k.e[i] < b.lo || k.e[i] > b.hi) return false;
    }
    return true;
}

void HSeries::put(const HKey& k, const Rat& v) {
    if (v == 0) return;
    if (!key_in_window(k)) return;
    auto it = c_.find(k);
    if (it == c_.end()) {
        c_.emplace(k, v);
    } else {
        it->second += v;
        if (it->second == 0) c_.erase(it);
    }
}

HSeries HSeries::with_vars(const std::vector<int>& all_vars) const {
    std::vector<int> sv = all_vars;
    std::sort(sv.begin(), sv.end());
    for (int v : vars_)
        if (std::find(sv.begin(), sv.end(), v) == sv.end())
            throw std::invalid_argument("with_vars: must be a superset");
    Window w;
    w.h = win_.h;
    for (int v : sv)
        w.vars[v] = win_.has(v) ? win_.at(v) : VarWin::exact(0, 0);
    HSeries r(sv, w);
    for (auto& [k, c] : c_) {
        HKey nk;
        nk.h = k.h;
        nk.e.assign(sv.size(), 0);
        for (size_t i = 0; i < vars_.size(); ++i) {
            size_t pos = static_cast<size_t>(std::find(sv.begin(), sv.end(), vars_[i]) - sv.begin());
            nk.e[pos] = k.e[i];
        }
        r.put(nk, c);
    }
    return r;
}

HSeries HSeries::add(const HSeries& o) const {
    if (vars_ != o.vars_) {
        auto uv = union_vars(vars_, o.vars_);
        return with_vars(uv).add(o.with_vars(uv));
    }
    HSeries r(vars_, win_add(win_, o.win_));
    if (r.win_.empty()) throw std::invalid_argument("add: empty result window");
    for (auto& [k, c] : c_) r.put(k, c);
    for (auto& [k, c] : o.c_) r.put(k, c);
    return r;
}

HSeries HSeries::sub(const HSeries& o) const { return add(o.neg()); }

HSeries HSeries::scaled(const Rat& c) const {
    HSeries r(vars_, win_);
    if (c == 0) return r;
    for (auto& [k, v] : c_) r.c_.emplace(k, v * c);
    return r;
}

HSeries HSeries::mul(const HSeries& o) const {
    if (vars_ != o.vars_) {
        auto uv = union_vars(vars_, o.vars_);
        return with_vars(uv).mul(o.with_vars(uv));
    }
    HSeries r(vars_, win_mul(win_, o.win_));
    if (r.win_.empty()) throw std::invalid_argument("mul: empty result window");
    for (auto& [ka, ca] : c_) {
        for (auto& [kb, cb] : o.c_) {
            HKey k;
            k.h = ka.h + kb.h;
            if (k.h > r.win_.h.hi) continue;
            k.e.resize(vars_.size());
            for (size_t i = 0; i < vars_.size(); ++i) k.e[i] = ka.e[i] + kb.e[i];
            r.put(k, ca * cb);
        }
    }
    return r;
}

HSeries HSeries::mul_monomial(const Rat& c, int hpow, const std::vector<int>& exps) const {
    if (exps.size() != vars_.size()) throw std::invalid_argument("mul_monomial: exponent arity");
    Window w = win_;
    w.h.lo += hpow;
    w.h.hi += hpow;
    w.h.slo = *w.h.slo + hpow;
    if (w.h.shi) w.h.shi = *w.h.shi + hpow;
    for (size_t i = 0; i < vars_.size(); ++i) {
        VarWin& b = w.at(vars_[i]);
        b.lo += exps[i];
        b.hi += exps[i];
        if (b.slo) b.slo = *b.slo + exps[i];
        if (b.shi) b.shi = *b.shi + exps[i];
    }
    HSeries r(vars_, w);
    if (c == 0) return r;
    for (auto& [k, v] : c_) {
        HKey nk;
        nk.h = k.h + hpow;
        nk.e.resize(vars_.size());
        for (size_t i = 0; i < vars_.size(); ++i) nk.e[i] = k.e[i] + exps[i];
        r.put(nk, v * c);
    }
    return r;
}

HSeries HSeries::derive(int v, int times) const {
    int vi = var_index(v);
    HSeries r(vars_, win_derive(win_, v, times));
    for (auto& [k, c] : c_) {
        Rat nc = c;
        int d = k.e[vi];
        bool dead = false;
        for (int t = 0; t < times; ++t) {
            if (d == 0) {
                dead = true;
                break;
            }
            nc *= d;
            d -= 1;
        }
        if (dead || nc == 0) continue;
        HKey nk = k;
        nk.e[vi] = d;
        r.put(nk, nc);
    }
    return r;
}

HSeries HSeries::shift(int v, const Rat& c) const {
    if (c == 0) return *this;
    int vi = var_index(v);
    HSeries r(vars_, win_shift(win_, v));
    int n_out = r.win_.trunc_n();
    for (auto& [k, co] : c_) {
        int d = k.e[vi];
        Rat ck = co;  // co * binom(d, j) * c^j accumulated
        for (int j = 0; k.h + j < n_out; ++j) {
            if (j > 0) {
                ck *= Rat(d - (j - 1));
                ck /= Rat(j);
                ck *= c;
                if (ck == 0) break;  // d >= 0 exhausted
            }
            HKey nk = k;
            nk.h = k.h + j;
            nk.e[vi] = d - j;
            r.put(nk, ck);
        }
    }
    return r;
}

HSeries HSeries::residue(int v) const {
    int vi = var_index(v);
    Window w = win_residue(win_, v);
    std::vector<int> nv = vars_;
    nv.erase(nv.begin() + vi);
    HSeries r(nv, w);
    for (auto& [k, c] : c_) {
        if (k.e[vi] != -1) continue;
        HKey nk;
        nk.h = k.h;
        nk.e = k.e;
        nk.e.erase(nk.e.begin() + vi);
        r.put(nk, c);
    }
    return r;
}

HSeries HSeries::sing_part(int v) const {
    int vi = var_index(v);
    Window w = win_;
    VarWin& b = w.at(v);
    b.hi = std::min(b.hi, -1);
    b.shi = b.shi ? std::min(*b.shi, -1) : -1;
    HSeries r(vars_, w);
    for (auto& [k, c] : c_)
        if (k.e[vi] < 0) r.put(k, c);
    return r;
}

HSeries HSeries::reg_part(int v) const {
    int vi = var_index(v);
    Window w = win_;
    VarWin& b = w.at(v);
    b.lo = std::max(b.lo, 0);
    b.slo = b.slo ? std::max(*b.slo, 0) : 0;
    HSeries r(vars_, w);
    for (auto& [k, c] : c_)
        if (k.e[vi] >= 0) r.put(k, c);
    return r;
}

HSeries HSeries::substitute_equal(int v_from, int v_to) const {
    int fi = var_index(v_from);
    int ti = var_index(v_to);
    Window w = win_subst(win_, v_from, v_to);
    if (w.empty()) throw std::invalid_argument("substitute_equal: empty result window");
    std::vector<int> nv = vars_;
    nv.erase(nv.begin() + fi);
    HSeries r(nv, w);
    for (auto& [k, c] : c_) {
        HKey nk;
        nk.h = k.h;
        nk.e = k.e;
        int merged = k.e[fi] + k.e[ti];
        nk.e.erase(nk.e.begin() + fi);
        int nti = ti > fi ? ti - 1 : ti;
        nk.e[nti] = merged;
        r.put(nk, c);
    }
    return r;
}

HSeries HSeries::drop_var(int v) const {
    int vi = var_index(v);
    for (auto& [k, c] : c_)
        if (k.e[vi] != 0) throw std::invalid_argument("drop_var: series depends on " + Vars::name(v));
    Window w = win_;
    w.vars.erase(v);
    std::vector<int> nv = vars_;
    nv.erase(nv.begin() + vi);
    HSeries r(nv, w);
    for (auto& [k, c] : c_) {
        HKey nk;
        nk.h = k.h;
        nk.e = k.e;
        nk.e.erase(nk.e.begin() + vi);
        r.put(nk, c);
    }
    return r;
}

HSeries HSeries::log1p() const {
    if (*win_.h.slo < 1)
        throw std::invalid_argument("log1p: series not topologically nilpotent (hbar floor < 1)");
    if (is_zero()) return *this;
    int n = win_.trunc_n();
    HSeries acc = *this;
    HSeries p = *this;
    for (int k = 2; k < n; ++k) {  // f^k has hbar floor >= k
        p = p.mul(*this);
        acc = acc.add(p.scaled(Rat((k % 2 == 0) ? -1 : 1) / Rat(k)));
    }
    return acc;
}

HSeries HSeries::exp0() const {
    if (*win_.h.slo < 1)
        throw std::invalid_argument("exp0: series not topologically nilpotent (hbar floor < 1)");
    int n = win_.trunc_n();
    HSeries one = HSeries::constant(std::vector<int>(vars_.begin(), vars_.end()), Rat(1), n);
    if (is_zero()) {
        // exp of a window-zero series: 1 at order 0, zero up to the window's
        // truncation; nothing claimable beyond the input's bands.
        Window w = win_;
        w.h.lo = std::min(w.h.lo, 0);
        w.h.slo = 0;
        return one.restricted(w);
    }
    HSeries acc = one.add(*this);
    HSeries p = *this;
    Rat fact = 1;
    for (int k = 2; k < n && !p.window().empty(); ++k) {
        p = p.mul(*this);
        fact *= k;
        acc = acc.add(p.scaled(Rat(1) / fact));
    }
    return acc;
}

HSeries HSeries::restricted(Window w) const {
    HSeries r(vars_, std::move(w));
    for (auto& [k, c] : c_) r.put(k, c);
    return r;
}

HSeries HSeries::eval_var_hbar(int v, const Rat& value) const {
    int vi = var_index(v);
    Window w = win_;
    VarWin vb = w.at(v);
    w.vars.erase(v);
    // exponent of v turns into hbar power; convolve the bands
    VarWin hb;
    {
        // reuse multiplication margin logic through win_mul on a makeshift pair
        Window wa, wb;
        int tmp = Vars::id("__conv");
        wa.vars[tmp] = win_.h;
        wa.h = VarWin::with_support(0, kDegCap, 0, 0);
        wb.vars[tmp] = vb;
        wb.h = wa.h;
        hb = win_mul(wa, wb).at(tmp);
    }
    if (!hb.slo) throw std::invalid_argument("eval_var_hbar: no hbar floor derivable");
    w.h = hb;
    std::vector<int> nv = vars_;
    nv.erase(nv.begin() + vi);
    HSeries r(nv, w);
    for (auto& [k, c] : c_) {
        int d = k.e[vi];
        if (value == 0 && d < 0) throw std::invalid_argument("eval_var_hbar: negative power at 0");
        Rat scale = 1;
        if (d >= 0) {
            scale = pow_rat(value, static_cast<unsigned>(d));
        } else {
            if (value == 0) throw std::invalid_argument("eval_var_hbar: negative power at 0");
            scale = 1 / pow_rat(value, static_cast<unsigned>(-d));
        }
        HKey nk;
        nk.h = k.h + d;
        nk.e = k.e;
        nk.e.erase(nk.e.begin() + vi);
        r.put(nk, c * scale);
    }
    return r;
}

HSeries HSeries::with_h_floor(int k) const {
    Window w = win_;
    w.h.slo = std::max(*w.h.slo, k);
    w.h.lo = std::min(w.h.lo, k);
    HSeries r(vars_, w);
    for (auto& [key, c] : c_) {
        if (key.h < k && c != 0)
            throw std::invalid_argument("with_h_floor: nonzero coefficient below claimed floor");
        r.put(key, c);
    }
    return r;
}

std::optional<HSeries::Diff> HSeries::diff_on(const HSeries& o) const {
    if (vars_ != o.vars_) {
        auto uv = union_vars(vars_, o.vars_);
        return with_vars(uv).diff_on(o.with_vars(uv));
    }
    Window w = win_intersect(win_, o.win_);
    auto inside = [&](const HKey& k) {
        if (k.h < w.h.lo || k.h > w.h.hi) return false;
        for (size_t i = 0; i < vars_.size(); ++i) {
            const VarWin& b = w.at(vars_[i]);
            if (k.e[i] < b.lo || k.e[i] > b.hi) return false;
        }
        return true;
    };
    for (auto& [k, c] : c_) {
        if (!inside(k)) continue;
        if (o.coeff(k.h, k.e) != c) return Diff{k, c, o.coeff(k.h, k.e)};
    }
    for (auto& [k, c] : o.c_) {
        if (!inside(k)) continue;
        if (coeff(k.h, k.e) != c) return Diff{k, coeff(k.h, k.e), c};
    }
    return std::nullopt;
}

std::string HSeries::str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [k, c] : c_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << rat_str(c) << ")";
        if (k.h != 0) os << "*hb^" << k.h;
        for (size_t i = 0; i < vars_.size(); ++i)
            if (k.e[i] != 0) os << "*" << Vars::name(vars_[i]) << "^" << k.e[i];
    }
    return os.str();
}

std::string HSeries::json() const {
    std::ostringstream os;
    os << "{\"vars\":[";
    for (size_t i = 0; i < vars_.size(); ++i)
        os << (i ? "," : "") << "\"" << Vars::name(vars_[i]) << "\"";
    os << "],\"hmin\":" << win_.h.lo << ",\"hmax\":" << win_.h.hi << ",\"window\":{";
    bool first = true;
    for (int v : vars_) {
        const VarWin& b = win_.at(v);
        os << (first ? "" : ",") << "\"" << Vars::name(v) << "\":[" << b.lo << "," << b.hi << "]";
        first = false;
    }
    os << "},\"terms\":[";
    first = true;
    for (auto& [k, c] : c_) {
        os << (first ? "" : ",") << "[" << k.h << ",[";
        for (size_t i = 0; i < k.e.size(); ++i) os << (i ? "," : "") << k.e[i];
        os << "],\"" << rat_str(c) << "\"]";
        first = false;
    }
    os << "]}";
    return os.str();
}

HSeries delta_series(int num, int den, int d, const Window& w, const std::vector<int>& vars) {
    // (1/d!) * (d/d num)^d of sum_n num^n den^{-n-1}, truncated to w.
    Window dw = w;
    dw.h.slo = 0;
    dw.h.shi = 0;  // purely classical object
    for (auto& [v, b] : dw.vars) {
        if (v == num || v == den) {
            b.slo.reset();
            b.shi.reset();  // unbounded support both ways
        } else {
            b.slo = 0;
            b.shi = 0;  // constant in spectator variables
        }
    }
    HSeries s(vars, dw);
    int ni = s.var_index(num);
    int di = s.var_index(den);
    const VarWin& nb = dw.at(num);
    const VarWin& db = dw.at(den);
    if (dw.h.lo > 0 || dw.h.hi < 0) return s;
    for (int n = nb.lo + d; n <= nb.hi + d; ++n) {
        int ne = n - d;          // exponent of num after d derivatives
        int de = -n - 1;         // exponent of den
        if (ne < nb.lo || ne > nb.hi) continue;
        if (de < db.lo || de > db.hi) continue;
        // n(n-1)...(n-d+1)/d!
        Rat c = binomial(n, static_cast<unsigned>(d));
        if (c == 0) continue;
        HKey k;
        k.h = 0;
        k.e.assign(vars.size(), 0);
        k.e[static_cast<size_t>(ni)] = ne;
        k.e[static_cast<size_t>(di)] = de;
        s.put(k, c);
    }
    return s;
}

} // namespace hadic
