#include "hadic/kernels.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

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

Poly::Poly(std::vector<int> vars) : vars_(std::move(vars)) { std::sort(vars_.begin(), vars_.end()); }

void Poly::put(const HKey& k, const Rat& c) {
    if (c == 0) return;
    auto it = t_.find(k);
    if (it == t_.end()) {
        t_.emplace(k, c);
    } else {
        it->second += c;
        if (it->second == 0) t_.erase(it);
    }
}

Poly Poly::constant(std::vector<int> vars, const Rat& c) {
    Poly p(std::move(vars));
    HKey k;
    k.e.assign(p.vars_.size(), 0);
    p.put(k, c);
    return p;
}

Poly Poly::monomial(std::vector<int> vars, const Rat& c, int hpow, const std::vector<int>& exps) {
    if (vars.size() != exps.size()) throw std::invalid_argument("Poly::monomial: arity");
    Poly p(vars);
    HKey k;
    k.h = hpow;
    k.e.assign(p.vars_.size(), 0);
    for (size_t i = 0; i < vars.size(); ++i) {
        size_t pos = static_cast<size_t>(std::find(p.vars_.begin(), p.vars_.end(), vars[i]) - p.vars_.begin());
        k.e[pos] = exps[i];
    }
    p.put(k, c);
    return p;
}

Poly Poly::linear(std::vector<int> vars, int big, int small, const Rat& c) {
    Poly p(std::move(vars));
    auto idx = [&](int v) {
        auto it = std::find(p.vars_.begin(), p.vars_.end(), v);
        if (it == p.vars_.end()) throw std::invalid_argument("Poly::linear: unknown variable");
        return static_cast<size_t>(it - p.vars_.begin());
    };
    HKey k;
    k.e.assign(p.vars_.size(), 0);
    k.e[idx(big)] = 1;
    p.put(k, Rat(1));
    if (small >= 0) {
        HKey k2;
        k2.e.assign(p.vars_.size(), 0);
        k2.e[idx(small)] = 1;
        p.put(k2, Rat(-1));
    }
    if (c != 0) {
        HKey k3;
        k3.h = 1;
        k3.e.assign(p.vars_.size(), 0);
        p.put(k3, c);
    }
    return p;
}

Poly Poly::with_vars(const std::vector<int>& all_vars) const {
    std::vector<int> sv = all_vars;
    std::sort(sv.begin(), sv.end());
    Poly p(sv);
    for (auto& [k, c] : t_) {
        HKey nk;
        nk.h = k.h;
        nk.e.assign(sv.size(), 0);
        for (size_t i = 0; i < vars_.size(); ++i) {
            size_t pos = static_cast<size_t>(std::find(sv.begin(), sv.end(), vars_[i]) - sv.begin());
            nk.e[pos] = k.e[i];
        }
        p.put(nk, c);
    }
    return p;
}

Poly Poly::add(const Poly& o) const {
    if (vars_ != o.vars_) {
        auto uv = union_vars(vars_, o.vars_);
        return with_vars(uv).add(o.with_vars(uv));
    }
    Poly p = *this;
    for (auto& [k, c] : o.t_) p.put(k, c);
    return p;
}

Poly Poly::sub(const Poly& o) const { return add(o.neg()); }

Poly Poly::mul(const Poly& o) const {
    if (vars_ != o.vars_) {
        auto uv = union_vars(vars_, o.vars_);
        return with_vars(uv).mul(o.with_vars(uv));
    }
    Poly p(vars_);
    for (auto& [ka, ca] : t_)
        for (auto& [kb, cb] : o.t_) {
            HKey k;
            k.h = ka.h + kb.h;
            k.e.resize(vars_.size());
            for (size_t i = 0; i < vars_.size(); ++i) k.e[i] = ka.e[i] + kb.e[i];
            p.put(k, ca * cb);
        }
    return p;
}

Poly Poly::scaled(const Rat& c) const {
    Poly p(vars_);
    if (c == 0) return p;
    for (auto& [k, v] : t_) p.t_.emplace(k, v * c);
    return p;
}

Poly Poly::pow(unsigned e) const {
    Poly r = Poly::constant(vars_, Rat(1));
    for (unsigned i = 0; i < e; ++i) r = r.mul(*this);
    return r;
}

HSeries Poly::expand(const Window& w) const {
    HSeries s(vars_, w);
    // polynomials are known everywhere: record the support hull
    Window ws = w;
    std::vector<int> lo(vars_.size(), 0), hi(vars_.size(), 0);
    int hlo = 0, hhi = 0;
    bool first = true;
    for (auto& [k, c] : t_) {
        for (size_t i = 0; i < vars_.size(); ++i) {
            lo[i] = first ? k.e[i] : std::min(lo[i], k.e[i]);
            hi[i] = first ? k.e[i] : std::max(hi[i], k.e[i]);
        }
        hlo = first ? k.h : std::min(hlo, k.h);
        hhi = first ? k.h : std::max(hhi, k.h);
        first = false;
    }
    if (first) {
        hlo = 0;
        hhi = 0;
    }
    for (size_t i = 0; i < vars_.size(); ++i) {
        VarWin& b = ws.at(vars_[i]);
        b.slo = first ? 0 : lo[i];
        b.shi = first ? 0 : hi[i];
        // a polynomial is known everywhere; the band must cover its support
        b.lo = std::min(b.lo, *b.slo);
        b.hi = std::max(b.hi, *b.shi);
    }
    ws.h.slo = hlo;
    ws.h.shi = hhi;
    ws.h.lo = std::min(ws.h.lo, hlo);
    ws.h.hi = std::max(ws.h.hi, hhi);
    HSeries r(vars_, ws);
    for (auto& [k, c] : t_) r.put(k, c);
    return r;
}

std::optional<std::pair<HKey, Rat>> Poly::leading() const {
    if (t_.empty()) return std::nullopt;
    return *t_.begin();
}

std::string Poly::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [k, c] : t_) {
        if (!first) os << "+";
        first = false;
        os << "(" << rat_str(c) << ")";
        if (k.h) os << "hb^" << k.h;
        for (size_t i = 0; i < vars_.size(); ++i)
            if (k.e[i]) os << Vars::name(vars_[i]) << "^" << k.e[i];
    }
    return os.str();
}

Poly LinFactor::poly(const std::vector<int>& vars) const { return Poly::linear(vars, big, small, c); }

std::string LinFactor::str() const {
    std::ostringstream os;
    os << "(" << Vars::name(big);
    if (small >= 0) os << "-" << Vars::name(small);
    if (c != 0) os << (c > 0 ? "+" : "") << rat_str(c) << "hb";
    os << ")^" << e;
    return os.str();
}

Kernel Kernel::one(std::vector<int> vars) {
    Kernel k;
    k.num = Poly::constant(std::move(vars), Rat(1));
    return k;
}

Kernel Kernel::scalar(std::vector<int> vars, const Rat& c, int hpow) {
    Kernel k = one(std::move(vars));
    k.coef = c;
    k.hpow = hpow;
    return k;
}

Kernel Kernel::factor(std::vector<int> vars, int big, int small, const Rat& c, int e) {
    Kernel k = one(std::move(vars));
    k.den.push_back(LinFactor{big, small, c, e});
    k.normalize();
    return k;
}

void Kernel::normalize() {
    std::vector<LinFactor> merged;
    for (auto& f : den) {
        bool found = false;
        for (auto& g : merged)
            if (g.same_base(f)) {
                g.e += f.e;
                found = true;
                break;
            }
        if (!found) merged.push_back(f);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const LinFactor& f) { return f.e == 0; }),
                 merged.end());
    std::sort(merged.begin(), merged.end(), [](const LinFactor& a, const LinFactor& b) {
        if (a.big != b.big) return a.big < b.big;
        if (a.small != b.small) return a.small < b.small;
        if (a.c != b.c) return a.c < b.c;
        return a.e < b.e;
    });
    den = std::move(merged);
}

Kernel Kernel::mul(const Kernel& o) const {
    Kernel r;
    r.coef = coef * o.coef;
    r.hpow = hpow + o.hpow;
    r.num = num.mul(o.num);
    r.den = den;
    for (auto& f : o.den) r.den.push_back(f);
    r.normalize();
    return r;
}

Kernel Kernel::mul_factor(int big, int small, const Rat& c, int e) const {
    Kernel r = *this;
    r.den.push_back(LinFactor{big, small, c, e});
    r.normalize();
    return r;
}

Kernel Kernel::scaled(const Rat& c, int dh) const {
    Kernel r = *this;
    r.coef *= c;
    r.hpow += dh;
    return r;
}

Kernel Kernel::inverse() const {
    Kernel r;
    auto lead = num.leading();
    if (!lead || num.terms().size() != 1)
        throw std::invalid_argument("Kernel::inverse: numerator not a monomial");
    auto [k, c] = *lead;
    for (int e : k.e)
        if (e != 0) throw std::invalid_argument("Kernel::inverse: numerator has variable content");
    r.coef = 1 / (coef * c);
    r.hpow = -hpow - k.h;
    r.num = Poly::constant(num.vars(), Rat(1));
    r.den = den;
    for (auto& f : r.den) f.e = -f.e;
    r.normalize();
    return r;
}

Kernel Kernel::with_vars(const std::vector<int>& all_vars) const {
    Kernel r = *this;
    r.num = num.with_vars(all_vars);
    return r;
}

Kernel Kernel::shifted(int v, const Rat& sc) const {
    if (sc == 0) return *this;
    Kernel r = *this;
    for (auto& f : r.den) {
        if (f.big == v) f.c += sc;
        if (f.small == v) f.c -= sc;
    }
    // numerator: substitute v -> v + sc*hbar exactly
    Poly np(num.vars());
    const auto& vs = num.vars();
    size_t vi = static_cast<size_t>(std::find(vs.begin(), vs.end(), v) - vs.begin());
    if (vi == vs.size()) {
        r.normalize();
        return r;
    }
    Poly acc(vs);
    for (auto& [k, c] : num.terms()) {
        int d = k.e[vi];
        if (d < 0) throw std::invalid_argument("Kernel::shifted: negative exponent in numerator");
        for (int j = 0; j <= d; ++j) {
            HKey nk = k;
            nk.h = k.h + j;
            nk.e[vi] = d - j;
            acc = acc.add(Poly::monomial(vs, c * binomial(d, static_cast<unsigned>(j)) * pow_rat(sc, static_cast<unsigned>(j)),
                                         nk.h, nk.e));
        }
    }
    r.num = acc;
    r.normalize();
    return r;
}

Kernel Kernel::renamed(int v_from, int v_to) const {
    Kernel r = *this;
    for (auto& f : r.den) {
        if (f.big == v_from) f.big = v_to;
        if (f.small == v_from) f.small = v_to;
    }
    const auto& vs = num.vars();
    if (std::find(vs.begin(), vs.end(), v_from) != vs.end()) {
        std::vector<int> nv;
        for (int v : vs) nv.push_back(v == v_from ? v_to : v);
        std::sort(nv.begin(), nv.end());
        nv.erase(std::unique(nv.begin(), nv.end()), nv.end());
        Poly np(nv);
        size_t fi = static_cast<size_t>(std::find(vs.begin(), vs.end(), v_from) - vs.begin());
        for (auto& [k, c] : num.terms()) {
            std::vector<int> exps(nv.size(), 0);
            for (size_t i = 0; i < vs.size(); ++i) {
                int tgt = vs[i] == v_from ? v_to : vs[i];
                size_t pos = static_cast<size_t>(std::find(nv.begin(), nv.end(), tgt) - nv.begin());
                exps[pos] += k.e[i];
            }
            (void)fi;
            np = np.add(Poly::monomial(nv, c, k.h, exps));
        }
        r.num = np;
    }
    r.normalize();
    return r;
}

Kernel Kernel::subst_equal(int v_from, int v_to) const {
    Kernel r = *this;
    std::vector<LinFactor> keep;
    for (auto& f : r.den) {
        bool pair = (f.big == v_from && f.small == v_to) || (f.big == v_to && f.small == v_from);
        if (!pair) {
            keep.push_back(f);
            continue;
        }
        // (big - small + c hbar) -> (+-c hbar)
        Rat c = f.big == v_from ? f.c : -f.c;
        if (c == 0) {
            if (f.e < 0) throw std::invalid_argument("subst_equal: pole on the diagonal " + f.str());
            r.coef = 0;  // factor vanishes identically
            r.num = Poly::constant(r.num.vars(), Rat(0));
            return r;
        }
        if (f.e >= 0) {
            r.coef *= pow_rat(c, static_cast<unsigned>(f.e));
        } else {
            r.coef /= pow_rat(c, static_cast<unsigned>(-f.e));
        }
        r.hpow += f.e;
    }
    r.den = std::move(keep);
    return r.renamed(v_from, v_to);
}

// ---- expansion with optional cache ----------------------------------------

namespace {
std::mutex g_cache_mx;
std::function<std::optional<HSeries>(const std::string&)> g_cache_get;
std::function<void(const std::string&, const HSeries&)> g_cache_put;
} // namespace

void set_kernel_cache(std::function<std::optional<HSeries>(const std::string&)> get,
                      std::function<void(const std::string&, const HSeries&)> put) {
    std::lock_guard<std::mutex> lk(g_cache_mx);
    g_cache_get = std::move(get);
    g_cache_put = std::move(put);
}

void clear_kernel_cache_hooks() {
    std::lock_guard<std::mutex> lk(g_cache_mx);
    g_cache_get = nullptr;
    g_cache_put = nullptr;
}

std::string kernel_cache_key(const Kernel& k, const Window& w) {
    std::ostringstream os;
    os << k.str() << "|";
    for (auto& [v, b] : w.vars) {
        os << Vars::name(v) << ":" << b.lo << "," << b.hi << ",";
        os << (b.slo ? std::to_string(*b.slo) : "*") << "," << (b.shi ? std::to_string(*b.shi) : "*") << ";";
    }
    os << "h:" << w.h.lo << "," << w.h.hi << "," << (w.h.slo ? std::to_string(*w.h.slo) : "*");
    return os.str();
}

HSeries Kernel::expand_factor(const LinFactor& f, const Window& w) const {
    // (big - small + c hbar)^e
    const std::vector<int>& vs = vars();
    if (f.e > 0) return f.poly(vs).pow(static_cast<unsigned>(f.e)).expand(w);
    int k = -f.e;
    // iota expansion, big large:
    //   big^{-k} sum_{j>=0} binom(-k, j) (-(small - c hbar))^j big^{-j}
    Window ws = w;
    VarWin& bb = ws.at(f.big);
    bb.shi = bb.shi ? std::min(*bb.shi, -k) : -k;
    if (f.small >= 0) {
        VarWin& sb = ws.at(f.small);
        sb.slo = sb.slo ? std::max(*sb.slo, 0) : 0;
    }
    ws.h.slo = std::max(*ws.h.slo, 0);
    ws.h.shi.reset();
    if (f.c == 0) ws.h.shi = 0;
    HSeries s(vs, ws);
    int jmax = -ws.at(f.big).lo - k;  // big exponent floor
    int n = ws.trunc_n();
    for (int j = 0; j <= jmax; ++j) {
        Rat cj = binomial(-k, static_cast<unsigned>(j)) * ((j % 2) ? Rat(-1) : Rat(1));
        // (small - c hbar)^j = sum_t binom(j,t) small^{j-t} (-c hbar)^t
        for (int t = 0; t <= j; ++t) {
            if (t >= n) break;
            if (f.c == 0 && t > 0) break;
            if (f.small < 0 && t < j) continue;  // no small variable: only pure hbar term
            Rat ct = cj * binomial(j, static_cast<unsigned>(t)) * pow_rat(-f.c, static_cast<unsigned>(t));
            HKey key;
            key.h = t;
            key.e.assign(vs.size(), 0);
            key.e[static_cast<size_t>(s.var_index(f.big))] = -k - j;
            if (f.small >= 0) key.e[static_cast<size_t>(s.var_index(f.small))] = j - t;
            s.put(key, ct);
        }
    }
    return s;
}

HSeries Kernel::expand(const Window& w) const {
    std::function<std::optional<HSeries>(const std::string&)> get;
    std::function<void(const std::string&, const HSeries&)> put;
    {
        std::lock_guard<std::mutex> lk(g_cache_mx);
        get = g_cache_get;
        put = g_cache_put;
    }
    std::string key;
    if (get) {
        key = kernel_cache_key(*this, w);
        if (auto hit = get(key)) return *hit;
    }
    HSeries acc = num.scaled(coef).expand(w);
    if (hpow != 0) acc = acc.mul_monomial(Rat(1), hpow, std::vector<int>(vars().size(), 0));
    for (auto& f : den) acc = acc.mul(expand_factor(f, w));
    if (put) put(key, acc);
    return acc;
}

std::string Kernel::str() const {
    std::ostringstream os;
    os << "(" << rat_str(coef) << ")hb^" << hpow << "*[" << num.str() << "]";
    for (auto& f : den) os << f.str();
    return os.str();
}

// ---- exact identity check --------------------------------------------------

std::optional<IdentityWitness> rational_identity_residual(const KernelSum& lhs, const KernelSum& rhs) {
    KernelSum all = lhs;
    for (auto k : rhs) {
        k.coef = -k.coef;
        all.push_back(k);
    }
    if (all.empty()) return std::nullopt;
    // collect variable union and the global factor exponent floors
    std::vector<int> vs;
    for (auto& k : all) vs = union_vars(vs, k.vars());
    int hfloor = 0;
    for (auto& k : all) hfloor = std::min(hfloor, k.hpow);
    std::vector<LinFactor> base;  // distinct factor bases with min exponent
    for (auto& k : all)
        for (auto& f : k.den) {
            bool found = false;
            for (auto& g : base)
                if (g.same_base(f)) {
                    g.e = std::min(g.e, std::min(f.e, 0));
                    found = true;
                }
            if (!found) {
                LinFactor nf = f;
                nf.e = std::min(f.e, 0);
                base.push_back(nf);
            }
        }
    Poly total(vs);
    for (auto& k : all) {
        Poly term = k.num.with_vars(vs).scaled(k.coef);
        HKey hb;
        hb.h = k.hpow - hfloor;
        hb.e.assign(vs.size(), 0);
        term = term.mul(Poly::monomial(vs, Rat(1), hb.h, hb.e));
        for (auto& g : base) {
            int have = 0;
            for (auto& f : k.den)
                if (f.same_base(g)) have = f.e;
            int mult = have - g.e;  // >= 0
            if (mult > 0) term = term.mul(g.poly(vs).pow(static_cast<unsigned>(mult)));
        }
        total = total.add(term);
    }
    if (total.is_zero()) return std::nullopt;
    auto [k, c] = *total.leading();
    IdentityWitness wit;
    wit.key = k;
    wit.coeff = c;
    std::ostringstream os;
    os << "hb^" << k.h;
    for (size_t i = 0; i < vs.size(); ++i)
        if (k.e[i]) os << " " << Vars::name(vs[i]) << "^" << k.e[i];
    wit.monomial = os.str();
    return wit;
}

} // namespace hadic
