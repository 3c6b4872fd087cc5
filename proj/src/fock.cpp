#include "hadic/fock.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

#include "hadic/kernels.hpp"

namespace hadic {

// ---- hbar-Laurent coefficients ---------------------------------------------

HC hc_add(const HC& a, const HC& b) {
    HC r = a;
    for (auto& [k, v] : b) {
        auto it = r.find(k);
        if (it == r.end()) {
            r.emplace(k, v);
        } else {
            it->second += v;
            if (it->second == 0) r.erase(it);
        }
    }
    return r;
}

HC hc_mul(const HC& a, const HC& b, int ntrunc) {
    HC r;
    for (auto& [ka, va] : a)
        for (auto& [kb, vb] : b) {
            int k = ka + kb;
            if (k >= ntrunc) continue;
            auto it = r.find(k);
            if (it == r.end()) {
                r.emplace(k, va * vb);
                if (r[k] == 0) r.erase(k);
            } else {
                it->second += va * vb;
                if (it->second == 0) r.erase(it);
            }
        }
    return r;
}

HC hc_scale(const HC& a, const Rat& c) {
    HC r;
    if (c == 0) return r;
    for (auto& [k, v] : a) r.emplace(k, v * c);
    return r;
}

HC hc_shift(const HC& a, int k, int ntrunc) {
    HC r;
    for (auto& [ka, v] : a)
        if (ka + k < ntrunc) r.emplace(ka + k, v);
    return r;
}

bool hc_zero_mod(const HC& a, int n) {
    for (auto& [k, v] : a)
        if (k < n && v != 0) return false;
    return true;
}

std::string hc_str(const HC& a) {
    if (a.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [k, v] : a) {
        if (!first) os << "+";
        first = false;
        os << "(" << rat_str(v) << ")hb^" << k;
    }
    return os.str();
}

// ---- basis -------------------------------------------------------------------

namespace {
void gen_monos(int ncolors, int maxwt, int budget, int min_n, int min_color, Mono& cur,
               std::vector<Mono>& out) {
    out.push_back(cur);
    for (int n = min_n; n <= budget; ++n) {
        int c0 = (n == min_n) ? min_color : 0;
        for (int c = c0; c < ncolors; ++c) {
            cur.emplace_back(c, n);
            gen_monos(ncolors, maxwt, budget - n, n, c, cur, out);
            cur.pop_back();
        }
    }
}
} // namespace

Fock::Fock(int ncolors, int maxwt, int ntrunc) : ncolors_(ncolors), maxwt_(maxwt), ntrunc_(ntrunc) {
    Mono cur;
    gen_monos(ncolors, maxwt, maxwt, 1, 0, cur, monos_);
    for (Mono& m : monos_) std::sort(m.begin(), m.end());  // canonical form
    // sort by weight then lexicographically for a stable enumeration
    auto wt = [](const Mono& m) {
        int s = 0;
        for (auto& [c, n] : m) s += n;
        return s;
    };
    std::sort(monos_.begin(), monos_.end(), [&](const Mono& a, const Mono& b) {
        int wa = wt(a), wb = wt(b);
        if (wa != wb) return wa < wb;
        return a < b;
    });
    for (size_t i = 0; i < monos_.size(); ++i) {
        weights_.push_back(wt(monos_[i]));
        index_[monos_[i]] = static_cast<int>(i);
    }
}

int Fock::index_of(const Mono& m) const {
    auto it = index_.find(m);
    return it == index_.end() ? -1 : it->second;
}

int Fock::layer_dim(int d) const {
    int n = 0;
    for (int w : weights_)
        if (w == d) ++n;
    return n;
}

// ---- vectors -----------------------------------------------------------------

bool Vec::zero_mod(int n) const {
    for (auto& [i, h] : c)
        if (!hc_zero_mod(h, n)) return false;
    return true;
}

Vec Vec::add(const Vec& o) const {
    Vec r = *this;
    r.ovf = ovf || o.ovf;
    for (auto& [i, h] : o.c) {
        auto it = r.c.find(i);
        if (it == r.c.end()) {
            if (!h.empty()) r.c.emplace(i, h);
        } else {
            it->second = hc_add(it->second, h);
            if (it->second.empty()) r.c.erase(it);
        }
    }
    return r;
}

Vec Vec::sub(const Vec& o) const { return add(o.scale(Rat(-1))); }

Vec Vec::scale(const Rat& r0) const {
    Vec r;
    r.ovf = ovf;
    if (r0 == 0) return r;
    for (auto& [i, h] : c) r.c.emplace(i, hc_scale(h, r0));
    return r;
}

Vec Vec::scale_hc(const HC& h, int ntrunc) const {
    Vec r;
    r.ovf = ovf;
    for (auto& [i, hc] : c) {
        HC p = hc_mul(hc, h, ntrunc);
        if (!p.empty()) r.c.emplace(i, p);
    }
    return r;
}

Vec Vec::truncated(int n) const {
    Vec r;
    r.ovf = ovf;
    for (auto& [i, h] : c) {
        HC t;
        for (auto& [k, v] : h)
            if (k < n) t.emplace(k, v);
        if (!t.empty()) r.c.emplace(i, t);
    }
    return r;
}

std::string Vec::str(const Fock& f) const {
    if (c.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [i, h] : c) {
        if (!first) os << " + ";
        first = false;
        os << "[" << hc_str(h) << "]*";
        const Mono& m = f.mono(i);
        if (m.empty()) os << "vac";
        for (auto& [col, n] : m) os << "x(" << col << "," << n << ")";
    }
    return os.str();
}

Vec FieldOp::apply_mode(int m, const Vec& v, const Fock& f) const {
    Vec r;
    if (m > ann_bound || m < cre_bound) return r;  // zero on any content
    r.ovf = v.ovf;
    for (auto& [i, h] : v.c) {
        Vec mi = mode(m, i);
        r.ovf = r.ovf || mi.ovf;
        for (auto& [j, hj] : mi.c) {
            HC p = hc_mul(hj, h, f.ntrunc());
            if (p.empty()) continue;
            auto it = r.c.find(j);
            if (it == r.c.end())
                r.c.emplace(j, p);
            else {
                it->second = hc_add(it->second, p);
                if (it->second.empty()) r.c.erase(it);
            }
        }
    }
    return r;
}

Vec VecSeries::at(int d) const {
    auto it = t.find(d);
    return it == t.end() ? Vec{} : it->second;
}

VecSeries VecSeries::add(const VecSeries& o) const {
    VecSeries r;
    r.lo = std::max(lo, o.lo);
    r.hi = std::min(hi, o.hi);
    if (t.empty() && lo > hi) return o;  // adding to a default-empty series
    for (int d = r.lo; d <= r.hi; ++d) {
        Vec s = at(d).add(o.at(d));
        if (!s.c.empty() || s.ovf) r.t[d] = s;
    }
    return r;
}

VecSeries VecSeries::truncated(int n) const {
    VecSeries r;
    r.lo = lo;
    r.hi = hi;
    for (auto& [d, v] : t) {
        Vec tv = v.truncated(n);
        if (!tv.c.empty()) r.t[d] = tv;
    }
    return r;
}

// ---- Heisenberg data -----------------------------------------------------------

HC Heisenberg::bracket(int i, int j, int m, int n) const {
    if (m == 0 || n == 0) return {};
    if ((m > 0 && n > 0) || (m < 0 && n < 0)) return {};
    if (m > 0) {
        auto it = cross.find({i, j, m, n});
        if (it == cross.end()) throw std::out_of_range("Heisenberg: bracket outside mode window");
        return it->second;
    }
    return hc_scale(bracket(j, i, n, m), Rat(-1));
}

Heisenberg derive_gamma(const Gcm& A, const Rat& level, int ntrunc, int mode_window) {
    A.validate();
    Heisenberg hd;
    hd.A = A;
    hd.level = level;
    hd.ntrunc = ntrunc;
    hd.mode_window = mode_window;

    int Z = Vars::id("z"), W = Vars::id("w");
    std::vector<int> vs = {Z, W};
    int mw = mode_window;
    Window w;
    w.vars[Z] = VarWin::band(-(2 * mw + ntrunc + 4), 2 * mw + ntrunc + 4);
    w.vars[W] = VarWin::band(-(2 * mw + ntrunc + 4), 2 * mw + ntrunc + 4);
    w.h = VarWin::with_support(0, ntrunc - 1, 0, std::nullopt);

    for (int i = 0; i < A.rank(); ++i) {
        for (int j = 0; j < A.rank(); ++j) {
            int aij = A.at(i, j);
            // [a_{i,j}][kappa] ((z-w+k hb)^{-2} - (w-z+k hb)^{-2}); ops in d_w
            auto op = OpSeries::qbracket(Rat(aij), ntrunc + 1)
                          .compose(OpSeries::qbracket(level, ntrunc + 1), ntrunc);
            auto p1 = op.apply(Kernel::factor(vs, Z, W, level, -2).expand(w), W);
            auto p2 = op.apply(Kernel::factor(vs, W, Z, level, -2).expand(w), W);
            auto K = p1.sub(p2);
            // independent route: the even operator applied through d_z
            auto q1 = op.apply(Kernel::factor(vs, Z, W, level, -2).expand(w), Z);
            auto q2 = op.apply(Kernel::factor(vs, W, Z, level, -2).expand(w), Z);
            auto K2 = q1.sub(q2);
            if (auto d = K.diff_on(K2))
                throw std::logic_error("derive_gamma: expansion routes disagree at hb^" +
                                       std::to_string(d->key.h));
            // read off [h_i(m), h_j(n)] = <z^{-m-1} w^{-n-1}> K for m >= 1, n <= -1
            for (int m = 1; m <= mw; ++m) {
                for (int n = -mw; n <= -1; ++n) {
                    HC hc;
                    for (int h = 0; h < ntrunc; ++h) {
                        Rat c = K.coeff(h, {-m - 1, -n - 1});
                        if (c != 0) hc.emplace(h, c);
                    }
                    if (!hc.empty()) hd.cross[{i, j, m, n}] = hc;
                    else hd.cross[{i, j, m, n}] = HC{};
                }
            }
            // sanity: no h(0) rows and no same-sign content
            for (int m = 1; m <= mw; ++m) {
                Rat c0 = K.coeff(0, {-m - 1, -1 + 1});
                (void)c0;
                for (int h = 0; h < ntrunc; ++h) {
                    if (K.coeff(h, {-m - 1, -0 - 1}) != 0)
                        throw std::logic_error("derive_gamma: unexpected h(0) bracket content");
                }
            }
            // classical layer: gamma_{i,j}(m) = a_{i,j} * level * m mod hbar
            for (int m = 1; m <= mw; ++m) {
                HC g = hd.cross[{i, j, m, -m}];
                Rat c0 = g.count(0) ? g.at(0) : Rat(0);
                if (c0 != Rat(aij) * level * Rat(m))
                    throw std::logic_error("derive_gamma: classical layer mismatch at m=" +
                                           std::to_string(m));
            }
        }
    }
    // antisymmetry of the diagonal part
    for (int i = 0; i < A.rank(); ++i)
        for (int j = 0; j < A.rank(); ++j)
            for (int m = 1; m <= mw; ++m) {
                HC a = hd.gamma(i, j, m);
                HC b = hc_scale(hd.bracket(j, i, -m, m), Rat(-1));
                if (hc_add(a, hc_scale(b, Rat(-1))) != HC{} && !hc_add(a, hc_scale(b, Rat(-1))).empty())
                    throw std::logic_error("derive_gamma: antisymmetry violated");
            }
    return hd;
}

// ---- field construction ----------------------------------------------------

FieldOp build_h_field(const Heisenberg& hd, int i, const Fock& f) {
    FieldOp op;
    op.name = "h" + std::to_string(i);
    op.wt_span = 0;
    int nt = f.ntrunc();
    op.mode = [&f, hd, i, nt](int m, int idx) -> Vec {
        Vec r;
        if (m == 0) return r;
        const Mono& mono = f.mono(idx);
        if (m < 0) {
            // creation: multiply by x_{i,-m}; beyond the cap the content is
            // dropped and the vector marked incomplete
            Mono nm = mono;
            nm.emplace_back(i, -m);
            std::sort(nm.begin(), nm.end());
            int j = f.index_of(nm);
            if (j < 0) {
                r.ovf = true;
                return r;
            }
            r.c[j] = HC{{0, Rat(1)}};
            return r;
        }
        // annihilation: sum over distinct oscillators in the monomial
        size_t p = 0;
        while (p < mono.size()) {
            size_t q = p;
            while (q < mono.size() && mono[q] == mono[p]) ++q;
            int mult = static_cast<int>(q - p);
            auto [col, n] = mono[p];
            HC br = hd.bracket(i, col, m, -n);
            if (!br.empty()) {
                Mono nm = mono;
                nm.erase(nm.begin() + static_cast<long>(p));
                int j = f.index_of(nm);
                HC hc = hc_scale(br, Rat(mult));
                hc = hc_shift(hc, 0, nt);
                if (!hc.empty()) {
                    auto it = r.c.find(j);
                    if (it == r.c.end()) r.c.emplace(j, hc);
                    else it->second = hc_add(it->second, hc);
                }
            }
            p = q;
        }
        return r;
    };
    return op;
}

FieldOp one_field(const Fock& f) {
    FieldOp op;
    op.name = "1";
    op.wt_span = 1;  // mode -1 leaves the weight fixed, deviating by 1 from -m
    op.ann_bound = -1;
    op.cre_bound = -1;
    (void)f;
    op.mode = [](int m, int idx) -> Vec {
        Vec r;
        if (m == -1) r.c[idx] = HC{{0, Rat(1)}};
        return r;
    };
    return op;
}

VecSeries field_series(const FieldOp& a, const Fock& f, const Vec& v, int lo, int hi) {
    VecSeries s;
    s.lo = lo;
    s.hi = hi;
    for (int d = lo; d <= hi; ++d) {
        Vec r = a.apply_mode(-d - 1, v, f);
        if (!r.c.empty() || r.ovf) s.t[d] = r;
    }
    return s;
}

VecSeries field_reg(const FieldOp& a, const Fock& f, const Vec& v, int lo, int hi) {
    VecSeries s;
    s.lo = lo;
    s.hi = hi;
    for (int d = std::max(lo, 0); d <= hi; ++d) {
        Vec r = a.apply_mode(-d - 1, v, f);
        if (!r.c.empty() || r.ovf) s.t[d] = r;
    }
    return s;
}

VecSeries field_sing(const FieldOp& a, const Fock& f, const Vec& v, int lo, int hi) {
    VecSeries s;
    s.lo = lo;
    s.hi = hi;
    for (int d = lo; d <= std::min(hi, -1); ++d) {
        Vec r = a.apply_mode(-d - 1, v, f);
        if (!r.c.empty() || r.ovf) s.t[d] = r;
    }
    return s;
}

VecSeries apply_field_to_series(const FieldOp& a, const Fock& f, const VecSeries& s, int lo, int hi) {
    int reach = f.maxwt() + a.wt_span + 1;
    if (s.lo > lo - reach || s.hi < hi + reach)
        throw std::invalid_argument("apply_field_to_series: input band too small");
    VecSeries r;
    r.lo = lo;
    r.hi = hi;
    for (int d = lo; d <= hi; ++d) {
        Vec acc;
        for (int d2 = d - reach; d2 <= d + reach; ++d2) {
            auto it = s.t.find(d2);
            if (it == s.t.end()) continue;
            int m1 = -(d - d2) - 1;
            acc = acc.add(a.apply_mode(m1, it->second, f));
        }
        if (!acc.c.empty() || acc.ovf) r.t[d] = acc;
    }
    return r;
}

// ---- field transformers ----------------------------------------------------

namespace {
// falling factorial m (m-1) ... (m-d+1)
Rat falling(int m, int d) {
    Rat r = 1;
    for (int j = 0; j < d; ++j) r *= Rat(m - j);
    return r;
}
} // namespace

FieldOp op_field(const OpSeries& o, const FieldOp& a, int ntrunc) {
    FieldOp r;
    r.name = "O[" + a.name + "]";
    r.wt_span = a.wt_span + o.max_deriv();
    if (a.ann_bound != std::numeric_limits<int>::max()) r.ann_bound = a.ann_bound + o.max_deriv();
    r.cre_bound = a.cre_bound;
    auto tbl = o.table();
    auto base = a.mode;
    r.mode = [tbl, base, ntrunc](int m, int idx) -> Vec {
        // (D^d F)-mode m = (-1)^d m(m-1)...(m-d+1) F-mode(m-d)
        Vec out;
        for (auto& [koff, row] : tbl) {
            if (koff >= ntrunc) continue;
            for (auto& [d, c] : row) {
                Rat w = c * falling(m, d) * ((d % 2) ? Rat(-1) : Rat(1));
                if (w == 0) continue;
                Vec v = base(m - d, idx);
                if (v.c.empty()) continue;
                out = out.add(v.scale_hc(HC{{koff, w}}, ntrunc));
            }
        }
        return out;
    };
    return r;
}

FieldOp reg_half(const FieldOp& a) {
    FieldOp r = a;
    r.name = a.name + "+";
    r.ann_bound = -1;
    auto base = a.mode;
    r.mode = [base](int m, int idx) -> Vec { return m < 0 ? base(m, idx) : Vec{}; };
    return r;
}

FieldOp sing_half(const FieldOp& a) {
    FieldOp r = a;
    r.name = a.name + "-";
    r.cre_bound = std::max(r.cre_bound, 0);
    auto base = a.mode;
    r.mode = [base](int m, int idx) -> Vec { return m >= 0 ? base(m, idx) : Vec{}; };
    return r;
}

FieldOp scale_field(const FieldOp& a, const HC& c, int ntrunc) {
    FieldOp r = a;
    r.name = "(" + hc_str(c) + ")" + a.name;
    auto base = a.mode;
    r.mode = [base, c, ntrunc](int m, int idx) -> Vec { return base(m, idx).scale_hc(c, ntrunc); };
    return r;
}

FieldOp add_fields(const FieldOp& a, const FieldOp& b, const Fock& f) {
    (void)f;
    FieldOp r;
    r.name = a.name + "+" + b.name;
    r.wt_span = std::max(a.wt_span, b.wt_span);
    r.ann_bound = std::max(a.ann_bound, b.ann_bound);
    r.cre_bound = std::min(a.cre_bound, b.cre_bound);
    auto ma = a.mode, mb = b.mode;
    r.mode = [ma, mb](int m, int idx) -> Vec { return ma(m, idx).add(mb(m, idx)); };
    return r;
}

FieldOp shift_field(const FieldOp& a, const Rat& c, int ntrunc) {
    return op_field(OpSeries::qpow(c, ntrunc), a, ntrunc);
}

VecSeries unit_series(const Vec& v, int lo, int hi) {
    VecSeries s;
    s.lo = lo;
    s.hi = hi;
    if (!v.c.empty() && 0 >= lo && 0 <= hi) s.t[0] = v;
    return s;
}

VecSeries exp_apply(const FieldOp& F, const Fock& f, const VecSeries& base, int lo, int hi, int kcap,
                    ExpGrowth growth) {
    int reach = f.maxwt() + F.wt_span + 1;
    int n = f.ntrunc();
    VecSeries acc;
    acc.lo = lo;
    acc.hi = hi;
    VecSeries term = base;
    for (int d = lo; d <= hi; ++d) {
        Vec v = term.at(d);
        if (!v.c.empty()) acc.t[d] = v;
    }
    // dead on the output band, with no way back: HbarSmall kills everything;
    // one-sided degree growth kills the window side it moves away from
    auto finished = [&](const VecSeries& t) {
        for (auto& [d, v] : t.t) {
            if (v.truncated(n).zero_mod(n)) continue;
            switch (growth) {
                case ExpGrowth::HbarSmall: return false;
                case ExpGrowth::DegUp:
                    if (d <= hi) return false;
                    break;
                case ExpGrowth::DegDown:
                    if (d >= lo) return false;
                    break;
            }
        }
        return true;
    };
    Rat fact = 1;
    for (int k = 1; k <= kcap; ++k) {
        if (finished(term)) return acc;
        if (term.lo > lo - reach || term.hi < hi + reach)
            throw std::invalid_argument("exp_apply: base band too small for power " + std::to_string(k));
        term = apply_field_to_series(F, f, term, term.lo + reach, term.hi - reach);
        fact *= k;
        for (int d = lo; d <= hi; ++d) {
            Vec v = term.at(d).scale(Rat(1) / fact).truncated(n);
            if (v.c.empty() && !v.ovf) continue;
            auto it = acc.t.find(d);
            if (it == acc.t.end()) acc.t[d] = v;
            else {
                it->second = it->second.add(v);
                if (it->second.c.empty() && !it->second.ovf) acc.t.erase(it);
            }
        }
    }
    if (!finished(term)) throw std::invalid_argument("exp_apply: power iteration did not terminate");
    return acc;
}

// ---- Y_E --------------------------------------------------------------------

YEProduct::YEProduct(FieldOp a, FieldOp b, int k, const Fock& f)
    : a_(std::move(a)), b_(std::move(b)), k_(k), f_(&f) {}

Vec YEProduct::coeff(int n, int m, int idx) const {
    Key key{n, m, idx};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const Fock& f = *f_;
    int alpha = k_ - n - 1;
    Vec out;
    if (alpha < 0) {
        memo_.emplace(key, out);
        return out;
    }
    int beta = -m - 1;
    int wt = f.weight(idx);
    int reach = f.maxwt() + 2 + std::max(a_.wt_span, b_.wt_span);
    // s: x-degree of the b-part; bounded below by annihilation grading. On
    // the creation side the scan stops at the first row the cap truncates;
    // deeper rows die under a valid regularization exponent (the uniform
    // floor certified by find_valid_k).
    int s_lo = -wt - b_.wt_span - 2;
    int s_hi = f.maxwt() - wt + b_.wt_span + 2;
    std::map<int, Vec> brow;
    int s_cut = s_hi + 1;  // first row lost to the depth cap
    for (int s = s_lo; s <= s_hi; ++s) {
        Vec bv = b_.mode(-s - 1, idx);
        if (bv.ovf) {
            s_cut = s;
            break;
        }
        if (!bv.c.empty()) brow.emplace(s, std::move(bv));
    }
    // The substitution sum must be evaluated row by row in the regularized
    // product Q = (x1-x)^k a(x1) b(x): with a valid exponent the rows vanish
    // outside a bulk region around the commutator localization, and the value
    // of the conditionally summable diagonal tail lives in those rows.
    // Regrouping the double sum is not sound.
    int r0 = beta + alpha - s_cut + 1;  // first row with all P-entries inside the cap
    int span = std::max(a_.wt_span, b_.wt_span);
    int r_lo = -(k_ + wt + span + 4);  // bulk floor; deeper rows are tail
    if (a_.ann_bound != std::numeric_limits<int>::max())
        r_lo = std::max(r_lo, -a_.ann_bound - 1 - k_);
    if (r0 > r_lo) out.ovf = true;  // bulk rows lost to the depth cap
    auto qrow = [&](int r) {
        Vec q;
        for (int t = 0; t <= k_; ++t) {
            int sp = beta - (r - alpha) - (k_ - t);
            if (sp >= s_cut) continue;
            auto it = brow.find(sp);
            if (it == brow.end()) continue;
            Rat c = binomial(k_, static_cast<unsigned>(t)) * (((k_ - t) % 2) ? Rat(-1) : Rat(1));
            q = q.add(a_.apply_mode(-(r - t) - 1, it->second, f).scale(c));
        }
        return q;
    };
    for (int r = std::max(r0, r_lo); r <= reach + k_ + 1; ++r) {
        Rat cra = binomial(r, static_cast<unsigned>(alpha));
        if (cra == 0) continue;
        Vec q = qrow(r);
        if (q.c.empty() && !q.ovf) continue;
        out = out.add(q.scale(cra));
    }
    out = out.truncated(f.ntrunc());
    memo_.emplace(key, out);
    return out;
}

FieldOp YEProduct::mode_field(int n) const {
    FieldOp op;
    op.name = a_.name + "_(" + std::to_string(n) + ")" + b_.name;
    op.wt_span = a_.wt_span + b_.wt_span + std::abs(n) + 1;
    auto memo = std::make_shared<std::map<std::pair<int, int>, Vec>>();
    auto aa = a_;
    auto bb = b_;
    int k = k_;
    const Fock* f = f_;
    op.mode = [aa, bb, k, f, n, memo](int m, int idx) -> Vec {
        auto key = std::make_pair(m, idx);
        auto it = memo->find(key);
        if (it != memo->end()) return it->second;
        YEProduct p(aa, bb, k, *f);
        Vec v = p.coeff(n, m, idx);
        memo->emplace(key, v);
        return v;
    };
    return op;
}

int find_valid_k(const FieldOp& a, const FieldOp& b, const Fock& f, int kmax) {
    // The regularization exponent is valid exactly when the product no longer
    // depends on it; accept the smallest k that agrees with k+1 on probe
    // keys. An invalid k forces modes n >= k to zero structurally, which the
    // larger exponent exposes.
    int wt_probe = std::min(1, f.maxwt());
    std::vector<int> probes;
    for (int i = 0; i < f.dim() && static_cast<int>(probes.size()) < 3; ++i)
        if (f.weight(i) <= wt_probe) probes.push_back(i);
    int n = f.ntrunc();
    for (int k = 0; k <= kmax; ++k) {
        YEProduct p1(a, b, k, f), p2(a, b, k + 1, f);
        bool ok = true;
        for (int idx : probes) {
            for (int nn = -1; nn <= k + 1 && ok; ++nn)
                for (int m = -2; m <= 2 && ok; ++m) {
                    Vec v1 = p1.coeff(nn, m, idx);
                    Vec v2 = p2.coeff(nn, m, idx);
                    if (v1.ovf || v2.ovf || !v1.sub(v2).truncated(n).zero_mod(n)) ok = false;
                }
            if (!ok) break;
        }
        if (ok) return k;
    }
    return -1;
}

} // namespace hadic
