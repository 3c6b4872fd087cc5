#include "hadic/opseries.hpp"

#include <sstream>
#include <stdexcept>

namespace hadic {

void OpSeries::put(int k, int d, const Rat& c) {
    if (c == 0) return;
    auto& row = t_[k];
    auto it = row.find(d);
    if (it == row.end()) {
        row.emplace(d, c);
    } else {
        it->second += c;
        if (it->second == 0) row.erase(it);
    }
    if (t_[k].empty()) t_.erase(k);
}

OpSeries OpSeries::zero() { return OpSeries(); }

OpSeries OpSeries::identity() { return monomial(0, 0, Rat(1)); }

OpSeries OpSeries::monomial(int koff, int d, const Rat& c) {
    OpSeries o;
    o.put(koff, d, c);
    return o;
}

OpSeries OpSeries::G(int nmax) { return G_m(Rat(1), nmax); }

OpSeries OpSeries::G_m(const Rat& m, int nmax) {
    // 2 m hbar sum_{n>=0} (m hbar)^{2n} D^{2n} / (2n+1)!
    OpSeries o;
    o.complete_ = false;
    if (m == 0) {
        o.complete_ = true;
        return o;
    }
    for (int n = 0; 2 * n + 1 <= nmax; ++n)
        o.put(2 * n + 1, 2 * n, Rat(2) * m * pow_rat(m, 2 * static_cast<unsigned>(n)) / factorial(2 * static_cast<unsigned>(n) + 1));
    return o;
}

OpSeries OpSeries::F(int nmax) {
    // series inverse of A(u) = sum_n u^n/(2n+1)! in u = (hbar D)^2,
    // then F = (1/(2 hbar)) * B(u), B = 1/A.
    OpSeries o;
    o.complete_ = false;
    int terms = (nmax + 1) / 2 + 1;
    std::vector<Rat> a(static_cast<size_t>(terms)), b(static_cast<size_t>(terms));
    for (int n = 0; n < terms; ++n) a[static_cast<size_t>(n)] = Rat(1) / factorial(2 * static_cast<unsigned>(n) + 1);
    b[0] = 1;
    for (int n = 1; n < terms; ++n) {
        Rat s = 0;
        for (int j = 0; j < n; ++j) s += b[static_cast<size_t>(j)] * a[static_cast<size_t>(n - j)];
        b[static_cast<size_t>(n)] = -s;
    }
    for (int n = 0; 2 * n - 1 <= nmax; ++n)
        o.put(2 * n - 1, 2 * n, b[static_cast<size_t>(n)] / Rat(2));
    return o;
}

OpSeries OpSeries::L(const Rat& c, int p, int nmax) {
    // L(x) = sum_{m>=1} x^{m-1}/m! at x = c hbar^p D
    if (p < 1) throw std::invalid_argument("OpSeries::L: argument must carry hbar");
    OpSeries o;
    o.complete_ = false;
    for (int m = 1; p * (m - 1) <= nmax; ++m)
        o.put(p * (m - 1), m - 1, pow_rat(c, static_cast<unsigned>(m - 1)) / factorial(static_cast<unsigned>(m)));
    return o;
}

OpSeries OpSeries::qpow(const Rat& c, int nmax) {
    OpSeries o;
    o.complete_ = false;
    if (c == 0) return identity();
    for (int k = 0; k <= nmax; ++k)
        o.put(k, k, pow_rat(c, static_cast<unsigned>(k)) / factorial(static_cast<unsigned>(k)));
    return o;
}

OpSeries OpSeries::qbracket_int(long long m, int nmax) {
    // [m]_{q^D} = sign(m) sum_{j=0}^{|m|-1} q^{(|m|-1-2j) D}
    OpSeries o;
    if (m == 0) return o;
    long long am = m > 0 ? m : -m;
    for (long long j = 0; j < am; ++j) {
        OpSeries q = qpow(Rat(am - 1 - 2 * j), nmax);
        o = o.add(m > 0 ? q : q.scaled(Rat(-1)));
    }
    return o;
}

OpSeries OpSeries::qbracket(const Rat& m, int nmax) {
    if (denominator(m) == 1) {
        BigInt n = numerator(m);
        if (n >= -1000000 && n <= 1000000) return qbracket_int(static_cast<long long>(n), nmax);
    }
    return F(nmax).compose(G_m(m, nmax + 1), nmax);
}

OpSeries OpSeries::add(const OpSeries& o) const {
    OpSeries r = *this;
    r.complete_ = complete_ && o.complete_;
    for (auto& [k, row] : o.t_)
        for (auto& [d, c] : row) r.put(k, d, c);
    return r;
}

OpSeries OpSeries::sub(const OpSeries& o) const { return add(o.scaled(Rat(-1))); }

OpSeries OpSeries::scaled(const Rat& c) const {
    OpSeries r;
    r.complete_ = complete_;
    if (c == 0) return r;
    for (auto& [k, row] : t_)
        for (auto& [d, v] : row) r.put(k, d, v * c);
    return r;
}

OpSeries OpSeries::compose(const OpSeries& o, int nmax) const {
    OpSeries r;
    r.complete_ = false;
    bool truncated = false;
    for (auto& [k1, row1] : t_)
        for (auto& [k2, row2] : o.t_) {
            if (k1 + k2 > nmax) {
                truncated = true;
                continue;
            }
            for (auto& [d1, c1] : row1)
                for (auto& [d2, c2] : row2) r.put(k1 + k2, d1 + d2, c1 * c2);
        }
    r.complete_ = complete_ && o.complete_ && !truncated;
    return r;
}

int OpSeries::koff_min() const { return t_.empty() ? 0 : t_.begin()->first; }
int OpSeries::koff_max() const { return t_.empty() ? 0 : t_.rbegin()->first; }

int OpSeries::max_deriv() const {
    int m = 0;
    for (auto& [k, row] : t_)
        if (!row.empty()) m = std::max(m, row.rbegin()->first);
    return m;
}

bool OpSeries::eq_upto(const OpSeries& o, int nmax) const {
    for (auto& [k, row] : t_) {
        if (k > nmax) continue;
        for (auto& [d, c] : row) {
            auto it = o.t_.find(k);
            Rat oc = 0;
            if (it != o.t_.end()) {
                auto jt = it->second.find(d);
                if (jt != it->second.end()) oc = jt->second;
            }
            if (oc != c) return false;
        }
    }
    for (auto& [k, row] : o.t_) {
        if (k > nmax) continue;
        for (auto& [d, c] : row) {
            auto it = t_.find(k);
            Rat tc = 0;
            if (it != t_.end()) {
                auto jt = it->second.find(d);
                if (jt != it->second.end()) tc = jt->second;
            }
            if (tc != c) return false;
        }
    }
    return true;
}

HSeries OpSeries::apply(const HSeries& a, int v) const {
    if (t_.empty()) {
        Window w = a.window();
        w.h.slo = w.h.hi;  // zero series, claim nothing extra
        return HSeries::zero(a.vars(), a.window());
    }
    int floor = *a.window().h.slo;
    int n_in = a.window().trunc_n();
    // offsets k with floor + k >= n_in + koff_min() contribute nothing on the
    // reachable window; find the first omitted offset for the honesty cap.
    bool omitted = false;
    int first_omitted = 0;
    HSeries acc;
    bool have = false;
    // cache derivatives of a
    std::map<int, HSeries> dcache;
    dcache.emplace(0, a);
    for (auto& [k, row] : t_) {
        int limit = n_in + koff_min();
        if (floor + k >= limit) {
            if (!omitted || k < first_omitted) {
                omitted = true;
                first_omitted = k;
            }
            continue;
        }
        for (auto& [d, c] : row) {
            auto it = dcache.find(d);
            if (it == dcache.end()) {
                int dprev = dcache.rbegin()->first;
                HSeries cur = dcache.rbegin()->second;
                for (int j = dprev + 1; j <= d; ++j) {
                    cur = cur.derive(v);
                    dcache.emplace(j, cur);
                }
                it = dcache.find(d);
            }
            std::vector<int> e(a.vars().size(), 0);
            HSeries term = it->second.mul_monomial(c, k, e);
            acc = have ? acc.add(term) : term;
            have = true;
        }
    }
    if (!have) return HSeries::zero(a.vars(), a.window());
    if (!complete_ && omitted) {
        Window w = acc.window();
        w.h.hi = std::min(w.h.hi, floor + first_omitted - 1);
        acc = acc.restricted(w);
    }
    return acc;
}

std::string OpSeries::str() const {
    std::ostringstream os;
    bool first = true;
    for (auto& [k, row] : t_)
        for (auto& [d, c] : row) {
            if (!first) os << " + ";
            first = false;
            os << "(" << rat_str(c) << ")hb^" << k << " D^" << d;
        }
    if (first) os << "0";
    return os.str();
}

} // namespace hadic
