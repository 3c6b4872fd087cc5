#ifndef HADIC_TEST_FOCK_HELPERS_HPP
#define HADIC_TEST_FOCK_HELPERS_HPP

#include <memory>

#include "hadic/fock.hpp"
#include "hadic/kernels.hpp"

namespace hadic::test {

struct Model {
    std::shared_ptr<Fock> f;
    Heisenberg hd;
    std::vector<FieldOp> h;
};

inline Model make_model(const Gcm& A, const Rat& level, int maxwt, int ntrunc) {
    Model m;
    m.f = std::make_shared<Fock>(A.rank(), maxwt, ntrunc);
    m.hd = derive_gamma(A, level, ntrunc, maxwt + 6);
    for (int i = 0; i < A.rank(); ++i) m.h.push_back(build_h_field(m.hd, i, *m.f));
    return m;
}

// One-color oscillator pair with a prescribed cross bracket table
// [p(m), p(-n)] = g(m, n) for m >= 0 (the zero mode acts by derivations too);
// p(-n) multiplies by x_n.
inline FieldOp custom_boson(const Fock& f, const std::map<std::pair<int, int>, HC>& g, int span = 0) {
    FieldOp op;
    op.name = "p";
    op.wt_span = span;
    op.mode = [&f, g](int m, int idx) -> Vec {
        Vec r;
        const Mono& mono = f.mono(idx);
        if (m < 0) {
            Mono nm = mono;
            nm.emplace_back(0, -m);
            std::sort(nm.begin(), nm.end());
            int j = f.index_of(nm);
            if (j < 0) {
                r.ovf = true;
                return r;
            }
            r.c[j] = HC{{0, Rat(1)}};
            return r;
        }
        size_t p = 0;
        while (p < mono.size()) {
            size_t q = p;
            while (q < mono.size() && mono[q] == mono[p]) ++q;
            int mult = static_cast<int>(q - p);
            auto [col, n] = mono[p];
            (void)col;
            auto it = g.find({m, n});
            if (it != g.end() && !it->second.empty()) {
                Mono nm = mono;
                nm.erase(nm.begin() + static_cast<long>(p));
                int j = f.index_of(nm);
                HC hc = hc_scale(it->second, Rat(mult));
                auto jt = r.c.find(j);
                if (jt == r.c.end()) r.c.emplace(j, hc);
                else jt->second = hc_add(jt->second, hc);
            }
            p = q;
        }
        return r;
    };
    return op;
}

} // namespace hadic::test

#endif
