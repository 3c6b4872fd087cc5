#include "hadic/catalog.hpp"

#include <sstream>

namespace hadic {
namespace catalog {

namespace {

std::string witness_str(const HSeries::Diff& d, const std::vector<int>& vars) {
    std::ostringstream os;
    os << "hb^" << d.key.h;
    for (size_t i = 0; i < vars.size(); ++i)
        if (d.key.e[i]) os << " " << Vars::name(vars[i]) << "^" << d.key.e[i];
    os << ": lhs=" << rat_str(d.lhs) << " rhs=" << rat_str(d.rhs);
    return os.str();
}

CheckResult from_diff(CheckResult r, const std::optional<HSeries::Diff>& d, const std::vector<int>& vars) {
    if (d) {
        r.status = Status::Fail;
        r.witness = witness_str(*d, vars);
    }
    return r;
}

} // namespace

CheckResult log_two_terms(const Rat& m, int n, int window) {
    int X = Vars::id("x");
    std::ostringstream ps;
    ps << "m=" << rat_str(m) << " N=" << n << " window=[" << -window << ",-1]";
    CheckResult r = CheckResult::pass("catalog", "log_two_terms",
                                      "G(\\partial_x) [m]_{q^{\\partial_x}} x^{-1}", ps.str());
    Window w;
    w.vars[X] = VarWin::band(-window, -1);
    w.h = VarWin::with_support(0, n - 1, 0, std::nullopt);
    HSeries lhs = HSeries::zero({X}, w);
    if (m != 0) {
        // (x+m hb)/(x-m hb) = 1 + 2m hb (x - m hb)^{-1}
        auto f = Kernel::factor({X}, X, -1, -m, -1).scaled(Rat(2) * m, 1).expand(w);
        lhs = f.log1p();
    }
    auto xinv = HSeries::monomial({X}, Rat(1), 0, {-1}, n);
    auto rhs = OpSeries::G(n).compose(OpSeries::qbracket(m, n), n).apply(xinv, X);
    if (win_intersect(lhs.window(), rhs.window()).empty())
        return CheckResult::fail(r.suite, r.name, r.anchor, r.params, "empty comparison window");
    return from_diff(r, lhs.diff_on(rhs), {X});
}

CheckResult log_four_terms(const Rat& m, const Rat& kappa, int n, int window) {
    int Z = Vars::id("z"), W = Vars::id("w");
    std::ostringstream ps;
    ps << "m=" << rat_str(m) << " kappa=" << rat_str(kappa) << " N=" << n << " window=" << window;
    CheckResult r = CheckResult::pass(
        "catalog", "log_four_terms",
        "-G(\\partial_z)G(\\partial_z)[m]_{q^{\\partial_z}}[\\kappa]_{q^{\\partial_z}}(z-w)^{-2}", ps.str());
    std::vector<int> vs = {Z, W};
    Window w;
    w.vars[Z] = VarWin::band(-2 * window, -1);
    w.vars[W] = VarWin::band(0, window);
    w.h = VarWin::with_support(0, n - 1, 0, std::nullopt);
    // K = (z-w-(m+k)h)(z-w+(m+k)h) / ((z-w+(m-k)h)(z-w-(m-k)h)), iota z large
    Rat a = m + kappa, b = m - kappa;
    auto K = Kernel::one(vs)
                 .mul_factor(Z, W, -a, 1)
                 .mul_factor(Z, W, a, 1)
                 .mul_factor(Z, W, b, -1)
                 .mul_factor(Z, W, -b, -1);
    HSeries lhs;
    {
        auto f = K.expand(w).sub(HSeries::constant(vs, Rat(1), n)).with_h_floor(1);
        lhs = f.log1p();
    }
    auto zw2 = Kernel::factor(vs, Z, W, Rat(0), -2).expand(w);
    auto rhs = OpSeries::G(n)
                   .compose(OpSeries::G(n), n)
                   .compose(OpSeries::qbracket(m, n), n)
                   .compose(OpSeries::qbracket(kappa, n), n)
                   .scaled(Rat(-1))
                   .apply(zw2, Z);
    if (win_intersect(lhs.window(), rhs.window()).empty())
        return CheckResult::fail(r.suite, r.name, r.anchor, r.params, "empty comparison window");
    return from_diff(r, lhs.diff_on(rhs), vs);
}

CheckResult sing_res_fact(const Rat& b, const Poly& F, int n, int window, const std::string& tag) {
    int X = Vars::id("x");
    std::ostringstream ps;
    ps << "b=" << rat_str(b) << " F~" << tag << " N=" << n;
    CheckResult r = CheckResult::pass("catalog", "sing_res_fact",
                                      "Sing_x (x-b hbar)^{-1} F(x,hbar) = (x-b hbar)^{-1} F(b hbar, hbar)",
                                      ps.str());
    Window w;
    w.vars[X] = VarWin::band(-window, window);
    w.h = VarWin::with_support(0, n - 1, 0, std::nullopt);
    auto pole = Kernel::factor({X}, X, -1, -b, -1).expand(w);
    auto kf = pole.mul(F.expand(w));
    // F(b hbar, hbar): substitute x -> b*hbar in the polynomial
    Poly Fb(F.vars());
    for (auto& [k, c] : F.terms()) {
        size_t xi = 0;
        for (size_t i = 0; i < F.vars().size(); ++i)
            if (F.vars()[i] == X) xi = i;
        int d = k.e[xi];
        std::vector<int> e = k.e;
        e[xi] = 0;
        Fb = Fb.add(Poly::monomial(F.vars(), c * pow_rat(b, static_cast<unsigned>(d)), k.h + d, e));
    }
    auto rhs_sing = pole.mul(Fb.expand(w));
    auto d1 = kf.sing_part(X).diff_on(rhs_sing);
    if (d1) return from_diff(r, d1, {X});
    // Res_x of the product equals F(b hbar, hbar), a series without x
    auto res = kf.residue(X);
    auto rhs_val = Fb.expand(w).drop_var(X);
    auto d2 = res.diff_on(rhs_val);
    CheckResult r2 = CheckResult::pass("catalog", "sing_res_fact",
                                       "Res_x (x-b hbar)^{-1} F(x,hbar) = F(b hbar, hbar)", ps.str());
    return from_diff(r2, d2, {});
}

CheckResult GL_relation(int n) {
    std::ostringstream ps;
    ps << "N=" << n;
    CheckResult r =
        CheckResult::pass("catalog", "GL_relation", "-G(x)q^{-x} = -2 hbar L(-2 hbar x)", ps.str());
    auto lhs = OpSeries::G(n + 1).compose(OpSeries::qpow(Rat(-1), n), n).scaled(Rat(-1));
    auto rhs = OpSeries::monomial(1, 0, Rat(-2)).compose(OpSeries::L(Rat(-2), 1, n), n);
    if (!lhs.eq_upto(rhs, n - 1)) {
        r.status = Status::Fail;
        r.witness = "operator tables differ: " + lhs.str() + " vs " + rhs.str();
    }
    return r;
}

CheckResult GqL_level(const Rat& l, int n) {
    std::ostringstream ps;
    ps << "l=" << rat_str(l) << " N=" << n;
    CheckResult r = CheckResult::pass("catalog", "GqL_level",
                                      "G(x)q^{-l x} = 2 hbar L(-2 hbar x) q^{(1-l)x}", ps.str());
    auto lhs = OpSeries::G(n + 1).compose(OpSeries::qpow(-l, n), n);
    auto rhs = OpSeries::monomial(1, 0, Rat(2))
                   .compose(OpSeries::L(Rat(-2), 1, n), n)
                   .compose(OpSeries::qpow(Rat(1) - l, n), n);
    if (!lhs.eq_upto(rhs, n - 1)) {
        r.status = Status::Fail;
        r.witness = "operator tables differ";
    }
    return r;
}

CheckResult serre_kernel_product(int which) {
    int Z1 = Vars::id("z1"), Z2 = Vars::id("z2"), W = Vars::id("w");
    std::vector<int> vs = {Z1, Z2, W};
    if (which == 1) {
        CheckResult r = CheckResult::pass("catalog", "serre_kernel_1",
                                          "2 hbar (z2-z1+2 hbar) / ((w-z1-hbar)(w-z2-hbar))", "exact");
        KernelSum lhs = {
            Kernel::one(vs)
                .mul_factor(W, Z1, Rat(1), 1)
                .mul_factor(W, Z2, Rat(1), 1)
                .mul_factor(W, Z1, Rat(-1), -1)
                .mul_factor(W, Z2, Rat(-1), -1),
            Kernel::one(vs).mul_factor(W, Z1, Rat(1), 1).mul_factor(W, Z1, Rat(-1), -1).scaled(Rat(-2)),
            Kernel::one(vs),
        };
        KernelSum rhs = {Kernel::one(vs)
                             .mul_factor(Z2, Z1, Rat(2), 1)
                             .mul_factor(W, Z1, Rat(-1), -1)
                             .mul_factor(W, Z2, Rat(-1), -1)
                             .scaled(Rat(2), 1)};
        auto wit = rational_identity_residual(lhs, rhs);
        if (wit) {
            r.status = Status::Fail;
            r.witness = "residual " + rat_str(wit->coeff) + " at " + wit->monomial;
        }
        return r;
    }
    CheckResult r = CheckResult::pass("catalog", "serre_kernel_2", "(z2-w+3 hbar)/(w-z2-hbar)", "exact");
    KernelSum lhs = {
        Kernel::one(vs).mul_factor(W, Z2, Rat(1), 1).mul_factor(W, Z2, Rat(-1), -1),
        Kernel::one(vs).scaled(Rat(-2)),
    };
    KernelSum rhs = {Kernel::one(vs).mul_factor(Z2, W, Rat(3), 1).mul_factor(W, Z2, Rat(-1), -1)};
    auto wit = rational_identity_residual(lhs, rhs);
    if (wit) {
        r.status = Status::Fail;
        r.witness = "residual " + rat_str(wit->coeff) + " at " + wit->monomial;
    }
    return r;
}

CheckResult delta_decomp(int j, int n, int window) {
    int Z = Vars::id("z"), W = Vars::id("w");
    std::vector<int> vs = {Z, W};
    std::ostringstream ps;
    ps << "j=" << j << " N=" << n << " window=" << window;
    CheckResult r = CheckResult::pass(
        "catalog", "delta_decomp",
        "iota_{z,w}(z-w)^{-1-j} - iota_{w,z}(z-w)^{-1-j} = (1/j!) d_w^j delta(w/z)", ps.str());
    Window w = box_window(vs, window, n);
    auto a = Kernel::factor(vs, Z, W, Rat(0), -1 - j).expand(w);
    auto b = Kernel::factor(vs, W, Z, Rat(0), -1 - j).expand(w).scaled((j % 2) ? Rat(-1) : Rat(1));
    auto diff = a.add(b);
    auto dj = delta_series(W, Z, j, w, vs);
    if (win_intersect(diff.window(), dj.window()).empty())
        return CheckResult::fail(r.suite, r.name, r.anchor, r.params, "empty comparison window");
    return from_diff(r, diff.diff_on(dj), vs);
}

std::vector<CheckResult> run_all(int n, int window) {
    std::vector<CheckResult> out;
    for (int m : {-1, 0, 1, 2}) out.push_back(log_two_terms(Rat(m), std::max(n, 6), std::max(window, 8)));
    out.push_back(log_four_terms(Rat(2), Rat(1), n, window));
    out.push_back(log_four_terms(Rat(2), Rat(3), n, window));
    out.push_back(log_four_terms(Rat(-1), Rat(2), n, window));
    {
        int X = Vars::id("x");
        auto F = Poly::monomial({X}, Rat(1), 0, {2});
        out.push_back(sing_res_fact(Rat(2), F, 5, window, "x^2"));
    }
    out.push_back(GL_relation(n + 2));
    out.push_back(GqL_level(Rat(1), n + 2));
    out.push_back(GqL_level(Rat(3, 2), n + 2));
    out.push_back(serre_kernel_product(1));
    out.push_back(serre_kernel_product(2));
    for (int j : {0, 1, 2}) out.push_back(delta_decomp(j, n, window));
    return out;
}

} // namespace catalog
} // namespace hadic
