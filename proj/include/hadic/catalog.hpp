#ifndef HADIC_CATALOG_HPP
#define HADIC_CATALOG_HPP

#include "hadic/kernels.hpp"
#include "hadic/opseries.hpp"
#include "hadic/report.hpp"

namespace hadic {

// Formula-identity catalog. Entries are data: a name, a builder, and the
// anchor it certifies; the CLI addresses them by name.
namespace catalog {

// log((x + m hb)/(x - m hb)) = G(D)[m] x^{-1}
CheckResult log_two_terms(const Rat& m, int n, int window);
// four-factor log identity against -G(D)G(D)[m][kappa](z-w)^{-2}
CheckResult log_four_terms(const Rat& m, const Rat& kappa, int n, int window);
// Sing_x (x-b hb)^{-1} F = (x-b hb)^{-1} F(b hb, hb)  and the Res form
CheckResult sing_res_fact(const Rat& b, const Poly& F, int n, int window, const std::string& tag);
// -G(x) q^{-x} = -2 hb L(-2 hb x)
CheckResult GL_relation(int n);
// G(x) q^{-l x} = 2 hb L(-2 hb x) q^{(1-l) x}
CheckResult GqL_level(const Rat& l, int n);
// the two rational identities from the order-2 Serre reduction
CheckResult serre_kernel_product(int which);  // 1 or 2
// iota_{z,w}(z-w)^{-1-j} - iota_{w,z}(z-w)^{-1-j} = (1/j!) d_w^j delta(w/z)
CheckResult delta_decomp(int j, int n, int window);

// all catalog entries at default desk parameters
std::vector<CheckResult> run_all(int n, int window);

} // namespace catalog

} // namespace hadic

#endif
