#ifndef HADIC_FOCK_HPP
#define HADIC_FOCK_HPP

#include <functional>
#include <map>
#include <memory>
#include <tuple>
#include <vector>

#include "hadic/gcm.hpp"
#include "hadic/hseries.hpp"
#include "hadic/opseries.hpp"
#include "hadic/report.hpp"

namespace hadic {

// hbar-Laurent scalar truncated at a global order: power -> coefficient.
using HC = std::map<int, Rat>;

HC hc_add(const HC& a, const HC& b);
HC hc_mul(const HC& a, const HC& b, int ntrunc);
HC hc_scale(const HC& a, const Rat& c);
HC hc_shift(const HC& a, int k, int ntrunc);  // multiply by hbar^k
bool hc_zero_mod(const HC& a, int n);         // zero modulo hbar^n
std::string hc_str(const HC& a);

// Basis monomial: sorted oscillator list (color, n) with repetitions.
using Mono = std::vector<std::pair<int, int>>;

// Truncated bosonic Fock space on |colors| families of oscillators x_{i,n},
// graded by total weight sum(n) <= maxwt. Basis enumeration is deterministic.
class Fock {
public:
    Fock(int ncolors, int maxwt, int ntrunc);

    int dim() const { return static_cast<int>(monos_.size()); }
    int ncolors() const { return ncolors_; }
    int maxwt() const { return maxwt_; }
    int ntrunc() const { return ntrunc_; }
    int weight(int idx) const { return weights_[static_cast<size_t>(idx)]; }
    const Mono& mono(int idx) const { return monos_[static_cast<size_t>(idx)]; }
    int index_of(const Mono& m) const;  // -1 when beyond the cap
    int vacuum() const { return 0; }
    // dimension of the weight-d layer
    int layer_dim(int d) const;

private:
    int ncolors_, maxwt_, ntrunc_;
    std::vector<Mono> monos_;
    std::vector<int> weights_;
    std::map<Mono, int> index_;
};

// Sparse vector with hbar-Laurent coefficients. ovf marks that content
// beyond the depth cap was dropped while producing this vector: such a
// vector is incomplete and any comparison that touches it must fail loudly
// rather than trust it.
struct Vec {
    std::map<int, HC> c;
    bool ovf = false;
    bool zero_mod(int n) const;
    Vec add(const Vec& o) const;
    Vec sub(const Vec& o) const;
    Vec scale(const Rat& r) const;
    Vec scale_hc(const HC& h, int ntrunc) const;
    Vec truncated(int n) const;  // drop orders >= n
    std::string str(const Fock& f) const;
};

// A field: total mode action on basis vectors. wt_span bounds the deviation
// of the weight shift of mode m from -m (0 for homogeneous fields).
// ann_bound / cre_bound, when finite, promise mode(m) = 0 for m > ann_bound
// resp. m < cre_bound -- including on content beyond the depth cap, which is
// what lets single-sided fields pass flagged vectors through untouched.
struct FieldOp {
    std::string name;
    std::function<Vec(int mode, int idx)> mode;
    int wt_span = 0;
    int ann_bound = std::numeric_limits<int>::max();
    int cre_bound = std::numeric_limits<int>::min();

    Vec apply_mode(int m, const Vec& v, const Fock& f) const;
};

// x-indexed family of vectors: the result of applying an operator series in
// one variable to a fixed vector, complete on [lo, hi].
struct VecSeries {
    int lo = 0, hi = -1;
    std::map<int, Vec> t;  // x-degree -> coefficient vector
    Vec at(int d) const;
    VecSeries add(const VecSeries& o) const;
    VecSeries truncated(int n) const;
};

// ---- Heisenberg data --------------------------------------------------------

// Full cross-bracket table of the Cartan currents: bracket(i,j,m,n) with
// m >= 1, n <= -1 gives [h_i(m), h_j(n)]; same-sign brackets vanish and
// h(0) = 0. The diagonal n = -m is the classical gamma; off-diagonal entries
// appear from order hbar^{m+n} on.
struct Heisenberg {
    Gcm A;
    Rat level;
    int ntrunc = 1;
    int mode_window = 0;
    std::map<std::tuple<int, int, int, int>, HC> cross;

    HC bracket(int i, int j, int m, int n) const;  // any signs, via antisymmetry
    HC gamma(int i, int j, int m) const { return bracket(i, j, m, -m); }
};

// Reads the mode brackets off the two-variable commutator kernel
//   [a_{i,j}][kappa] ((z-w+kappa hb)^{-2} - (w-z+kappa hb)^{-2})
// and cross-checks against an independent expansion route; inconsistent
// matching throws.
Heisenberg derive_gamma(const Gcm& A, const Rat& level, int ntrunc, int mode_window);

// Standard Fock realization: h_i(-n) multiplies by x_{i,n}, h_i(n) acts by
// the bracket-weighted derivations, h_i(0) = 0.
FieldOp build_h_field(const Heisenberg& hd, int i, const Fock& f);

// identity field
FieldOp one_field(const Fock& f);

// regular/singular halves of a field as VecSeries on a band
VecSeries field_series(const FieldOp& a, const Fock& f, const Vec& v, int lo, int hi);
VecSeries field_reg(const FieldOp& a, const Fock& f, const Vec& v, int lo, int hi);
VecSeries field_sing(const FieldOp& a, const Fock& f, const Vec& v, int lo, int hi);

// a(x) applied to an x-indexed family; the input band must exceed the output
// band by the field's reach on both sides
VecSeries apply_field_to_series(const FieldOp& a, const Fock& f, const VecSeries& s, int lo, int hi);

// ---- field transformers ------------------------------------------------------

// operator series in d/dx applied to a field, mode-wise
FieldOp op_field(const OpSeries& o, const FieldOp& a, int ntrunc);
// regular part (creation modes m < 0) / singular part (m >= 0)
FieldOp reg_half(const FieldOp& a);
FieldOp sing_half(const FieldOp& a);
FieldOp scale_field(const FieldOp& a, const HC& c, int ntrunc);
FieldOp add_fields(const FieldOp& a, const FieldOp& b, const Fock& f);
// substitution x -> x + c hbar on a field
FieldOp shift_field(const FieldOp& a, const Rat& c, int ntrunc);

// How the power iteration of exp(F(x)) dies off: by hbar floors, or by
// one-sided x-degree growth of the exponent.
enum class ExpGrowth { HbarSmall, DegUp, DegDown };

// exp(F(x)) applied to a base family; throws when the iteration cannot be
// certified dead on the output band within kcap powers.
VecSeries exp_apply(const FieldOp& F, const Fock& f, const VecSeries& base, int lo, int hi, int kcap,
                    ExpGrowth growth);
VecSeries unit_series(const Vec& v, int lo, int hi);

// ---- Y_E machinery ----------------------------------------------------------

// Y_E(a(x), z) b(x) as a lazily computed family: mode n applied to basis
// vectors. k is the regularization exponent; valid_k searches the least one.
class YEProduct {
public:
    YEProduct(FieldOp a, FieldOp b, int k, const Fock& f);

    // (a(x)_n b(x)) as a FieldOp (x-mode action on basis vectors)
    FieldOp mode_field(int n) const;
    // coefficient of z^{-n-1} x^{-m-1} applied to basis idx
    Vec coeff(int n, int m, int idx) const;
    int k() const { return k_; }

private:
    FieldOp a_, b_;
    int k_;
    const Fock* f_;
    struct Key {
        int n, m, idx;
        bool operator<(const Key& o) const { return std::tie(n, m, idx) < std::tie(o.n, o.m, o.idx); }
    };
    mutable std::map<Key, Vec> memo_;
};

// least k in [0, kmax] such that (x1-x)^k a(x1)b(x) is jointly lower-truncated
// on the scan range; -1 when none
int find_valid_k(const FieldOp& a, const FieldOp& b, const Fock& f, int kmax);

// ---- checks -----------------------------------------------------------------

struct FockChecks {
    const Fock& f;
    int eval_wt;      // verify on basis vectors of weight <= eval_wt
    int mode_win;     // mode window for bracket scans
    int band;         // x-degree band half-width for series comparisons

    std::vector<CheckResult> bracket_fidelity(const Heisenberg& hd,
                                              const std::vector<FieldOp>& h) const;
    CheckResult ye_k_independence(const FieldOp& a, const FieldOp& b, int k1, int k2) const;
    // precondition (x1-x2+mu hb) a b = (x1-x2+nu hb) b a, then both displays
    std::vector<CheckResult> zero_mode_formula(const FieldOp& a, const FieldOp& b, const Rat& mu,
                                               const Rat& nu) const;
    std::vector<CheckResult> exp_cal(const FieldOp& alpha, const FieldOp& beta) const;
    std::vector<CheckResult> iterate(const FieldOp& a, const Rat& zeta) const;
    CheckResult ci_expression(const FieldOp& h, const Rat& level) const;
    CheckResult weak_assoc(const FieldOp& u, const FieldOp& v, int idx, int hn, int lmax) const;
    CheckResult restrictedness(const FieldOp& a, const FieldOp& b, int idx) const;
    CheckResult s_jacobi(const FieldOp& a, const FieldOp& b, const Heisenberg& hd, int i, int j) const;
};

// E^{pm}(a, zeta): exponential current from the plain x-modes of a
Vec exp_current_minus(const FieldOp& a, const Rat& zeta_coef, const Fock& f, const Vec& v);
Vec exp_current_plus(const FieldOp& a, const Rat& zeta_coef, const Fock& f, const Vec& v);

} // namespace hadic

#endif
