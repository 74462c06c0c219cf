#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "valdet/cinterval.hpp"

namespace valdet {

struct Rational {
    long num = 0;
    long den = 1;
    Interval iv(mpfr_prec_t prec) const { return Interval::ratio(num, den, prec); }
    double d() const { return (double)num / (double)den; }
};

// Branch kinds.  Every branch is a contraction psi mapping the closed domain
// disc strictly inside a target disc; forward maps are derived.

// z -> (a z + b) / (c z + d), exact rational entries
struct MoebiusBranch {
    Rational a, b, c, d;
};

// z -> slope * z + offset
struct AffineBranch {
    Rational slope, offset;
};

// Inverse of the forward quadratic branch T(x) = c2 x^2 + c1 x + c0 - shift:
// psi(w) = (-c1 + root_sign * sqrt(c1^2 - 4 c2 (c0 - w - shift))) / (2 c2)
struct Poly2Branch {
    Rational c2, c1, c0;
    long shift = 0;
    int root_sign = 1;
};

// Inverse branch of the degree-2 circle map T(x) = 2x + eps sin(2 pi x),
// solving T(x) = w + shift by a verified Newton iteration.
struct SineBranch {
    Interval eps;
    long shift = 0;
};

// Truncated power series around `center` with certified tails:
// psi(z) = sum coeff[j] (z-center)^j + [-value_tail, value_tail] ball,
// psi'(z) analogous with deriv_tail; valid for |z - center| <= domain_radius.
struct SeriesBranch {
    CInterval center;
    std::vector<CInterval> coeff;
    Interval value_tail, deriv_tail;
    Interval domain_radius;
};

using BranchKind =
    std::variant<MoebiusBranch, AffineBranch, Poly2Branch, SineBranch, SeriesBranch>;

struct Branch {
    BranchKind kind;
    int domain_disc = 0;
    int target_disc = 0;
};

struct Disc {
    CInterval center;
    Interval radius;
};

struct SystemSpec {
    std::string name;
    std::vector<Branch> branches;
    std::vector<Disc> discs;
    bool bernoulli = true;
    // Degree-d circle map presented on [0,1]: the all-first-branch and
    // all-last-branch words fix the identified endpoint pair 0 == 1; traces
    // count that geometric point once.
    bool circle_identified = false;
    std::optional<std::vector<std::vector<int>>> markov;

    bool is_julia = false;
    CInterval julia_c;

    mpfr_prec_t prec = 256;
    // Verified at load:
    std::vector<Interval> Theta;     // per-branch contraction of the disc
    double pad = 1.0 / 16.0;         // branches verified analytic on radius*(1+pad)
    std::string config_text;         // canonical config (cache key input)

    size_t branch_count() const { return branches.size(); }
};

// Parse and rigorously verify a system from the line-oriented config grammar:
//   system=<name>, eps=<decimal>, digits=[i,j,...], c=<re>+<im>i,
//   disc.center=<decimal>, disc.radius=<decimal>,
//   branch.<k>.moebius=a,b,c,d, markov.row.<i>=0,1,...
// Unknown keys are errors.
SystemSpec load_system(const std::string& config_text, mpfr_prec_t prec = 256);

// Named built-ins ("e2", "cf_digits", "lanford", "doubling", "doubling_eps",
// "affine_cantor", "quadratic_julia").
SystemSpec load_builtin(const std::string& name, mpfr_prec_t prec = 256);

// Certified branch evaluation / derivative on a complex rectangle inside the
// (padded) domain disc.
CInterval branch_eval(const SystemSpec& sys, const Branch& b, const CInterval& z);
CInterval branch_derivative(const SystemSpec& sys, const Branch& b, const CInterval& z);

// Real-axis fast paths (systems here are real on the real fragment).
Interval branch_eval_real(const SystemSpec& sys, const Branch& b, const Interval& x);
Interval branch_derivative_real(const SystemSpec& sys, const Branch& b, const Interval& x);

// Non-validated point evaluation at machine-assisted mpfr precision (Newton
// seeds); result precision = prec of x.
void branch_eval_point(const SystemSpec& sys, const Branch& b, mpfr_srcptr x,
                       mpfr_ptr out);

// sup over the boundary of disc `di` of |psi_b(z) - c_target| / r_target,
// as a rigorous upper enclosure (adaptive arc subdivision).
Interval branch_disc_ratio(const SystemSpec& sys, const Branch& b);

// Contraction ratio of Def-style disc data: Bernoulli max_i Theta_i, general
// case max_i Theta_i^{1/K}.  rule_used is set to "bernoulli-max" or "kth-root".
Interval contraction_ratio(const SystemSpec& sys, std::string* rule_used = nullptr);

// Rigorous sup of |f| over the boundary circle of disc di scaled by exp factor
// kappa: returns sup_{|t|<=1} |f(center + radius*kappa*e^{2pi i t})| for the
// supplied callable; used for weight norms and annulus bounds.
Interval circle_sup(const SystemSpec& sys, int di, const Interval& kappa,
                    const std::function<Interval(const CInterval&)>& absf,
                    int init_arcs = 64, int max_arcs = 4096, double rel_tol = 2e-3);

} // namespace valdet
