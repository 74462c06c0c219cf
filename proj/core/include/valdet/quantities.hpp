#pragma once

#include <optional>

#include "valdet/tailbounds.hpp"

namespace valdet {

struct CertifiedValue {
    std::string name;
    Interval estimate;        // point interval (midpoint-quality value)
    Interval bounds;          // [lower, upper]; certified iff !uncertified
    int order_N = 0;
    bool uncertified = true;
    std::string certificate_json;  // summary of the tail certificate, if any
    double heuristic_error = 0.0;  // |t_N - t_{N-1}|-style indicator
    std::string note;
};

struct RootBracket {
    Interval lo, hi;      // point endpoints
    Interval f_lo, f_hi;  // certified enclosures with opposite signs
    Interval margin;      // smallest distance of the endpoint enclosures to 0
};

// Pipelines ------------------------------------------------------------------

struct RunOptions {
    int N = 14;
    int L = 0;              // 0: max(4N, 200)
    bool validate = false;
    unsigned threads = 1;
    mpfr_prec_t prec = 256;
    double bracket_lo = 0.0, bracket_hi = 0.0;  // optional root bracket hints
    double target_width = 0.0;                  // 0: as tight as certifiable
    double deriv_box_halfwidth = 1.0 / 16.0;    // Cauchy box for a_n' tails
};

int resolve_L(const RunOptions& opt);

// integral of log|T'| d mu for the a.c.i.m., as -C_N/A_N (+ certified tails).
CertifiedValue lyapunov_exponent(const SystemSpec& sys, const RunOptions& opt);

// integral of phi d mu via the same machinery.
CertifiedValue gibbs_integral(const SystemSpec& sys, Observable phi,
                              const RunOptions& opt);

// variance of the auto-centered observable, paper formula taken verbatim:
// (C/A)^2 + (1/A)(B (C/A)^2 - 2 D B (C/A) + E).
CertifiedValue variance(const SystemSpec& sys, Observable phi, const RunOptions& opt);

// Low-level ops on a prepared series (tails optional).
CertifiedValue quotient_quantity(const char* name, const CoefficientSeries& s,
                                 const TailCertificate* cert, const RunOptions& opt);
CertifiedValue variance_from_series(const CoefficientSeries& s,
                                    const TailCertificate* cert, const RunOptions& opt);

// Certified bisection: f returns an enclosure including all truncation error;
// the initial bracket must certify opposite signs.
RootBracket validated_root(const std::function<Interval(const Interval&)>& f,
                           double lo, double hi, double target_width);

// Bowen-dimension pipeline: orbits -> dimension-plan traces -> coefficients
// -> (optional) certificate over the bracketing box -> certified root in t of
// d_N(1, t) = 0.
CertifiedValue hausdorff_dimension(const SystemSpec& sys, const RunOptions& opt);

struct ZeroResult {
    CertifiedValue value;  // estimate: zero of the truncated polynomial
    bool beyond_radius = false;
};

// Real positive zeros of d_N(z, 0) for the mixing plan, increasing order.
std::vector<ZeroResult> determinant_zeros(const SystemSpec& sys, int count,
                                          const RunOptions& opt);

// lambda_1 = 1 / (second zero).
CertifiedValue mixing_rate(const SystemSpec& sys, const RunOptions& opt);

// Quadratic Julia set dimension (heuristic tails; uncertified by design).
CertifiedValue julia_dimension(const CInterval& c, const RunOptions& opt);

std::string certified_value_to_json(const CertifiedValue& v, const std::string& system,
                                    double runtime_seconds, bool include_runtime);

} // namespace valdet
