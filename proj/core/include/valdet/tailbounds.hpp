#pragma once

#include "valdet/determinant.hpp"

namespace valdet {

// Everything needed to bound |a_n| for all n > N.
//
// Norm model: ||L q_k||^2 <= C * theta^(2k) with q_k the unit monomials on
// the boundary circle; beta_k encloses ||L q_k||^2 uniformly over the
// parameter box; t_seq[m-1] bounds the m-th approximation number s_m via
// s_m <= sqrt(sum_{k >= m-1} beta_k); B[k] are the elementary symmetric
// functions of t_1..t_L; the coefficient bounds follow from the Weyl-type
// inequality |a_n| <= sum over n-subsets of prod s_m.
struct TailCertificate {
    Interval theta;   // contraction ratio, upper enclosure in (0,1)
    Interval C;       // ||L q_k||^2 <= C theta^{2k}, uniform over the box
    int N = 0, L = 0;
    std::vector<Interval> beta;   // k = 0..L-1
    Interval eps1, eps2, eps3, eps4;
    std::vector<Interval> t_seq;  // m = 1..L
    std::vector<Interval> B;      // k = 0..L, B[0] = 1
    Interval euler_c;             // 1 / prod_{j>=1} (1 - theta^j)
    Interval geo;                 // t_m <= (geo/theta^{L+1}) theta^m for m > L;
                                  // tail blocks sum to <= euler_c * geo^j
    Interval xi;
    Interval param_lo, param_hi;  // parameter box the certificate covers
    std::string theta_rule;
    std::string notes;

    mpfr_prec_t prec() const { return theta.precision(); }
};

// Geometric tail sum C r^L / (1 - r); callers pass r = theta^2 to bound
// sum_{k >= L} ||L q_k||^2.
Interval tail_eps2(const Interval& C, const Interval& r, int L);

// Rigorous enclosures of beta_k = ||L q_k||^2 for k = 0..L-1 by trapezoid
// quadrature on the boundary circle, spectrally convergent with a certified
// annulus error term.  The enclosures hold uniformly over the parameter box.
// eps3 is set to the largest enclosure width.
std::vector<Interval> basis_image_norms(const SystemSpec& sys, const WeightPlan& plan,
                                        const Interval& box, int N, int L,
                                        Interval* eps3, unsigned threads = 1);

// t_m = sqrt(sum_{k=m-1}^{L-1} beta_k + (L-m+1) eps3 + eps2), m = 1..L.
std::vector<Interval> t_sequence(const std::vector<Interval>& beta,
                                 const Interval& eps2, const Interval& eps3,
                                 const Interval& theta, const Interval& C, int L);

// Elementary symmetric functions B_k of t_1..t_L (interval DP); eps4 is the
// largest B_k enclosure width (the DP already carries all input error).
std::vector<Interval> elementary_symmetric(const std::vector<Interval>& t_seq,
                                           int L, Interval* eps4);

// Assembled certificate for the plan on the given parameter box.
TailCertificate build_certificate(const SystemSpec& sys, const WeightPlan& plan,
                                  const Interval& box, const Interval& eps1,
                                  int N, int L, unsigned threads = 1);

// |a_n| bound for n > N: the split-sum bound for N < n <= L, geometric xi
// bound beyond L.  Throws CertificateVacuous when geo >= 1.
Interval coefficient_bound(const TailCertificate& cert, int n);

// Appendix-style Euler bound: C^n r^(n(n+1)/2) / prod_{j<=n} (1 - r^j).
Interval euler_bound(const Interval& C, const Interval& r, int n);

// Certified remainder: |d(z,t) - d_N(z,t)| <= N|z|^N eps1
//   + sum_{n=N+1}^{L} gamma_n |z|^n + euler_c-free geometric tail beyond L.
// Throws RadiusExceeded when |z| * geo >= 1.
Interval determinant_remainder(const TailCertificate& cert,
                               const CoefficientSeries& series, const Interval& abs_z);

// sum_{n=N+1}^{infinity} n^pow * bound(|a_n|) at z = 1 (pow in {0,1,2});
// used for the tails of the A..E quantity sums.
Interval coefficient_tail_weighted(const TailCertificate& cert, int pow);

std::string certificate_to_json(const TailCertificate& cert);

} // namespace valdet
