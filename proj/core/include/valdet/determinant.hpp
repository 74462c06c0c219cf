#pragma once

#include <string>
#include <vector>

#include "valdet/periodic.hpp"

namespace valdet {

// Observable phi entering a Gibbs-type weight direction.
enum class Observable { none, one, coordinate, log_deriv };

// Weight plan for the determinant d(z,t) built from the orbit data.
//
//   dimension: weight |psi_w'|^t, denominator 1 - psi_w'; traces carry
//              d/dt and d2/dt2 via the log|psi_w'| factor.
//   lyapunov / gibbs / variance: G = g0 + t*(-phi) with g0 = -log|T'|,
//              so the t=0 weight is |psi_w'| and the quantity integral
//              of phi d mu equals -C/A.  (lyapunov is gibbs with
//              phi = log|T'|.)
//   mixing:    g0 = -log|T'| at fixed t = 0; only tr is produced.
struct WeightPlan {
    enum class Mode { dimension, lyapunov, mixing, gibbs, variance };
    Mode mode = Mode::mixing;
    Interval base_t;           // dimension parameter (may be a box)
    Observable phi = Observable::none;
    // centering shift: direction is -(phi - center); folded into traces
    Interval center;

    static WeightPlan dimension(const Interval& t);
    static WeightPlan lyapunov(mpfr_prec_t prec);
    static WeightPlan mixing(mpfr_prec_t prec);
    static WeightPlan gibbs(Observable phi, mpfr_prec_t prec);
    static WeightPlan variance(Observable phi, mpfr_prec_t prec);

    bool needs_dt() const { return mode != Mode::mixing; }
    bool needs_dtt() const { return mode == Mode::variance; }
    bool needs_orbit_sum() const { return phi == Observable::coordinate; }
};

struct TraceVector {
    int n = 0;
    Interval tr, tr_dt, tr_dtt;
};

struct CoefficientSeries {
    int N = 0;
    std::vector<Interval> a, a_dt, a_dtt;  // index n-1, n = 1..N
    Interval eps1;                          // max enclosure width over the family
    mpfr_prec_t prec = 256;
    bool has_dt = false, has_dtt = false;

    // finite sums A_N..E_N
    Interval A, B, C, D, E;
};

// Whether a word contributes to trace sums (circle-identified systems count
// the boundary pair once: the all-last-branch word is skipped).
bool word_counted_in_traces(const SystemSpec& sys, const Word& w);

// Interval-rigorous period-n trace from a materialized table.
TraceVector trace_sum(const SystemSpec& sys, const OrbitTable& table,
                      const WeightPlan& plan, int n);

// Streaming traces for n = 1..N; deterministic for any thread count.
std::vector<TraceVector> trace_sums(const SystemSpec& sys, const WeightPlan& plan,
                                    int N, unsigned threads = 1);

// Centering transform: replaces the direction -phi by -(phi - m), i.e.
// tr_dt += n m tr, tr_dtt += 2 n m tr_dt_old + n^2 m^2 tr.
std::vector<TraceVector> center_traces(const std::vector<TraceVector>& traces,
                                       const Interval& m);

// a_n = -(1/n) sum_{k=1..n} tr_k a_{n-k}, a_0 = 1, with first and second
// t-derivative recursions; fills the finite sums A..E.
CoefficientSeries coefficients_from_traces(const std::vector<TraceVector>& traces,
                                           int N, mpfr_prec_t prec);

enum class SeriesPart { value, dz, dt, dtt };

// Horner evaluation of the truncated series (1 + sum a_n z^n or the requested
// partial derivative).  No tail correction.
CInterval evaluate_truncated(const CoefficientSeries& s, const CInterval& z,
                             SeriesPart part = SeriesPart::value);
Interval evaluate_truncated_real(const CoefficientSeries& s, const Interval& z,
                                 SeriesPart part = SeriesPart::value);

struct QuantitySums {
    Interval A, B, C, D, E;
};
QuantitySums quantity_sums(const CoefficientSeries& s);

// JSON with decimal-string intervals at the precision's honest digit count.
std::string coefficient_series_to_json(const CoefficientSeries& s);

} // namespace valdet
