#include "valdet/tailbounds.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include <nlohmann/json.hpp>

namespace valdet {

namespace {

// sign of psi' on the real fragment (branches are real-symmetric, the
// derivative does not vanish, so the sign is constant)
int branch_deriv_sign(const SystemSpec& sys, const Branch& b) {
    Interval d = branch_derivative_real(sys, b, sys.discs[(size_t)b.domain_disc].center.re);
    if (d.strictly_positive()) return 1;
    if (d.strictly_negative()) return -1;
    throw DomainError("branch derivative sign undetermined at the disc center");
}

// Analytic branch weight w_j(z) for the plan at the box midpoint, its
// per-node absolute value, and the uniform-over-box inflation factor V:
// sup_{t in box disc} |w_{j,t}(z)| <= |w_{j,mid}(z)| * V(z-independent).
struct WeightModel {
    const SystemSpec& sys;
    const WeightPlan& plan;
    Interval mid;       // box midpoint (parameter at which w is evaluated)
    Interval V;         // uniform inflation over the box
    std::vector<int> signs;  // per-branch sign of psi' on the reals

    // complex weight at z (analytic in z)
    CInterval eval(int j, const CInterval& z, const CInterval& psi,
                   const CInterval& dpsi) const {
        const mpfr_prec_t p = sys.prec;
        int sg = signs[(size_t)j];
        CInterval pos_dpsi = sg < 0 ? -dpsi : dpsi;
        if (plan.mode == WeightPlan::Mode::dimension) {
            return pos_dpsi.pow_real(mid);
        }
        // g0 = -log|T'| base weight, direction -(phi - center)
        CInterval w0 = pos_dpsi;
        if (plan.mode == WeightPlan::Mode::mixing || mpfr_zero_p(mid.lo()))
            return w0;
        CInterval phi(p);
        switch (plan.phi) {
            case Observable::one:
                phi = CInterval::real(Interval::ratio(1, 1, p));
                break;
            case Observable::coordinate:
                phi = psi;  // the observable is evaluated along the orbit,
                            // i.e. at the branch image
                break;
            case Observable::log_deriv:
                phi = -pos_dpsi.log();
                break;
            case Observable::none:
                phi = CInterval(p);
                break;
        }
        phi = phi - CInterval::real(plan.center);
        return w0 * (CInterval::real(-mid) * phi).exp();
    }
};

// circle sup of an analytic expression assembled from branch data
Interval weight_circle_sup(const SystemSpec& sys, const WeightModel& wm, int j,
                           const Interval& kappa) {
    auto absf = [&](const CInterval& z) -> Interval {
        CInterval psi = branch_eval(sys, sys.branches[(size_t)j], z);
        CInterval dpsi = branch_derivative(sys, sys.branches[(size_t)j], z);
        return wm.eval(j, z, psi, dpsi).abs();
    };
    return circle_sup(sys, sys.branches[(size_t)j].domain_disc, kappa, absf);
}

// sup over the boundary circle of |phi_ext| (for the box inflation factor)
Interval observable_circle_sup(const SystemSpec& sys, const WeightPlan& plan,
                               const Interval& kappa) {
    const mpfr_prec_t p = sys.prec;
    Interval best = Interval::point(0.0, p);
    for (size_t j = 0; j < sys.branches.size(); ++j) {
        auto absf = [&](const CInterval& z) -> Interval {
            CInterval psi = branch_eval(sys, sys.branches[j], z);
            CInterval dpsi = branch_derivative(sys, sys.branches[j], z);
            int sg = branch_deriv_sign(sys, sys.branches[j]);
            CInterval pos = sg < 0 ? -dpsi : dpsi;
            switch (plan.phi) {
                case Observable::one:
                    return Interval::ratio(1, 1, p);
                case Observable::coordinate:
                    return psi.abs() + plan.center.abs();
                case Observable::log_deriv:
                    return (pos.log() - CInterval::real(plan.center)).abs();
                case Observable::none:
                    return Interval::point(0.0, p);
            }
            return Interval::point(0.0, p);
        };
        best = best.max_with(
            circle_sup(sys, sys.branches[j].domain_disc, kappa, absf));
    }
    return best;
}

// For the dimension plan the weight is |psi'|^s; over a complex s with
// Re s in the box, |w| <= exp(sup_{s in box} s * log|psi'|), a constant
// multiple of the midpoint weight with factor exp(halfwidth * sup |log|psi'||).
Interval log_deriv_circle_sup(const SystemSpec& sys, const Interval& kappa) {
    const mpfr_prec_t p = sys.prec;
    Interval best = Interval::point(0.0, p);
    for (size_t j = 0; j < sys.branches.size(); ++j) {
        auto absf = [&](const CInterval& z) -> Interval {
            CInterval dpsi = branch_derivative(sys, sys.branches[j], z);
            int sg = branch_deriv_sign(sys, sys.branches[j]);
            CInterval pos = sg < 0 ? -dpsi : dpsi;
            return pos.log().abs();
        };
        best = best.max_with(
            circle_sup(sys, sys.branches[j].domain_disc, kappa, absf));
    }
    return best;
}

WeightModel make_weight_model(const SystemSpec& sys, const WeightPlan& plan,
                              const Interval& box) {
    const mpfr_prec_t p = sys.prec;
    WeightModel wm{sys, plan, box.mid(), Interval::ratio(1, 1, p), {}};
    for (size_t j = 0; j < sys.branches.size(); ++j)
        wm.signs.push_back(branch_deriv_sign(sys, sys.branches[j]));
    Interval half = (box - box.mid()).mag();  // box half-width
    if (half.hi_d() > 0) {
        Interval lam(p);
        if (plan.mode == WeightPlan::Mode::dimension)
            lam = log_deriv_circle_sup(sys, Interval::point(1.0, p));
        else
            lam = observable_circle_sup(sys, plan, Interval::point(1.0, p));
        wm.V = (half * lam).exp();
    }
    return wm;
}

} // namespace

Interval tail_eps2(const Interval& C, const Interval& r, int L) {
    if (!(r.hi_d() < 1.0)) throw DomainError("tail_eps2 requires r < 1");
    const mpfr_prec_t p = C.precision();
    return C * r.pow_int(L) / (Interval::ratio(1, 1, p) - r);
}

std::vector<Interval> basis_image_norms(const SystemSpec& sys, const WeightPlan& plan,
                                        const Interval& box, int N, int L,
                                        Interval* eps3, unsigned threads) {
    const mpfr_prec_t p = sys.prec;
    if (sys.discs.size() != 1)
        throw DomainError("basis_image_norms: single-disc (Bernoulli) systems only");
    const Disc& D = sys.discs[0];
    const size_t K = sys.branches.size();
    WeightModel wm = make_weight_model(sys, plan, box);

    // annulus data for the trapezoid error term: the analytic integrand
    // g(tau) = F(z(tau)) conj(F(z(conj tau))) is bounded on the strip
    // |Im tau| <= delta by sup_annulus |F|^2, with e^{2 pi delta} = kappa.
    double kap = 1.0 + sys.pad / 2.0;
    Interval kappa_out = Interval::point(kap, p);
    Interval kappa_in = Interval::point(1.0 / kap, p);
    double delta = std::log(kap) / (2 * M_PI);

    // sup|w_j| and sup|u_j| over both annulus boundary circles
    std::vector<Interval> supw(K, Interval(p)), supu(K, Interval(p));
    for (size_t j = 0; j < K; ++j) {
        Interval wo = weight_circle_sup(sys, wm, (int)j, kappa_out);
        Interval wi = weight_circle_sup(sys, wm, (int)j, kappa_in);
        supw[j] = wo.max_with(wi);
        auto absu = [&](const CInterval& z) -> Interval {
            CInterval psi = branch_eval(sys, sys.branches[j], z);
            return (psi - D.center).abs() / D.radius;
        };
        Interval uo = circle_sup(sys, sys.branches[j].domain_disc, kappa_out, absu);
        Interval ui = circle_sup(sys, sys.branches[j].domain_disc, kappa_in, absu);
        supu[j] = uo.max_with(ui);
        if (!(supu[j].hi_d() < 1.0))
            throw QuadratureBudgetExceeded(
                "basis_image_norms: contraction fails on the annulus; reduce pad");
    }

    // absolute quadrature error target theta^{2L} (floored: panel count
    // grows only logarithmically in the target)
    double theta_d = 0.0;
    for (auto& th : sys.Theta) theta_d = std::max(theta_d, th.hi_d());
    double target = std::max(std::pow(theta_d, 2.0 * L), 1e-180);

    // panel count from the strip bound with M = (sum_j supw supu^0)^2
    double M0 = 0;
    for (size_t j = 0; j < K; ++j) M0 += supw[j].hi_d();
    M0 = M0 * M0;
    int P = 256;
    while (P < (1 << 16) &&
           2 * M0 / (std::exp(2 * M_PI * delta * P) - 1) > target / 4)
        P *= 2;
    if (2 * M0 / (std::exp(2 * M_PI * delta * P) - 1) > target / 4)
        throw QuadratureBudgetExceeded("basis_image_norms: panel budget exhausted");

    // node data: w_j(z_i) and u_j(z_i), then incremental powers over k
    Interval twopi = Interval::pi(p) * Interval::ratio(2, 1, p);
    std::vector<std::vector<CInterval>> wv(K), uv(K), upow(K);
    for (size_t j = 0; j < K; ++j) {
        wv[j].assign((size_t)P, CInterval(p));
        uv[j].assign((size_t)P, CInterval(p));
        upow[j].assign((size_t)P, CInterval::real(Interval::ratio(1, 1, p)));
    }
    {
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= P) return;
                Interval ti = Interval::ratio(2L * i + 1, 2L * P, p);  // midpoints
                Interval th = ti * twopi;
                CInterval z = D.center + CInterval(th.cos() * D.radius,
                                                   th.sin() * D.radius);
                for (size_t j = 0; j < K; ++j) {
                    CInterval psi = branch_eval(sys, sys.branches[j], z);
                    CInterval dpsi = branch_derivative(sys, sys.branches[j], z);
                    wv[j][(size_t)i] = wm.eval((int)j, z, psi, dpsi);
                    uv[j][(size_t)i] = (psi - D.center) * D.radius.recip();
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < std::max(1u, threads); ++t)
            pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<Interval> beta;
    beta.reserve((size_t)L);
    Interval invP = Interval::ratio(1, P, p);
    for (int k = 0; k < L; ++k) {
        // strip bound for this k
        double Mk = 0;
        for (size_t j = 0; j < K; ++j)
            Mk += supw[j].hi_d() * std::pow(supu[j].hi_d(), k);
        double errk = 2 * (Mk * Mk) / (std::exp(2 * M_PI * delta * P) - 1);
        Interval sum = Interval::point(0.0, p);
        for (int i = 0; i < P; ++i) {
            CInterval F(p);
            for (size_t j = 0; j < K; ++j) F = F + wv[j][(size_t)i] * upow[j][(size_t)i];
            sum += F.abs2();
        }
        Interval val = sum * invP + Interval::of(-errk, errk, p);
        // uniform over the box, and clip at 0 from below
        val = val * wm.V.sqr();
        Interval zero = Interval::point(0.0, p);
        val = val.max_with(zero);
        beta.push_back(val);
        for (size_t j = 0; j < K; ++j)
            for (int i = 0; i < P; ++i)
                upow[j][(size_t)i] = upow[j][(size_t)i] * uv[j][(size_t)i];
    }

    if (eps3) {
        Interval w = Interval::point(0.0, p);
        for (auto& b : beta) w = w.max_with(b.width());
        *eps3 = w;
    }
    (void)N;
    return beta;
}

std::vector<Interval> t_sequence(const std::vector<Interval>& beta,
                                 const Interval& eps2, const Interval& eps3,
                                 const Interval& theta, const Interval& C, int L) {
    (void)theta;
    (void)C;
    const mpfr_prec_t p = eps2.precision();
    if ((int)beta.size() < L)
        throw DomainError("t_sequence: need beta_k for k = 0..L-1");
    // suffix sums: t_m^2 = sum_{k=m-1}^{L-1} beta_k + (L-m+1) eps3 + eps2
    std::vector<Interval> out((size_t)L, Interval(p));
    Interval suffix = eps2;
    for (int m = L; m >= 1; --m) {
        suffix += beta[(size_t)m - 1];
        Interval s2 = suffix + Interval::ratio(L - m + 1, 1, p) * eps3;
        out[(size_t)m - 1] = s2.max_with(Interval::point(0.0, p)).sqrt();
    }
    return out;
}

std::vector<Interval> elementary_symmetric(const std::vector<Interval>& t_seq,
                                           int L, Interval* eps4) {
    if ((int)t_seq.size() < L)
        throw DomainError("elementary_symmetric: need t_1..t_L");
    const mpfr_prec_t p = t_seq.empty() ? 256 : t_seq[0].precision();
    std::vector<Interval> B((size_t)L + 1, Interval::point(0.0, p));
    B[0] = Interval::ratio(1, 1, p);
    for (int m = 0; m < L; ++m)
        for (int k = std::min(m + 1, L); k >= 1; --k)
            B[(size_t)k] += t_seq[(size_t)m] * B[(size_t)k - 1];
    if (eps4) {
        Interval w = Interval::point(0.0, p);
        for (auto& b : B) w = w.max_with(b.width());
        *eps4 = w;
    }
    return B;
}

TailCertificate build_certificate(const SystemSpec& sys, const WeightPlan& plan,
                                  const Interval& box, const Interval& eps1,
                                  int N, int L, unsigned threads) {
    if (L <= N) throw DomainError("build_certificate: L > N required");
    const mpfr_prec_t p = sys.prec;
    TailCertificate cert;
    cert.N = N;
    cert.L = L;
    cert.param_lo = Interval::from_mpfr(box.lo());
    cert.param_hi = Interval::from_mpfr(box.hi());
    cert.eps1 = eps1;
    cert.theta = contraction_ratio(sys, &cert.theta_rule);

    // C = (K max_j sup|w_j| * V)^2 so that ||L q_k||^2 <= C theta^{2k}
    WeightModel wm = make_weight_model(sys, plan, box);
    Interval one = Interval::ratio(1, 1, p);
    Interval maxw = Interval::point(0.0, p);
    for (size_t j = 0; j < sys.branches.size(); ++j)
        maxw = maxw.max_with(weight_circle_sup(sys, wm, (int)j, one));
    Interval Kf = Interval::ratio((long)sys.branches.size(), 1, p);
    cert.C = (Kf * maxw * wm.V).sqr();

    cert.eps2 = tail_eps2(cert.C, cert.theta.sqr(), L);
    cert.beta = basis_image_norms(sys, plan, box, N, L, &cert.eps3, threads);
    // soundness: beta_k must also respect the geometric model; intersect
    for (int k = 0; k < L; ++k) {
        Interval cap = cert.C * cert.theta.sqr().pow_int(k);
        cert.beta[(size_t)k] = cert.beta[(size_t)k].min_with(cap);
    }
    // the beta enclosures already contain the quadrature error, so the
    // (L-m+1) eps3 slack of the point-estimate formulation would double
    // count; pass zero there and report eps3 separately
    cert.t_seq = t_sequence(cert.beta, cert.eps2, Interval::point(0.0, p),
                            cert.theta, cert.C, L);
    cert.B = elementary_symmetric(cert.t_seq, L, &cert.eps4);

    // euler constant c = 1/prod(1 - theta^j) with a bounded truncation
    {
        int J = (int)((double)p * std::log(2.0) / -std::log(cert.theta.hi_d())) + 8;
        Interval prod = one;
        Interval thj = cert.theta;
        for (int j = 1; j <= J; ++j) {
            prod = prod * (one - thj);
            thj = thj * cert.theta;
        }
        // tail: -sum_{j>J} log(1-theta^j) <= theta^{J+1}/((1-theta)^2)
        Interval tail = cert.theta.pow_int(J + 1) / (one - cert.theta).sqr();
        cert.euler_c = (one / prod) * tail.exp();
    }

    // geometric ratio for indices beyond L: t_m <= Cgeo theta^m with
    // Cgeo = sqrt(C/(1-theta^2))/theta; tail blocks sum to c * geo^j with
    // geo = Cgeo * theta^{L+1}
    Interval Cgeo = (cert.C / (one - cert.theta.sqr())).sqrt() / cert.theta;
    cert.geo = Cgeo * cert.theta.pow_int(L + 1);

    // xi = c * sum_{k=0..L} B_k geo^{-k}; the interval DP already carries
    // the beta errors inside B_k, so no separate eps4 slack is added
    if (cert.geo.hi_d() < 1.0 && cert.geo.strictly_positive()) {
        Interval s = Interval::point(0.0, p);
        Interval gk = one;
        for (int k = 0; k <= L; ++k) {
            s += cert.B[(size_t)k] / gk;
            gk = gk * cert.geo;
        }
        cert.xi = cert.euler_c * s;
    } else {
        cert.xi = Interval::point(INFINITY, p);
    }

    cert.notes = "t_m bounds s_m via sum_{k>=m-1} beta_k; ||Lq_k||^2 <= C theta^{2k}; "
                 "eps4 = max B_k width (interval DP carries the beta error)";
    return cert;
}

Interval coefficient_bound(const TailCertificate& cert, int n) {
    const mpfr_prec_t p = cert.prec();
    if (n <= cert.N)
        throw DomainError("coefficient_bound applies to n > N only");
    if (!(cert.geo.hi_d() < 1.0))
        throw CertificateVacuous("theta^L C >= 1: certificate cannot bound tails");
    Interval out = Interval::point(0.0, p);
    if (n <= cert.L) {
        // sum_{k=0}^{n} B_k T_{n-k}, T_0 = 1, T_j <= c geo^j; eps4 is a
        // diagnostic only (the interval DP carries the beta error in B_k)
        for (int k = 0; k <= n; ++k) {
            const Interval& Bk = cert.B[(size_t)k];
            if (k == n)
                out += Bk;
            else
                out += Bk * cert.euler_c * cert.geo.pow_int(n - k);
        }
        return out;
    }
    return cert.xi * cert.geo.pow_int(n);
}

Interval euler_bound(const Interval& C, const Interval& r, int n) {
    const mpfr_prec_t p = C.precision();
    if (!(r.hi_d() < 1.0) || !r.strictly_positive())
        throw DomainError("euler_bound requires 0 < r < 1");
    Interval one = Interval::ratio(1, 1, p);
    Interval num = C.pow_int(n) * r.pow_int((long)n * (n + 1) / 2);
    Interval den = one;
    Interval rj = r;
    for (int j = 1; j <= n; ++j) {
        den = den * (one - rj);
        rj = rj * r;
    }
    return num / den;
}

Interval determinant_remainder(const TailCertificate& cert,
                               const CoefficientSeries& series, const Interval& abs_z) {
    const mpfr_prec_t p = cert.prec();
    Interval q = abs_z * cert.geo;
    if (!(q.hi_d() < 1.0))
        throw RadiusExceeded("determinant_remainder: |z| theta^L C >= 1");
    Interval one = Interval::ratio(1, 1, p);
    Interval R = Interval::ratio(cert.N, 1, p) * abs_z.pow_int(cert.N) * cert.eps1;
    Interval zn = abs_z.pow_int(cert.N + 1);
    for (int n = cert.N + 1; n <= cert.L; ++n) {
        R += coefficient_bound(cert, n) * zn;
        zn = zn * abs_z;
    }
    // beyond L: xi sum_{n>L} (|z| geo)^n = xi q^{L+1}/(1-q)
    R += cert.xi * q.pow_int(cert.L + 1) / (one - q);
    (void)series;
    return R;
}

Interval coefficient_tail_weighted(const TailCertificate& cert, int pow) {
    const mpfr_prec_t p = cert.prec();
    Interval one = Interval::ratio(1, 1, p);
    Interval out = Interval::point(0.0, p);
    for (int n = cert.N + 1; n <= cert.L; ++n) {
        Interval w = one;
        for (int i = 0; i < pow; ++i) w = w * Interval::ratio(n, 1, p);
        out += w * coefficient_bound(cert, n);
    }
    // sum_{n > L} n^pow xi geo^n
    Interval q = cert.geo;
    if (!(q.hi_d() < 1.0))
        throw CertificateVacuous("coefficient_tail_weighted: geo >= 1");
    long M = cert.L + 1;
    Interval qM = q.pow_int(M);
    Interval om = one - q;
    Interval Mi = Interval::ratio(M, 1, p);
    Interval tail(p);
    if (pow == 0) {
        tail = qM / om;
    } else if (pow == 1) {
        tail = qM * (Mi / om + q / om.sqr());
    } else if (pow == 2) {
        tail = qM * (Mi.sqr() / om + (Interval::ratio(2, 1, p) * Mi * q) / om.sqr() +
                     (q + q.sqr()) / (om.sqr() * om));
    } else {
        throw DomainError("coefficient_tail_weighted: pow must be 0, 1 or 2");
    }
    out += cert.xi * tail;
    return out;
}

std::string certificate_to_json(const TailCertificate& cert) {
    nlohmann::json j;
    const int digits = honest_digits(cert.prec());
    auto iv = [&](const Interval& x) {
        return nlohmann::json::array({x.lo_string(digits), x.hi_string(digits)});
    };
    j["theta"] = iv(cert.theta);
    j["C"] = iv(cert.C);
    j["N"] = cert.N;
    j["L"] = cert.L;
    j["eps"] = nlohmann::json::array(
        {iv(cert.eps1), iv(cert.eps2), iv(cert.eps3), iv(cert.eps4)});
    Interval gmax(cert.prec());
    bool have = false;
    for (int n = cert.N + 1; n <= std::min(cert.L, cert.N + 8); ++n) {
        Interval g = coefficient_bound(cert, n);
        gmax = have ? gmax.max_with(g) : g;
        have = true;
    }
    j["gamma_max"] = have ? iv(gmax) : iv(Interval::point(0.0, cert.prec()));
    j["xi"] = iv(cert.xi);
    j["geo"] = iv(cert.geo);
    j["param_box"] = nlohmann::json::array(
        {cert.param_lo.lo_string(digits), cert.param_hi.hi_string(digits)});
    j["theta_rule"] = cert.theta_rule;
    j["notes"] = cert.notes;
    return j.dump();
}

} // namespace valdet
