#include "valdet/systems.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>

namespace valdet {

namespace {

Interval iv_ratio(const Rational& q, mpfr_prec_t p) { return q.iv(p); }

// ---- forward maps for implicit branch kinds -------------------------------

// T(x) = c2 x^2 + c1 x + c0 - shift for Poly2; 2x + eps sin(2 pi x) - shift
// for Sine.  Complex interval versions.
CInterval sine_forward(const SineBranch& b, const CInterval& x, mpfr_prec_t p) {
    Interval twopi = Interval::pi(p) * Interval::ratio(2, 1, p);
    CInterval arg(x.re * twopi, x.im * twopi);
    // sin(u + iv) = sin u cosh v + i cos u sinh v
    CInterval s(arg.re.sin() * arg.im.cosh(), arg.re.cos() * arg.im.sinh());
    CInterval r = x * Interval::ratio(2, 1, p) + s * b.eps;
    return r - CInterval::real(Interval::ratio(b.shift, 1, p));
}

CInterval sine_forward_dx(const SineBranch& b, const CInterval& x, mpfr_prec_t p) {
    Interval twopi = Interval::pi(p) * Interval::ratio(2, 1, p);
    CInterval arg(x.re * twopi, x.im * twopi);
    CInterval c(arg.re.cos() * arg.im.cosh(), -(arg.re.sin() * arg.im.sinh()));
    return CInterval::real(Interval::ratio(2, 1, p)) + c * (b.eps * twopi);
}

// Point (non-interval) complex Newton solve of sine_forward(x) = z, i.e.
// 2x + eps sin(2 pi x) = z + shift.  Double-precision seed, then mpfr
// refinement; the result carries roundoff-width only and is NOT yet verified.
CInterval sine_solve_point(const SineBranch& b, const CInterval& z, mpfr_prec_t p) {
    double eps = b.eps.mid_d();
    double wr = z.re.mid_d() + (double)b.shift, wi = z.im.mid_d();
    double xr = wr / 2, xi = wi / 2;
    for (int it = 0; it < 64; ++it) {
        double a = 2 * M_PI * xr, bb = 2 * M_PI * xi;
        double sr = std::sin(a) * std::cosh(bb), si = std::cos(a) * std::sinh(bb);
        double fr = 2 * xr + eps * sr - wr, fi = 2 * xi + eps * si - wi;
        double dr = 2 + eps * 2 * M_PI * std::cos(a) * std::cosh(bb);
        double di = -eps * 2 * M_PI * std::sin(a) * std::sinh(bb);
        double dn = dr * dr + di * di;
        double stepr = (fr * dr + fi * di) / dn, stepi = (fi * dr - fr * di) / dn;
        xr -= stepr; xi -= stepi;
        if (std::abs(stepr) + std::abs(stepi) < 1e-15) break;
    }
    CInterval x = CInterval::point(xr, xi, p);
    CInterval zt(z.re.mid(), z.im.mid());
    for (int it = 0; it < 64; ++it) {
        CInterval f = sine_forward(b, x, p) - zt;
        CInterval df = sine_forward_dx(b, x, p);
        CInterval step = f / df;
        x = CInterval(x.re.mid() - step.re.mid(), x.im.mid() - step.im.mid());
        if (step.abs().hi_d() < std::ldexp(1.0, -(int)p + 6)) break;
    }
    return x;
}

} // namespace

// ---- branch evaluation -----------------------------------------------------

namespace {

struct EvalVisitor {
    const SystemSpec& sys;
    const CInterval& z;
    bool deriv;

    CInterval operator()(const MoebiusBranch& m) const {
        const mpfr_prec_t p = z.precision();
        CInterval den = z * iv_ratio(m.c, p) + CInterval::real(iv_ratio(m.d, p));
        if (deriv) {
            Interval det = iv_ratio(m.a, p) * iv_ratio(m.d, p) -
                           iv_ratio(m.b, p) * iv_ratio(m.c, p);
            CInterval d2 = den.sqr();
            return CInterval::real(det) / d2;
        }
        CInterval num = z * iv_ratio(m.a, p) + CInterval::real(iv_ratio(m.b, p));
        return num / den;
    }

    CInterval operator()(const AffineBranch& a) const {
        const mpfr_prec_t p = z.precision();
        if (deriv) return CInterval::real(iv_ratio(a.slope, p));
        return z * iv_ratio(a.slope, p) + CInterval::real(iv_ratio(a.offset, p));
    }

    CInterval operator()(const Poly2Branch& q) const {
        const mpfr_prec_t p = z.precision();
        // disc(w) = c1^2 - 4 c2 (c0 - w - shift)
        Interval c1 = iv_ratio(q.c1, p), c2 = iv_ratio(q.c2, p), c0 = iv_ratio(q.c0, p);
        CInterval disc = CInterval::real(c1.sqr()) -
                         (CInterval::real(c0) - z -
                          CInterval::real(Interval::ratio(q.shift, 1, p))) *
                             (Interval::ratio(4, 1, p) * c2);
        CInterval root = disc.sqrt();
        if (deriv) {
            // psi'(w) = root_sign / sqrt(disc)
            return CInterval::real(Interval::ratio(q.root_sign, 1, p)) / root;
        }
        if (q.root_sign < 0) root = -root;
        return (CInterval::real(-c1) + root) / CInterval::real(Interval::ratio(2, 1, p) * c2);
    }

    CInterval operator()(const SineBranch& s) const {
        const mpfr_prec_t p = z.precision();
        CInterval xhat = sine_solve_point(s, z, p);
        // verified enclosure: X = xhat +- delta, N(X) = xhat - F(xhat)/F'(X);
        // N(X) inside int(X) certifies a unique preimage for every z in the
        // argument rectangle.
        double span = std::max(z.re.width_d(), z.im.width_d());
        double delta = std::max(std::ldexp(1.0, -(int)p / 2), span);
        for (int attempt = 0; attempt < 48; ++attempt) {
            Interval dr = Interval::of(-delta, delta, p);
            CInterval X(xhat.re.mid() + dr, xhat.im.mid() + dr);
            CInterval Fx = sine_forward(s, CInterval(xhat.re.mid(), xhat.im.mid()), p) - z;
            CInterval dF = sine_forward_dx(s, X, p);
            CInterval N = CInterval(xhat.re.mid(), xhat.im.mid()) - Fx / dF;
            if (X.re.contains(N.re) && X.im.contains(N.im) &&
                N.re.width_d() < X.re.width_d() && N.im.width_d() < X.im.width_d()) {
                if (deriv)
                    return CInterval::real(Interval::ratio(1, 1, p)) /
                           sine_forward_dx(s, N, p);
                return N;
            }
            delta *= 8;
            if (delta > 1.0) break;
        }
        throw NoConvergence("sine branch: interval Newton did not certify");
    }

    CInterval operator()(const SeriesBranch& sb) const {
        const mpfr_prec_t p = z.precision();
        CInterval u = z - sb.center;
        Interval ur = u.abs();
        if (!ur.definitely_less(sb.domain_radius))
            throw OutsideDomain("series branch: argument outside certified radius");
        CInterval acc(p);
        if (deriv) {
            for (size_t j = sb.coeff.size(); j-- > 1;) {
                acc = acc * u + sb.coeff[j] * Interval::ratio((long)j, 1, p);
            }
            Interval ball = Interval::of(-1, 1, p) * sb.deriv_tail;
            return acc + CInterval(ball, ball);
        }
        for (size_t j = sb.coeff.size(); j-- > 0;) {
            acc = acc * u + sb.coeff[j];
        }
        Interval ball = Interval::of(-1, 1, p) * sb.value_tail;
        return acc + CInterval(ball, ball);
    }
};

} // namespace

// Hygiene check only: pole/cut/Newton certification inside the evaluators is
// what actually guards validity, so allow slack beyond the padded disc (arc
// rectangles used during verification overhang the circle slightly).
static void check_domain(const SystemSpec& sys, const Branch& b, const CInterval& z) {
    if (sys.discs.empty()) return;
    const Disc& D = sys.discs[(size_t)b.domain_disc];
    Interval dist = (z - D.center).abs();
    Interval lim = D.radius * Interval::point(1.0 + 2.0 * sys.pad, sys.prec);
    if (mpfr_cmp(dist.lo(), lim.hi()) > 0)
        throw OutsideDomain("branch argument outside the padded domain disc");
}

CInterval branch_eval(const SystemSpec& sys, const Branch& b, const CInterval& z) {
    check_domain(sys, b, z);
    return std::visit(EvalVisitor{sys, z, false}, b.kind);
}

CInterval branch_derivative(const SystemSpec& sys, const Branch& b, const CInterval& z) {
    check_domain(sys, b, z);
    return std::visit(EvalVisitor{sys, z, true}, b.kind);
}

namespace {

// Real-axis fast path: Moebius and Poly2 branches are monotone wherever the
// closed forms are defined (pole excluded / discriminant positive), so the
// image of an interval is the hull of its endpoint images.  This avoids the
// dependency widening of the rectangle division.
template <class F>
Interval monotone_hull(const F& f, const Interval& x) {
    Interval a = f(Interval::from_mpfr(x.lo()));
    Interval bnd = f(Interval::from_mpfr(x.hi()));
    return Interval::hull(a, bnd);
}

const MoebiusBranch* moebius_monotone(const SystemSpec& sys, const Branch& b,
                                      const Interval& x) {
    const auto* m = std::get_if<MoebiusBranch>(&b.kind);
    if (!m) return nullptr;
    Interval den = m->c.iv(sys.prec) * x + m->d.iv(sys.prec);
    return den.contains_zero() ? nullptr : m;
}

const Poly2Branch* poly2_monotone(const SystemSpec& sys, const Branch& b,
                                  const Interval& x) {
    const auto* q = std::get_if<Poly2Branch>(&b.kind);
    if (!q) return nullptr;
    const mpfr_prec_t p = sys.prec;
    Interval disc = q->c1.iv(p).sqr() -
                    Interval::ratio(4, 1, p) * q->c2.iv(p) *
                        (q->c0.iv(p) - x - Interval::ratio(q->shift, 1, p));
    return disc.strictly_positive() ? q : nullptr;
}

} // namespace

Interval branch_eval_real(const SystemSpec& sys, const Branch& b, const Interval& x) {
    if (moebius_monotone(sys, b, x) || poly2_monotone(sys, b, x)) {
        return monotone_hull(
            [&](const Interval& t) {
                return std::visit(EvalVisitor{sys, CInterval::real(t), false}, b.kind).re;
            },
            x);
    }
    return branch_eval(sys, b, CInterval::real(x)).re;
}

Interval branch_derivative_real(const SystemSpec& sys, const Branch& b, const Interval& x) {
    if (moebius_monotone(sys, b, x) || poly2_monotone(sys, b, x)) {
        return monotone_hull(
            [&](const Interval& t) {
                return std::visit(EvalVisitor{sys, CInterval::real(t), true}, b.kind).re;
            },
            x);
    }
    return branch_derivative(sys, b, CInterval::real(x)).re;
}

void branch_eval_point(const SystemSpec& sys, const Branch& b, mpfr_srcptr x,
                       mpfr_ptr out) {
    Interval r = branch_eval_real(sys, b, Interval::from_mpfr(x));
    mpfr_set(out, r.mid().lo(), MPFR_RNDN);
}

// ---- circle sup / disc verification ----------------------------------------

Interval circle_sup(const SystemSpec& sys, int di, const Interval& kappa,
                    const std::function<Interval(const CInterval&)>& absf,
                    int init_arcs, int max_arcs, double rel_tol) {
    const mpfr_prec_t p = sys.prec;
    const Disc& D = sys.discs[(size_t)di];
    Interval rad = D.radius * kappa;
    Interval twopi = Interval::pi(p) * Interval::ratio(2, 1, p);

    struct Arc { double t0, t1; Interval val; bool failed; };
    // arcs too wide for a certified evaluation get split with priority
    auto eval_arc = [&](double t0, double t1) -> Arc {
        Interval th = Interval::of(t0, t1, p) * twopi;
        CInterval zb = D.center + CInterval(th.cos() * rad, th.sin() * rad);
        try {
            return Arc{t0, t1, absf(zb), false};
        } catch (const Error&) {
            return Arc{t0, t1, Interval::point(1e300, p), true};
        }
    };
    std::vector<Arc> arcs;
    arcs.reserve((size_t)max_arcs);
    for (int i = 0; i < init_arcs; ++i) {
        arcs.push_back(eval_arc((double)i / init_arcs, (double)(i + 1) / init_arcs));
    }
    for (;;) {
        double best_hi = -1e300, best_lo = -1e300;
        size_t worst = 0;
        for (size_t i = 0; i < arcs.size(); ++i) {
            double h = arcs[i].val.hi_d();
            if (h > best_hi) { best_hi = h; worst = i; }
            best_lo = std::max(best_lo, arcs[i].val.lo_d());
        }
        if ((int)arcs.size() >= max_arcs) break;
        if (best_hi - best_lo <= rel_tol * std::abs(best_hi) + 1e-300 &&
            !arcs[worst].failed)
            break;
        Arc a = arcs[worst];
        double tm = (a.t0 + a.t1) / 2;
        arcs[worst] = eval_arc(a.t0, tm);
        arcs.push_back(eval_arc(tm, a.t1));
    }
    for (auto& a : arcs)
        if (a.failed)
            throw NoConvergence("circle_sup: certified evaluation failed on an arc");
    // sup lies between the largest lower bound and the largest upper bound
    Interval out = arcs[0].val;
    for (size_t i = 1; i < arcs.size(); ++i) out = out.max_with(arcs[i].val);
    return out;
}

Interval branch_disc_ratio(const SystemSpec& sys, const Branch& b) {
    const mpfr_prec_t p = sys.prec;
    const Disc& tgt = sys.discs[(size_t)b.target_disc];
    auto absf = [&](const CInterval& z) -> Interval {
        CInterval img = branch_eval(sys, b, z);
        return (img - tgt.center).abs() / tgt.radius;
    };
    return circle_sup(sys, b.domain_disc, Interval::ratio(1, 1, p), absf);
}

Interval contraction_ratio(const SystemSpec& sys, std::string* rule_used) {
    const mpfr_prec_t p = sys.prec;
    if (sys.Theta.empty())
        throw DiscNotInvariant("system has no verified contraction data");
    Interval th = sys.Theta[0];
    for (const auto& t : sys.Theta) th = th.max_with(t);
    size_t K = sys.discs.size();
    if (sys.bernoulli || K == 1) {
        if (rule_used) *rule_used = "bernoulli-max";
        return th;
    }
    if (rule_used) *rule_used = "kth-root";
    // max_i Theta_i^{1/K}
    Interval ik = Interval::ratio(1, (long)K, p);
    return th.pow(ik);
}

// ---- load & verify ----------------------------------------------------------

namespace {

void verify_system(SystemSpec& sys) {
    const mpfr_prec_t p = sys.prec;
    if (sys.is_julia) return;  // periodic points of the forward map; no discs
    if (sys.branches.empty()) throw ParseError("system has no branches");
    if (sys.discs.empty()) throw ParseError("system has no discs");
    if (sys.bernoulli && sys.discs.size() != 1)
        throw ParseError("bernoulli system must have exactly one disc");
    if (sys.markov) {
        auto& A = *sys.markov;
        if (A.size() != sys.branches.size())
            throw ParseError("markov matrix size mismatch");
        for (auto& row : A)
            if (row.size() != sys.branches.size())
                throw ParseError("markov matrix row size mismatch");
    }

    // pad analyticity check happens implicitly: every Theta evaluation and
    // weight-norm evaluation below calls certified branch evaluation, which
    // fails if the branch cannot be certified there.  Check on the padded
    // circle explicitly so later quadrature is safe.
    Interval padk = Interval::point(1.0 + sys.pad, p);
    for (auto& b : sys.branches) {
        auto absf = [&](const CInterval& z) -> Interval {
            return branch_eval(sys, b, z).abs();
        };
        (void)circle_sup(sys, b.domain_disc, padk, absf, 32, 256, 0.5);
    }

    // Theta_i: verified strict disc contraction
    sys.Theta.clear();
    for (auto& b : sys.branches) {
        Interval th = branch_disc_ratio(sys, b);
        if (!(th.hi_d() < 1.0))
            throw DiscNotInvariant("branch image not strictly inside target disc (Theta >= 1)");
        sys.Theta.push_back(th);
    }

    // Expansion on the real fragment: |psi'| < 1 where the dynamics lives.
    // The fragment is the hull of the branch images of the disc's real
    // chord (it contains the invariant set).
    for (size_t di = 0; di < sys.discs.size(); ++di) {
        const Disc& D = sys.discs[di];
        double cx = D.center.re.mid_d(), r = D.radius.mid_d();
        const int M = 16;
        bool have = false;
        Interval frag(p);
        for (auto& b : sys.branches) {
            if ((size_t)b.domain_disc != di) continue;
            for (int i = 0; i < M; ++i) {
                Interval x = Interval::of(cx - r + 2 * r * i / M,
                                          cx - r + 2 * r * (i + 1) / M, p);
                Interval img = branch_eval_real(sys, b, x);
                frag = have ? Interval::hull(frag, img) : img;
                have = true;
            }
        }
        if (!have) continue;
        for (auto& b : sys.branches) {
            if ((size_t)b.domain_disc != di) continue;
            const int K = 32;
            double flo = frag.lo_d(), fhi = frag.hi_d();
            for (int i = 0; i < K; ++i) {
                Interval x = Interval::of(flo + (fhi - flo) * i / K,
                                          flo + (fhi - flo) * (i + 1) / K, p);
                Interval d = branch_derivative_real(sys, b, x).abs();
                if (!(d.hi_d() < 1.0))
                    throw ExpansionViolation(
                        "forward derivative modulus <= 1 on the real fragment");
            }
        }
    }
}

// Candidate disc radii for the doubling family.  For eps != 0 the inverse
// branches have complex critical values at distance ~crit from the center,
// so the disc must stay below that; smaller radii worsen the contraction
// ratio, so try larger ones first and keep the first that verifies.
std::vector<double> doubling_radius_candidates(double eps) {
    if (eps == 0.0) return {1.5};
    double ae = std::fabs(eps);
    double w = 1.0 / (M_PI * ae);
    double v = std::acosh(w);
    double imag = v / M_PI - std::sqrt(std::max(1.0 / (M_PI * M_PI) - ae * ae, 0.0));
    double crit = std::hypot(0.5, imag);
    std::vector<double> out;
    for (double f : {0.85, 0.78, 0.72, 0.65, 0.58}) {
        double r = std::min(1.5, f * crit);
        if (r > 0.52) out.push_back(r);
    }
    if (out.empty()) out.push_back(0.55);
    return out;
}

struct ConfigMap {
    std::map<std::string, std::string> kv;
    std::string get(const std::string& k, const std::string& dflt = "") const {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    }
    bool has(const std::string& k) const { return kv.count(k) > 0; }
};

ConfigMap parse_config(const std::string& text) {
    ConfigMap m;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        // strip comments and whitespace
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto notspace = [](unsigned char c) { return !std::isspace(c); };
        line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
        line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line without '=': " + line);
        std::string k = line.substr(0, eq), v = line.substr(eq + 1);
        while (!k.empty() && std::isspace((unsigned char)k.back())) k.pop_back();
        while (!v.empty() && std::isspace((unsigned char)v.front())) v.erase(v.begin());
        if (m.kv.count(k)) throw ParseError("duplicate config key: " + k);
        m.kv[k] = v;
    }
    return m;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::string t = s;
    if (!t.empty() && t.front() == '[') t = t.substr(1);
    if (!t.empty() && t.back() == ']') t.pop_back();
    std::vector<int> out;
    std::istringstream in(t);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    return out;
}

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational{std::stol(s), 1};
    return Rational{std::stol(s.substr(0, slash)), std::stol(s.substr(slash + 1))};
}

// "<re>+<im>i" or "<re>-<im>i" or plain "<re>"
std::pair<std::string, std::string> parse_complex_literal(const std::string& s) {
    std::string t = s;
    size_t pos = std::string::npos;
    for (size_t i = 1; i < t.size(); ++i) {
        if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
            pos = i;
        }
    }
    if (pos == std::string::npos || t.back() != 'i') return {t, "0"};
    std::string re = t.substr(0, pos);
    std::string im = t.substr(pos, t.size() - pos - 1);
    if (im == "+" ) im = "1";
    if (im == "-") im = "-1";
    return {re, im};
}

SystemSpec build_from_config(const ConfigMap& cfg, const std::string& text,
                             mpfr_prec_t prec) {
    static const std::vector<std::string> known_prefixes = {
        "system", "eps", "digits", "c", "disc.center", "disc.radius"};
    for (auto& [k, v] : cfg.kv) {
        (void)v;
        bool ok = false;
        for (auto& kp : known_prefixes)
            if (k == kp) ok = true;
        if (k.rfind("branch.", 0) == 0 && k.find(".moebius") != std::string::npos) ok = true;
        if (k.rfind("markov.row.", 0) == 0) ok = true;
        if (!ok) throw ParseError("unknown config key: " + k);
    }

    SystemSpec sys;
    sys.prec = prec;
    sys.config_text = text;
    std::string name = cfg.get("system", "custom");
    sys.name = name;

    auto disc_from_cfg = [&](double dflt_c, double dflt_r) {
        double c = cfg.has("disc.center") ? std::stod(cfg.get("disc.center")) : dflt_c;
        double r = cfg.has("disc.radius") ? std::stod(cfg.get("disc.radius")) : dflt_r;
        Disc D;
        D.center = CInterval::real(Interval::from_decimal(
            cfg.has("disc.center") ? cfg.get("disc.center") : std::to_string(dflt_c), prec));
        D.radius = Interval::from_decimal(
            cfg.has("disc.radius") ? cfg.get("disc.radius") : std::to_string(dflt_r), prec);
        (void)c; (void)r;
        return D;
    };

    if (name == "e2" || name == "cf_digits") {
        std::vector<int> F = name == "e2" ? std::vector<int>{1, 2}
                                          : parse_int_list(cfg.get("digits"));
        if (F.empty()) throw ParseError("cf_digits requires digits=[...]");
        for (int i : F) {
            if (i < 1) throw ParseError("cf digits must be >= 1");
            Branch b;
            b.kind = MoebiusBranch{Rational{0, 1}, Rational{1, 1}, Rational{1, 1},
                                   Rational{(long)i, 1}};
            sys.branches.push_back(b);
        }
        sys.discs.push_back(disc_from_cfg(1.0, 1.5));
    } else if (name == "lanford") {
        for (long k = 0; k <= 1; ++k) {
            Branch b;
            b.kind = Poly2Branch{Rational{-1, 2}, Rational{5, 2}, Rational{0, 1}, k, 1};
            sys.branches.push_back(b);
        }
        sys.discs.push_back(disc_from_cfg(0.5, 0.95));
    } else if (name == "doubling" || name == "doubling_eps") {
        std::string eps_str = cfg.get("eps", "0");
        if (name == "doubling" && !cfg.has("eps")) eps_str = "0";
        Interval eps = Interval::from_decimal(eps_str, prec);
        Interval bound = Interval::ratio(1, 4, prec) / Interval::pi(prec);
        if (!eps.mag().definitely_less(bound))
            throw ParseError("doubling_eps requires |eps| < 1/(4 pi)");
        for (long k = 0; k <= 1; ++k) {
            Branch b;
            b.kind = SineBranch{eps, k};
            sys.branches.push_back(b);
        }
        sys.circle_identified = true;
        if (cfg.has("markov.row.0"))
            throw ParseError("doubling systems are full-shift; markov not supported");
        if (cfg.has("disc.radius")) {
            sys.discs.push_back(disc_from_cfg(0.5, 1.5));
        } else {
            // adaptive default radius: first candidate that verifies
            auto cands = doubling_radius_candidates(eps.mid_d());
            Disc D;
            D.center = CInterval::real(Interval::from_decimal(
                cfg.has("disc.center") ? cfg.get("disc.center") : "0.5", prec));
            sys.discs.push_back(D);
            for (size_t i = 0; i < cands.size(); ++i) {
                sys.discs[0].radius = Interval::from_decimal(std::to_string(cands[i]), prec);
                try {
                    verify_system(sys);
                    return sys;
                } catch (const Error&) {
                    if (i + 1 == cands.size()) throw;
                }
            }
        }
    } else if (name == "affine_cantor") {
        Branch b1, b2;
        b1.kind = AffineBranch{Rational{1, 3}, Rational{0, 1}};
        b2.kind = AffineBranch{Rational{1, 3}, Rational{2, 3}};
        sys.branches.push_back(b1);
        sys.branches.push_back(b2);
        sys.discs.push_back(disc_from_cfg(0.5, 1.0));
    } else if (name == "quadratic_julia") {
        if (!cfg.has("c")) throw ParseError("quadratic_julia requires c=<re>+<im>i");
        auto [re, im] = parse_complex_literal(cfg.get("c"));
        sys.is_julia = true;
        sys.julia_c = CInterval(Interval::from_decimal(re, prec),
                                Interval::from_decimal(im, prec));
        Interval mag = sys.julia_c.abs();
        if (!(mag.hi_d() <= 0.2))
            throw ParseError("quadratic_julia guard: |c| <= 0.2 required");
        return sys;  // no disc machinery
    } else if (name == "custom") {
        // explicit moebius branches
        for (int k = 0;; ++k) {
            std::string key = "branch." + std::to_string(k) + ".moebius";
            if (!cfg.has(key)) break;
            std::istringstream in(cfg.get(key));
            std::string tok;
            std::vector<Rational> q;
            while (std::getline(in, tok, ',')) q.push_back(parse_rational(tok));
            if (q.size() != 4) throw ParseError("moebius branch needs a,b,c,d");
            Branch b;
            b.kind = MoebiusBranch{q[0], q[1], q[2], q[3]};
            sys.branches.push_back(b);
        }
        if (sys.branches.empty())
            throw ParseError("custom system needs branch.<k>.moebius entries");
        if (!cfg.has("disc.center") || !cfg.has("disc.radius"))
            throw ParseError("custom system needs disc.center and disc.radius");
        sys.discs.push_back(disc_from_cfg(0.0, 0.0));
    } else {
        throw ParseError("unknown system: " + name);
    }

    // optional markov matrix
    if (cfg.has("markov.row.0")) {
        std::vector<std::vector<int>> A;
        for (size_t i = 0; i < sys.branches.size(); ++i) {
            std::string key = "markov.row." + std::to_string(i);
            if (!cfg.has(key)) throw ParseError("missing " + key);
            A.push_back(parse_int_list(cfg.get(key)));
        }
        sys.markov = A;
        sys.bernoulli = false;
    }

    verify_system(sys);
    return sys;
}

} // namespace

SystemSpec load_system(const std::string& config_text, mpfr_prec_t prec) {
    return build_from_config(parse_config(config_text), config_text, prec);
}

SystemSpec load_builtin(const std::string& name, mpfr_prec_t prec) {
    return load_system("system=" + name + "\n", prec);
}

} // namespace valdet
