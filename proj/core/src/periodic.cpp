#include "valdet/periodic.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace valdet {

namespace {

// ---- word admissibility -----------------------------------------------------

bool edge_ok(const SystemSpec& sys, int from, int to) {
    if (!sys.markov) return true;
    return (*sys.markov)[(size_t)from][(size_t)to] != 0;
}

// ---- int64 Moebius matrix fast path ----------------------------------------

struct Mat {
    long long a = 1, b = 0, c = 0, d = 1;
    int det_sign = 1;
};

bool mat_mul(const Mat& m, const Mat& n, Mat& out) {
    long long t1, t2;
    auto mul = [](long long x, long long y, long long& r) {
        return !__builtin_mul_overflow(x, y, &r);
    };
    auto add = [](long long x, long long y, long long& r) {
        return !__builtin_add_overflow(x, y, &r);
    };
    if (!mul(m.a, n.a, t1) || !mul(m.b, n.c, t2) || !add(t1, t2, out.a)) return false;
    if (!mul(m.a, n.b, t1) || !mul(m.b, n.d, t2) || !add(t1, t2, out.b)) return false;
    if (!mul(m.c, n.a, t1) || !mul(m.d, n.c, t2) || !add(t1, t2, out.c)) return false;
    if (!mul(m.c, n.b, t1) || !mul(m.d, n.d, t2) || !add(t1, t2, out.d)) return false;
    out.det_sign = m.det_sign * n.det_sign;
    return true;
}

// Branch matrices exist iff every branch is Moebius with integer entries
// over a single disc; det carried exactly as long long.
bool moebius_matrices(const SystemSpec& sys, std::vector<Mat>& out, std::vector<long long>& dets) {
    out.clear();
    dets.clear();
    if (sys.discs.size() != 1) return false;
    for (const auto& b : sys.branches) {
        const auto* m = std::get_if<MoebiusBranch>(&b.kind);
        if (!m) return false;
        if (m->a.den != 1 || m->b.den != 1 || m->c.den != 1 || m->d.den != 1)
            return false;
        Mat M;
        M.a = m->a.num; M.b = m->b.num; M.c = m->c.num; M.d = m->d.num;
        long long det = M.a * M.d - M.b * M.c;
        if (det == 0) return false;
        M.det_sign = det > 0 ? 1 : -1;
        out.push_back(M);
        dets.push_back(det);
    }
    return true;
}

// Fixed point of the Moebius map with matrix M inside the system disc,
// with its derivative det/(c x + d)^2.
bool moebius_fixed_point(const SystemSpec& sys, const Mat& M, long long det,
                         Interval& fp, Interval& dpsi) {
    const mpfr_prec_t p = sys.prec;
    Interval a = Interval::ratio(M.a, 1, p), b = Interval::ratio(M.b, 1, p);
    Interval c = Interval::ratio(M.c, 1, p), d = Interval::ratio(M.d, 1, p);
    Interval detv = Interval::ratio(det, 1, p);
    const Disc& D = sys.discs[0];
    if (M.c == 0) {
        // affine: x = b/(d-a), psi' = a/d
        Interval den = d - a;
        if (den.contains_zero()) return false;
        fp = b / den;
        dpsi = a / d;
        return true;
    }
    Interval disc = (a - d).sqr() + Interval::ratio(4, 1, p) * b * c;
    if (!disc.strictly_positive()) return false;
    Interval root = disc.sqrt();
    Interval two_c = Interval::ratio(2, 1, p) * c;
    Interval x1 = ((a - d) + root) / two_c;
    Interval x2 = ((a - d) - root) / two_c;
    auto inside = [&](const Interval& x) {
        Interval dist = (CInterval::real(x) - D.center).abs();
        return mpfr_cmp(dist.hi(), D.radius.lo()) <= 0;
    };
    bool in1 = inside(x1), in2 = inside(x2);
    if (in1 == in2) return false;
    fp = in1 ? x1 : x2;
    // slack so that interval-composed images of the enclosure nest inside it
    fp = fp.inflated(std::ldexp(64.0, -(int)p));
    Interval q = c * fp + d;
    dpsi = detv / q.sqr();
    return dpsi.abs().hi_d() < 1.0;
}

// ---- general Newton path ----------------------------------------------------

// psi_word evaluated at the interval x, innermost branch first; optionally
// collects the intermediate enclosures (the orbit points, reversed) and the
// derivative product.
Interval compose_eval(const SystemSpec& sys, const std::vector<uint8_t>& w,
                      const Interval& x, Interval* dpsi,
                      std::vector<Interval>* intermediates) {
    Interval v = x;
    Interval acc = Interval::ratio(1, 1, sys.prec);
    for (size_t k = w.size(); k-- > 0;) {
        const Branch& b = sys.branches[w[k]];
        if (dpsi) acc = acc * branch_derivative_real(sys, b, v);
        v = branch_eval_real(sys, b, v);
        if (intermediates) intermediates->push_back(v);
    }
    if (dpsi) *dpsi = acc;
    return v;
}

// Raw mpfr point evaluation of the branches: the Newton hot loop avoids
// interval temporaries entirely.  Scratch variables are preallocated; one
// instance per thread.
class RawBranchEval {
public:
    explicit RawBranchEval(const SystemSpec& sys) : sys_(sys), p_(sys.prec) {
        mpfr_inits2(p_, t1_, t2_, t3_, num_, den_, pi2_, (mpfr_ptr) nullptr);
        mpfr_const_pi(pi2_, MPFR_RNDN);
        mpfr_mul_ui(pi2_, pi2_, 2, MPFR_RNDN);
    }
    ~RawBranchEval() {
        mpfr_clears(t1_, t2_, t3_, num_, den_, pi2_, (mpfr_ptr) nullptr);
    }
    RawBranchEval(const RawBranchEval&) = delete;

    // out = psi_b(x), dout (optional) = psi_b'(x); out may alias x
    void eval(uint8_t b, mpfr_srcptr x, mpfr_ptr out, mpfr_ptr dout) {
        const Branch& br = sys_.branches[b];
        if (const auto* m = std::get_if<MoebiusBranch>(&br.kind)) {
            // num = a x + b, den = c x + d
            mpfr_mul_si(num_, x, m->a.num, MPFR_RNDN);
            if (m->a.den != 1) mpfr_div_si(num_, num_, m->a.den, MPFR_RNDN);
            mpfr_set_si(t1_, m->b.num, MPFR_RNDN);
            if (m->b.den != 1) mpfr_div_si(t1_, t1_, m->b.den, MPFR_RNDN);
            mpfr_add(num_, num_, t1_, MPFR_RNDN);
            mpfr_mul_si(den_, x, m->c.num, MPFR_RNDN);
            if (m->c.den != 1) mpfr_div_si(den_, den_, m->c.den, MPFR_RNDN);
            mpfr_set_si(t1_, m->d.num, MPFR_RNDN);
            if (m->d.den != 1) mpfr_div_si(t1_, t1_, m->d.den, MPFR_RNDN);
            mpfr_add(den_, den_, t1_, MPFR_RNDN);
            if (dout) {
                // det / den^2
                double det = m->a.d() * m->d.d() - m->b.d() * m->c.d();
                mpfr_sqr(t1_, den_, MPFR_RNDN);
                mpfr_d_div(dout, det, t1_, MPFR_RNDN);
            }
            mpfr_div(out, num_, den_, MPFR_RNDN);
            return;
        }
        if (const auto* a = std::get_if<AffineBranch>(&br.kind)) {
            if (dout) {
                mpfr_set_si(dout, a->slope.num, MPFR_RNDN);
                mpfr_div_si(dout, dout, a->slope.den, MPFR_RNDN);
            }
            mpfr_mul_si(t1_, x, a->slope.num, MPFR_RNDN);
            mpfr_div_si(t1_, t1_, a->slope.den, MPFR_RNDN);
            mpfr_set_si(t2_, a->offset.num, MPFR_RNDN);
            mpfr_div_si(t2_, t2_, a->offset.den, MPFR_RNDN);
            mpfr_add(out, t1_, t2_, MPFR_RNDN);
            return;
        }
        if (const auto* q = std::get_if<Poly2Branch>(&br.kind)) {
            // disc = c1^2 - 4 c2 (c0 - x - shift); psi = (-c1 + s sqrt)/2c2
            double c1 = q->c1.d(), c2 = q->c2.d(), c0 = q->c0.d();
            mpfr_add_si(t1_, x, q->shift, MPFR_RNDN);   // x + shift
            mpfr_d_sub(t1_, c0, t1_, MPFR_RNDN);        // c0 - x - shift
            mpfr_mul_d(t1_, t1_, 4.0 * c2, MPFR_RNDN);
            mpfr_d_sub(t1_, c1 * c1, t1_, MPFR_RNDN);   // disc
            mpfr_sqrt(t2_, t1_, MPFR_RNDN);
            if (q->root_sign < 0) mpfr_neg(t2_, t2_, MPFR_RNDN);
            if (dout) {
                // root_sign / sqrt(disc)
                mpfr_sqrt(t3_, t1_, MPFR_RNDN);
                mpfr_si_div(dout, q->root_sign, t3_, MPFR_RNDN);
            }
            mpfr_sub_d(t2_, t2_, c1, MPFR_RNDN);
            mpfr_div_d(out, t2_, 2.0 * c2, MPFR_RNDN);
            return;
        }
        if (const auto* s = std::get_if<SineBranch>(&br.kind)) {
            // Newton for 2y + eps sin(2 pi y) = x + shift
            double eps = s->eps.mid_d();
            mpfr_add_si(num_, x, s->shift, MPFR_RNDN);  // target u
            mpfr_div_ui(t3_, num_, 2, MPFR_RNDN);       // y0 = u/2
            for (int it = 0; it < 64; ++it) {
                mpfr_mul(t1_, t3_, pi2_, MPFR_RNDN);
                mpfr_sin_cos(t1_, t2_, t1_, MPFR_RNDN);  // sin, cos of 2 pi y
                // F = 2y + eps sin - u
                mpfr_mul_d(t1_, t1_, eps, MPFR_RNDN);
                mpfr_add(t1_, t1_, t3_, MPFR_RNDN);
                mpfr_add(t1_, t1_, t3_, MPFR_RNDN);
                mpfr_sub(t1_, t1_, num_, MPFR_RNDN);
                // F' = 2 + 2 pi eps cos
                mpfr_mul(t2_, t2_, pi2_, MPFR_RNDN);
                mpfr_mul_d(t2_, t2_, eps, MPFR_RNDN);
                mpfr_add_ui(t2_, t2_, 2, MPFR_RNDN);
                mpfr_div(t1_, t1_, t2_, MPFR_RNDN);
                mpfr_sub(t3_, t3_, t1_, MPFR_RNDN);
                mpfr_abs(t1_, t1_, MPFR_RNDN);
                if (mpfr_cmp_d(t1_, std::ldexp(1.0, -(int)p_ + 6)) < 0) break;
            }
            if (dout) {
                // 1 / (2 + 2 pi eps cos(2 pi y))
                mpfr_mul(t1_, t3_, pi2_, MPFR_RNDN);
                mpfr_cos(t1_, t1_, MPFR_RNDN);
                mpfr_mul(t1_, t1_, pi2_, MPFR_RNDN);
                mpfr_mul_d(t1_, t1_, eps, MPFR_RNDN);
                mpfr_add_ui(t1_, t1_, 2, MPFR_RNDN);
                mpfr_si_div(dout, 1, t1_, MPFR_RNDN);
            }
            mpfr_set(out, t3_, MPFR_RNDN);
            return;
        }
        // series branch: fall back to the interval path
        Interval r = branch_eval_real(sys_, br, Interval::from_mpfr(x));
        mpfr_set(out, r.mid().lo(), MPFR_RNDN);
        if (dout) {
            Interval d = branch_derivative_real(sys_, br, Interval::from_mpfr(x));
            mpfr_set(dout, d.mid().lo(), MPFR_RNDN);
        }
    }

private:
    const SystemSpec& sys_;
    mpfr_prec_t p_;
    mpfr_t t1_, t2_, t3_, num_, den_, pi2_;
};

// Plain Newton for psi_w(x) = x from a seed; returns midpoint iterate.
Interval newton_point(const SystemSpec& sys, const std::vector<uint8_t>& w,
                      Interval seed, int budget) {
    const mpfr_prec_t p = sys.prec;
    thread_local std::unique_ptr<RawBranchEval> raw;
    thread_local const SystemSpec* raw_sys = nullptr;
    if (!raw || raw_sys != &sys) {
        raw = std::make_unique<RawBranchEval>(sys);
        raw_sys = &sys;
    }
    mpfr_t x, v, dv, d1, step;
    mpfr_inits2(p, x, v, dv, d1, step, (mpfr_ptr) nullptr);
    mpfr_set(x, seed.mid().lo(), MPFR_RNDN);
    bool done = false;
    for (int it = 0; it < budget && !done; ++it) {
        mpfr_set(v, x, MPFR_RNDN);
        mpfr_set_ui(dv, 1, MPFR_RNDN);
        for (size_t k = w.size(); k-- > 0;) {
            raw->eval(w[k], v, v, d1);
            mpfr_mul(dv, dv, d1, MPFR_RNDN);
        }
        mpfr_sub(v, v, x, MPFR_RNDN);        // F = psi_w(x) - x
        mpfr_sub_ui(dv, dv, 1, MPFR_RNDN);   // F' = psi_w' - 1
        mpfr_div(step, v, dv, MPFR_RNDN);
        mpfr_sub(x, x, step, MPFR_RNDN);
        mpfr_abs(step, step, MPFR_RNDN);
        done = mpfr_cmp_d(step, std::ldexp(1.0, -(int)p + 8)) < 0;
    }
    Interval out = Interval::from_mpfr(x);
    mpfr_clears(x, v, dv, d1, step, (mpfr_ptr) nullptr);
    if (!done)
        throw NoConvergence("fixed point Newton did not converge for a word of length " +
                            std::to_string(w.size()));
    return out;
}

struct RecordData {
    Interval fp, dpsi, sum_pts;
};

RecordData record_from_word(const SystemSpec& sys, const std::vector<uint8_t>& w,
                            const Interval& seed, bool need_sum) {
    const mpfr_prec_t p = sys.prec;
    Interval xhat = newton_point(sys, w, seed, 96);
    // interval Newton verification: X = xhat +- delta
    Interval Fx_d(p);
    Interval fmid = compose_eval(sys, w, xhat, nullptr, nullptr) - xhat;
    double delta = 2 * fmid.mag().hi_d() + std::ldexp(1.0, -(int)p + 10);
    for (int attempt = 0; attempt < 48; ++attempt) {
        Interval X = xhat + Interval::of(-delta, delta, p);
        Interval dX(p);
        compose_eval(sys, w, X, &dX, nullptr);
        Interval denom = dX - Interval::ratio(1, 1, p);
        if (!denom.contains_zero()) {
            Interval N = xhat - fmid / denom;
            if (X.contains(N) && N.width_d() < X.width_d()) {
                // enforce the self-map property: widen until the composed
                // image of the enclosure lands inside it, store the image
                double rel = std::ldexp(8.0 * (double)w.size() + 32, -(int)p);
                for (int k = 0; k < 8; ++k) {
                    Interval E = N.inflated(rel);
                    std::vector<Interval> inter;
                    Interval dpsi(p);
                    Interval img = compose_eval(sys, w, E, &dpsi,
                                                need_sum ? &inter : nullptr);
                    if (E.contains(img)) {
                        RecordData rd;
                        rd.fp = img;
                        rd.dpsi = dpsi;
                        if (need_sum) {
                            Interval s = Interval::point(0.0, p);
                            for (auto& q : inter) s += q;
                            rd.sum_pts = s;
                        } else {
                            rd.sum_pts = Interval(p);
                        }
                        return rd;
                    }
                    rel *= 64;
                }
            }
        }
        delta *= 8;
        if (delta > 1e3) break;
    }
    throw NoConvergence("interval Newton failed to certify a periodic point");
}

// ---- DFS driver -------------------------------------------------------------

struct DfsContext {
    const SystemSpec& sys;
    bool matrices_available;
    std::vector<Mat> mats;
    std::vector<long long> dets;
    bool need_sum;
    int N;

    bool cyclic_ok(const std::vector<uint8_t>& w) const {
        return edge_ok(sys, w.back(), w.front());
    }

    OrbitRecord make_record(const std::vector<uint8_t>& w, const Mat* M,
                            const Interval& seed, Interval* fp_out) const {
        const mpfr_prec_t p = sys.prec;
        OrbitRecord rec;
        rec.word.letters = w;
        if (M) {
            // composed det = product of branch dets, exact as long long
            long long det = 1;
            bool ok_det = true;
            for (uint8_t l : w) {
                if (__builtin_mul_overflow(det, dets[l], &det)) {
                    ok_det = false;
                    break;
                }
            }
            Interval fp(p), dpsi(p);
            if (ok_det && moebius_fixed_point(sys, *M, det, fp, dpsi)) {
                rec.fixed_point = fp;
                rec.orbit_derivative = dpsi;
                if (need_sum) {
                    std::vector<Interval> inter;
                    compose_eval(sys, w, fp, nullptr, &inter);
                    Interval s = Interval::point(0.0, p);
                    for (auto& q : inter) s += q;
                    rec.sum_points = s;
                } else {
                    rec.sum_points = Interval(p);
                }
                if (fp_out) *fp_out = fp;
                return rec;
            }
            // fall through to the Newton path on overflow/ambiguity
        }
        RecordData rd = record_from_word(sys, w, seed, need_sum);
        rec.fixed_point = rd.fp;
        rec.orbit_derivative = rd.dpsi;
        rec.sum_points = rd.sum_pts;
        if (fp_out) *fp_out = rd.fp;
        return rec;
    }
};

// Depth-first enumeration below a fixed prefix.  Words are emitted in
// lexicographic order within each period.  Every admissible word is
// recorded, including the circle-identified boundary pair; trace
// accumulators apply the counting convention themselves.
void dfs(const DfsContext& ctx, std::vector<uint8_t>& w, const Mat& M,
         bool matrix_ok, const Interval& seed, OrbitAccumulator& acc) {
    Interval fp = seed;
    if (ctx.cyclic_ok(w)) {
        OrbitRecord rec = ctx.make_record(w, matrix_ok ? &M : nullptr, seed, &fp);
        acc.on_record((int)w.size(), rec);
    }
    if ((int)w.size() == ctx.N) return;
    for (uint8_t j = 0; j < (uint8_t)ctx.sys.branches.size(); ++j) {
        if (!edge_ok(ctx.sys, w.back(), j)) continue;
        w.push_back(j);
        Mat M2;
        bool ok = matrix_ok && mat_mul(M, ctx.mats[j], M2);
        dfs(ctx, w, M2, ok, fp, acc);
        w.pop_back();
    }
}

} // namespace

std::vector<Word> enumerate_words(const SystemSpec& sys, int n) {
    if (n < 1) throw DomainError("enumerate_words: n >= 1 required");
    std::vector<Word> out;
    std::vector<uint8_t> w;
    std::function<void()> rec = [&]() {
        if ((int)w.size() == n) {
            if (edge_ok(sys, w.back(), w.front())) out.push_back(Word{w});
            return;
        }
        for (uint8_t j = 0; j < (uint8_t)sys.branches.size(); ++j) {
            if (!w.empty() && !edge_ok(sys, w.back(), j)) continue;
            w.push_back(j);
            rec();
            w.pop_back();
        }
    };
    rec();
    return out;
}

OrbitRecord fixed_point(const SystemSpec& sys, const Word& w) {
    if (w.letters.empty()) throw DomainError("fixed_point: empty word");
    for (uint8_t l : w.letters)
        if (l >= sys.branches.size()) throw DomainError("fixed_point: bad branch index");
    DfsContext ctx{sys, false, {}, {}, true, w.length()};
    ctx.matrices_available = moebius_matrices(sys, ctx.mats, ctx.dets);
    Mat M;
    bool matrix_ok = ctx.matrices_available;
    if (matrix_ok) {
        Mat acc = ctx.mats[w.letters[0]];
        for (size_t i = 1; i < w.letters.size() && matrix_ok; ++i) {
            Mat next;
            matrix_ok = mat_mul(acc, ctx.mats[w.letters[i]], next);
            acc = next;
        }
        if (matrix_ok) M = acc;
    }
    Interval seed = sys.discs.empty() ? Interval::point(0.5, sys.prec)
                                      : sys.discs[0].center.re;
    return ctx.make_record(w.letters, matrix_ok ? &M : nullptr, seed, nullptr);
}

void fold_orbits(const SystemSpec& sys, int N, const FoldOptions& opt,
                 const std::function<std::unique_ptr<OrbitAccumulator>()>& make_chunk,
                 OrbitAccumulator& root) {
    if (N < 1) throw DomainError("fold_orbits: N >= 1 required");
    if (sys.is_julia) throw DomainError("fold_orbits: julia systems use their own enumeration");
    DfsContext ctx{sys, false, {}, {}, opt.need_orbit_sum, N};
    ctx.matrices_available = moebius_matrices(sys, ctx.mats, ctx.dets);
    Interval seed = sys.discs[0].center.re;

    // chunk prefixes: all admissible words of length p (p independent of
    // thread count), preceded by the short words handled by the root.
    const size_t ell = sys.branches.size();
    int p = 0;
    size_t count = 1;
    while (p < N && count < 64) {
        count *= ell;
        ++p;
    }
    // The reduction shape depends only on (system, N), never on the thread
    // count: per-period sums are bitwise reproducible across thread counts.
    if (p <= 1) {
        for (uint8_t j = 0; j < (uint8_t)ell; ++j) {
            std::vector<uint8_t> w{j};
            dfs(ctx, w, ctx.matrices_available ? ctx.mats[j] : Mat{},
                ctx.matrices_available, seed, root);
        }
        return;
    }

    // short words (length < p): enumerate sequentially into the root
    {
        DfsContext short_ctx = ctx;
        short_ctx.N = p - 1;
        for (uint8_t j = 0; j < (uint8_t)ell; ++j) {
            std::vector<uint8_t> w{j};
            dfs(short_ctx, w, ctx.matrices_available ? ctx.mats[j] : Mat{},
                ctx.matrices_available, seed, root);
        }
    }

    // chunk prefixes in lexicographic order
    std::vector<std::vector<uint8_t>> chunks;
    {
        std::vector<uint8_t> w;
        std::function<void()> rec = [&]() {
            if ((int)w.size() == p) {
                chunks.push_back(w);
                return;
            }
            for (uint8_t j = 0; j < (uint8_t)ell; ++j) {
                if (!w.empty() && !edge_ok(sys, w.back(), j)) continue;
                w.push_back(j);
                rec();
                w.pop_back();
            }
        };
        rec();
    }

    std::vector<std::unique_ptr<OrbitAccumulator>> accs(chunks.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= chunks.size()) return;
            auto acc = make_chunk();
            // re-derive the prefix matrix and a seed by walking the prefix
            std::vector<uint8_t> w = chunks[i];
            Mat M;
            bool okm = ctx.matrices_available;
            if (okm) {
                Mat accM = ctx.mats[w[0]];
                for (size_t k = 1; k < w.size() && okm; ++k) {
                    Mat nxt;
                    okm = mat_mul(accM, ctx.mats[w[k]], nxt);
                    accM = nxt;
                }
                if (okm) M = accM;
            }
            dfs(ctx, w, M, okm, seed, *acc);
            accs[i] = std::move(acc);
        }
    };
    unsigned nthreads = std::max(1u, opt.threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (auto& a : accs) root.absorb(*a);
}

namespace {

struct TableAccumulator : OrbitAccumulator {
    int N;
    std::vector<std::vector<OrbitRecord>> recs;
    explicit TableAccumulator(int n) : N(n), recs((size_t)n) {}
    void on_record(int period, const OrbitRecord& rec) override {
        recs[(size_t)period - 1].push_back(rec);
    }
    void absorb(OrbitAccumulator& other) override {
        auto& o = static_cast<TableAccumulator&>(other);
        for (size_t i = 0; i < recs.size(); ++i)
            for (auto& r : o.recs[i]) recs[i].push_back(std::move(r));
    }
};

} // namespace

OrbitTable build_orbit_table(const SystemSpec& sys, int N, unsigned threads) {
    TableAccumulator root(N);
    FoldOptions opt;
    opt.threads = threads;
    opt.need_orbit_sum = true;
    fold_orbits(sys, N, opt, [&]() { return std::make_unique<TableAccumulator>(N); },
                root);
    OrbitTable table;
    table.max_period = N;
    table.records = std::move(root.recs);
    // eps1: worst width of the mixing-normalized trace term |psi'|/(1-psi')
    const mpfr_prec_t p = sys.prec;
    Interval worst = Interval::point(0.0, p);
    for (auto& per : table.records) {
        for (auto& r : per) {
            Interval term = r.orbit_derivative.abs() /
                            (Interval::ratio(1, 1, p) - r.orbit_derivative);
            worst = worst.max_with(term.width());
        }
    }
    table.eps1 = worst;
    table.metadata = sys.circle_identified
        ? "word-enumerated; identified endpoint pair counted once in traces"
        : "word-enumerated";
    return table;
}

} // namespace valdet
