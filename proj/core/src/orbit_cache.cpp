#include "valdet/orbit_cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace valdet {

namespace {

constexpr uint32_t kMagic = 0x56444f54;  // "VDOT"
constexpr uint32_t kVersion = 1;

void put_u32(FILE* f, uint32_t v) { fwrite(&v, 4, 1, f); }
void put_u64(FILE* f, uint64_t v) { fwrite(&v, 8, 1, f); }
bool get_u32(FILE* f, uint32_t& v) { return fread(&v, 4, 1, f) == 1; }
bool get_u64(FILE* f, uint64_t& v) { return fread(&v, 8, 1, f) == 1; }

void put_bytes(FILE* f, const std::string& s) {
    put_u32(f, (uint32_t)s.size());
    fwrite(s.data(), 1, s.size(), f);
}

bool get_bytes(FILE* f, std::string& s) {
    uint32_t n;
    if (!get_u32(f, n) || n > (1u << 28)) return false;
    s.resize(n);
    return n == 0 || fread(s.data(), 1, n, f) == n;
}

std::string mpfr_pack(mpfr_srcptr v) {
    if (mpfr_zero_p(v)) return "z";
    mpfr_exp_t e;
    char* s = mpfr_get_str(nullptr, &e, 16, 0, v, MPFR_RNDN);
    std::string out = std::string(s) + "@" + std::to_string((long)e);
    mpfr_free_str(s);
    return out;
}

bool mpfr_unpack(const std::string& s, mpfr_ptr v) {
    if (s == "z") {
        mpfr_set_zero(v, 1);
        return true;
    }
    auto at = s.rfind('@');
    if (at == std::string::npos) return false;
    std::string digits = s.substr(0, at);
    long e = std::stol(s.substr(at + 1));
    // mpfr_set_str with base-16 "0.<digits>@e" semantics: rebuild manually
    std::string lit = digits;
    bool neg = false;
    if (!lit.empty() && lit[0] == '-') {
        neg = true;
        lit = lit.substr(1);
    }
    std::string str = (neg ? "-0." : "0.") + lit + "@" + std::to_string(e);
    return mpfr_set_str(v, str.c_str(), 16, MPFR_RNDN) == 0;
}

void put_interval(FILE* f, const Interval& x) {
    put_bytes(f, mpfr_pack(x.lo()));
    put_bytes(f, mpfr_pack(x.hi()));
}

bool get_interval(FILE* f, mpfr_prec_t prec, Interval& out) {
    std::string lo, hi;
    if (!get_bytes(f, lo) || !get_bytes(f, hi)) return false;
    mpfr_t a, b;
    mpfr_init2(a, prec);
    mpfr_init2(b, prec);
    bool ok = mpfr_unpack(lo, a) && mpfr_unpack(hi, b);
    if (ok) out = Interval::from_mpfr(a, b);
    mpfr_clear(a);
    mpfr_clear(b);
    return ok;
}

} // namespace

uint64_t system_hash(const SystemSpec& sys) {
    // FNV-1a over the canonical config text
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : sys.config_text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string cache_path(const std::string& dir, const SystemSpec& sys, int N) {
    char buf[64];
    snprintf(buf, sizeof buf, "%016llx_n%d_p%ld.vdot",
             (unsigned long long)system_hash(sys), N, (long)sys.prec);
    return dir + "/" + buf;
}

bool save_orbit_table(const std::string& path, const SystemSpec& sys,
                      const OrbitTable& table) {
    FILE* f = fopen(path.c_str(), "wb");
    if (!f) return false;
    put_u32(f, kMagic);
    put_u32(f, kVersion);
    put_u64(f, system_hash(sys));
    put_u64(f, (uint64_t)sys.prec);
    put_u32(f, (uint32_t)table.max_period);
    put_u64(f, (uint64_t)table.total());
    for (int n = 1; n <= table.max_period; ++n) {
        for (const auto& rec : table.period(n)) {
            put_u32(f, (uint32_t)n);
            std::string w((const char*)rec.word.letters.data(),
                          rec.word.letters.size());
            put_bytes(f, w);
            put_interval(f, rec.fixed_point);
            put_interval(f, rec.orbit_derivative);
            put_interval(f, rec.sum_points);
        }
    }
    put_interval(f, table.eps1);
    fclose(f);
    return true;
}

std::optional<OrbitTable> load_orbit_table(const std::string& path,
                                           const SystemSpec& sys, int N) {
    FILE* f = fopen(path.c_str(), "rb");
    if (!f) return std::nullopt;
    auto fail = [&]() {
        fclose(f);
        return std::nullopt;
    };
    uint32_t magic, version, maxp;
    uint64_t hash, prec, count;
    if (!get_u32(f, magic) || magic != kMagic) return fail();
    if (!get_u32(f, version) || version != kVersion) return fail();
    if (!get_u64(f, hash) || hash != system_hash(sys)) return fail();
    if (!get_u64(f, prec) || (mpfr_prec_t)prec != sys.prec) return fail();
    if (!get_u32(f, maxp) || (int)maxp != N) return fail();
    if (!get_u64(f, count)) return fail();
    OrbitTable table;
    table.max_period = N;
    table.records.assign((size_t)N, {});
    for (uint64_t i = 0; i < count; ++i) {
        uint32_t n;
        std::string w;
        if (!get_u32(f, n) || n < 1 || (int)n > N || !get_bytes(f, w)) return fail();
        OrbitRecord rec;
        rec.word.letters.assign(w.begin(), w.end());
        if (!get_interval(f, sys.prec, rec.fixed_point) ||
            !get_interval(f, sys.prec, rec.orbit_derivative) ||
            !get_interval(f, sys.prec, rec.sum_points))
            return fail();
        table.records[(size_t)n - 1].push_back(std::move(rec));
    }
    if (!get_interval(f, sys.prec, table.eps1)) return fail();
    fclose(f);
    table.metadata = sys.circle_identified
        ? "word-enumerated; identified endpoint pair counted once in traces"
        : "word-enumerated";
    return table;
}

OrbitTable build_orbit_table_cached(const SystemSpec& sys, int N, unsigned threads) {
    const char* dir = std::getenv("VALDET_CACHE_DIR");
    if (!dir || !*dir) return build_orbit_table(sys, N, threads);
    std::string path = cache_path(dir, sys, N);
    if (auto t = load_orbit_table(path, sys, N)) return std::move(*t);
    OrbitTable t = build_orbit_table(sys, N, threads);
    save_orbit_table(path, sys, t);
    return t;
}

} // namespace valdet
