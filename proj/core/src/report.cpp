#include "valdet/report.hpp"

#include <sstream>

namespace valdet {

namespace {

// normalize a decimal like "5.78079...e-1" into (digits, exponent)
bool split_decimal(const std::string& s, std::string& digits, long& exp10) {
    std::string t = s;
    bool neg = false;
    if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
        neg = t[0] == '-';
        t = t.substr(1);
    }
    long e = 0;
    auto epos = t.find_first_of("eE");
    if (epos != std::string::npos) {
        e = std::stol(t.substr(epos + 1));
        t = t.substr(0, epos);
    }
    std::string digs;
    long point_shift = 0;
    bool seen_point = false, leading = true;
    for (char ch : t) {
        if (ch == '.') {
            seen_point = true;
            continue;
        }
        if (!isdigit((unsigned char)ch)) return false;
        if (leading && ch == '0') {
            if (seen_point) point_shift -= 1;
            continue;
        }
        leading = false;
        digs.push_back(ch);
        if (!seen_point) point_shift += 1;
    }
    if (digs.empty()) {
        digits = "0";
        exp10 = 0;
        return true;
    }
    digits = (neg ? "-" : "") + digs;
    exp10 = e + point_shift;  // value = 0.digits * 10^exp10
    return true;
}

} // namespace

int agreed_digits(const std::string& a, const std::string& b) {
    std::string da, db;
    long ea, eb;
    if (!split_decimal(a, da, ea) || !split_decimal(b, db, eb)) return 0;
    if (da == "0" || db == "0") return da == db ? 6 : 0;
    bool nega = da[0] == '-', negb = db[0] == '-';
    if (nega != negb) return 0;
    if (nega) {
        da = da.substr(1);
        db = db.substr(1);
    }
    if (ea != eb) return 0;
    int n = 0;
    for (size_t i = 0; i < std::min(da.size(), db.size()); ++i) {
        if (da[i] != db[i]) break;
        ++n;
    }
    return n;
}

std::string convergence_table_csv(const std::vector<CertifiedValue>& results) {
    if (results.size() < 2)
        throw DomainError("convergence table requires at least two orders");
    std::ostringstream out;
    out << "N,estimate,agreed_digits_vs_previous,certified_width\n";
    const int digits = honest_digits(results[0].estimate.precision());
    std::string prev;
    for (size_t i = 0; i < results.size(); ++i) {
        std::string est =
            mpfr_to_decimal(results[i].estimate.lo(), digits, MPFR_RNDN);
        out << results[i].order_N << "," << est << ",";
        if (i == 0)
            out << "";
        else
            out << agreed_digits(prev, est);
        out << ",";
        if (results[i].uncertified)
            out << "uncertified";
        else
            out << results[i].bounds.width_d();
        out << "\n";
        prev = est;
    }
    return out.str();
}

std::string zeros_csv(const std::vector<ZeroResult>& zeros, mpfr_prec_t prec) {
    std::ostringstream out;
    out << "index,zero_estimate,lower,upper,certified\n";
    const int digits = honest_digits(prec);
    for (size_t i = 0; i < zeros.size(); ++i) {
        const auto& z = zeros[i].value;
        out << (i + 1) << ","
            << mpfr_to_decimal(z.estimate.lo(), digits, MPFR_RNDN) << ","
            << z.bounds.lo_string(digits) << "," << z.bounds.hi_string(digits) << ","
            << (z.uncertified ? "no" : "yes") << "\n";
    }
    return out.str();
}

} // namespace valdet
