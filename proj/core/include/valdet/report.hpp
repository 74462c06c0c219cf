#pragma once

#include <string>
#include <vector>

#include "valdet/quantities.hpp"

namespace valdet {

// CSV rows (N, estimate, agreed-digits-vs-previous, certified-width) for a
// sweep of orders.  Requires at least two entries.
std::string convergence_table_csv(const std::vector<CertifiedValue>& results);

// Number of agreed leading significant digits between two decimal values.
int agreed_digits(const std::string& a, const std::string& b);

std::string zeros_csv(const std::vector<ZeroResult>& zeros, mpfr_prec_t prec);

} // namespace valdet
