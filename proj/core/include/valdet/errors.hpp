#pragma once

#include <stdexcept>
#include <string>

namespace valdet {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonPositiveArgument : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };

struct ParseError : Error { using Error::Error; };
struct DiscNotInvariant : Error { using Error::Error; };
struct ExpansionViolation : Error { using Error::Error; };
struct OutsideDomain : Error { using Error::Error; };

struct NoConvergence : Error { using Error::Error; };
struct DegenerateDenominator : Error { using Error::Error; };

struct QuadratureBudgetExceeded : Error { using Error::Error; };
struct CertificateVacuous : Error { using Error::Error; };
struct RadiusExceeded : Error { using Error::Error; };

struct DenominatorContainsZero : Error { using Error::Error; };
struct NoSignChange : Error { using Error::Error; };
struct PrecisionExhausted : Error { using Error::Error; };
struct NoSecondZero : Error { using Error::Error; };
struct RootEnumerationIncomplete : Error { using Error::Error; };

} // namespace valdet
