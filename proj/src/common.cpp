#include "opspread/common.hpp"

namespace opspread {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidDimension: return "invalid-dimension";
        case ErrorKind::BudgetExceeded: return "budget-exceeded";
        case ErrorKind::InsufficientWindow: return "insufficient-window";
        case ErrorKind::SingularResolvent: return "singular-resolvent";
        case ErrorKind::DivergentSeries: return "divergent-series";
        case ErrorKind::InvalidConfig: return "invalid-config";
        case ErrorKind::MissingSeries: return "missing-series";
        case ErrorKind::OutOfRange: return "out-of-range";
        case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    }
    return "unknown";
}

std::uint64_t ipow(std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > (std::uint64_t(1) << 62) / base)
            throw Error(ErrorKind::BudgetExceeded, "dimension overflow");
        r *= base;
    }
    return r;
}

}  // namespace opspread
