#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace opspread {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorKind {
    InvalidDimension,
    BudgetExceeded,
    InsufficientWindow,
    SingularResolvent,
    DivergentSeries,
    InvalidConfig,
    MissingSeries,
    OutOfRange,
    DimensionMismatch,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Integer power for dimensions; throws on overflow past 2^62.
std::uint64_t ipow(std::uint64_t base, int exp);

}  // namespace opspread
