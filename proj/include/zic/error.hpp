#ifndef ZIC_ERROR_HPP
#define ZIC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace zic {

enum class ErrorKind {
    InvalidArgument,
    NonNormalized,
    NegativeDensity,
    FitRejected,
    PowerViolation,
    RecipeRejected,
    NoGaussianMax,
    NotStationary,
    HypothesisFailed,
    DimensionMismatch,
    GridTooSmall,
    NotApplicable,
    WitnessUnavailable,
    NonConvexInput,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// HypothesisFailed carries the eigenvalue that broke the bound.
class HypothesisError : public Error {
public:
    HypothesisError(double eigenvalue, const std::string& what)
        : Error(ErrorKind::HypothesisFailed, what), eigenvalue_(eigenvalue) {}
    double eigenvalue() const noexcept { return eigenvalue_; }

private:
    double eigenvalue_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace zic

#endif
