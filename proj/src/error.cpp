#include "zic/error.hpp"

namespace zic {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonNormalized: return "NonNormalized";
    case ErrorKind::NegativeDensity: return "NegativeDensity";
    case ErrorKind::FitRejected: return "FitRejected";
    case ErrorKind::PowerViolation: return "PowerViolation";
    case ErrorKind::RecipeRejected: return "RecipeRejected";
    case ErrorKind::NoGaussianMax: return "NoGaussianMax";
    case ErrorKind::NotStationary: return "NotStationary";
    case ErrorKind::HypothesisFailed: return "HypothesisFailed";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::WitnessUnavailable: return "WitnessUnavailable";
    case ErrorKind::NonConvexInput: return "NonConvexInput";
    }
    return "Unknown";
}

}  // namespace zic
