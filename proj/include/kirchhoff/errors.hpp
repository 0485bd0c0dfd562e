#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kirchhoff {

enum class ErrorCode {
    InvalidModel,
    IntegrationBlowup,
    NoBracket,
    ShootingFailed,
    DimensionError,
    HypothesisError,
    NotARoot,
    GridError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidModel: return "INVALID_MODEL";
        case ErrorCode::IntegrationBlowup: return "INTEGRATION_BLOWUP";
        case ErrorCode::NoBracket: return "NO_BRACKET";
        case ErrorCode::ShootingFailed: return "SHOOTING_FAILED";
        case ErrorCode::DimensionError: return "DIMENSION_ERROR";
        case ErrorCode::HypothesisError: return "HYPOTHESIS_ERROR";
        case ErrorCode::NotARoot: return "NOT_A_ROOT";
        case ErrorCode::GridError: return "GRID_ERROR";
    }
    return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised when the radial integrator produces a non-finite state.
class IntegrationBlowup : public Error {
public:
    IntegrationBlowup(double last_r, const std::string& what)
        : Error(ErrorCode::IntegrationBlowup, what), last_r_(last_r) {}

    double last_valid_radius() const noexcept { return last_r_; }

private:
    double last_r_;
};

}  // namespace kirchhoff
