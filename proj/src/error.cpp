// SPDX-License-Identifier: Apache-2.0
#include "liqgame/error.hpp"

namespace liqgame {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParam: return "InvalidParam";
        case ErrorCode::UnsupportedCase: return "UnsupportedCase";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::DriftNotZero: return "DriftNotZero";
        case ErrorCode::GammaZero: return "GammaZero";
        case ErrorCode::RootFindingFailed: return "RootFindingFailed";
        case ErrorCode::DegenerateEigenbasis: return "DegenerateEigenbasis";
        case ErrorCode::SingularShootingMatrix: return "SingularShootingMatrix";
        case ErrorCode::QuadratureUnderResolved: return "QuadratureUnderResolved";
        case ErrorCode::StableSubspaceDeficient: return "StableSubspaceDeficient";
        case ErrorCode::HorizonMismatch: return "HorizonMismatch";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::NeverReached: return "NeverReached";
        case ErrorCode::IndefiniteHessian: return "IndefiniteHessian";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, std::string detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

Error::Error(ErrorCode code, std::string field, std::string detail)
    : std::runtime_error(std::string(to_string(code)) + "(" + field + "): " + detail),
      code_(code),
      field_(std::move(field)) {}

}  // namespace liqgame
