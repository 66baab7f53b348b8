// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace liqgame {

enum class ErrorCode {
    InvalidParam,
    UnsupportedCase,
    OutOfDomain,
    DriftNotZero,
    GammaZero,
    RootFindingFailed,
    DegenerateEigenbasis,
    SingularShootingMatrix,
    QuadratureUnderResolved,
    StableSubspaceDeficient,
    HorizonMismatch,
    GridMismatch,
    NeverReached,
    IndefiniteHessian,
    ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a code; InvalidParam also names
/// the offending field.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string detail);
    Error(ErrorCode code, std::string field, std::string detail);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    ErrorCode code_;
    std::string field_;
};

}  // namespace liqgame
