#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcons {

enum class Errc {
    NonSquare,
    NegativeWeight,
    SelfLoop,
    NonFinite,
    NotBalanced,
    NotConnected,
    DisconnectedAfterMaxAttempts,
    InvalidArgument,
    TooManyVertices,
    PreconditionViolated,
    NotInJumpSet,
    StateInJumpSet,
    StartNotInClosure,
    EmptyTrace,
    ConfigError,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace qcons
