#include "qcons/errors.hpp"

namespace qcons {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::NonSquare: return "NonSquare";
        case Errc::NegativeWeight: return "NegativeWeight";
        case Errc::SelfLoop: return "SelfLoop";
        case Errc::NonFinite: return "NonFinite";
        case Errc::NotBalanced: return "NotBalanced";
        case Errc::NotConnected: return "NotConnected";
        case Errc::DisconnectedAfterMaxAttempts: return "DisconnectedAfterMaxAttempts";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::TooManyVertices: return "TooManyVertices";
        case Errc::PreconditionViolated: return "PreconditionViolated";
        case Errc::NotInJumpSet: return "NotInJumpSet";
        case Errc::StateInJumpSet: return "StateInJumpSet";
        case Errc::StartNotInClosure: return "StartNotInClosure";
        case Errc::EmptyTrace: return "EmptyTrace";
        case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace qcons
