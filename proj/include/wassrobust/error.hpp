#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wassrobust {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (dimensions, hyperparameters, model kind).
struct ConfigError : Error {
    using Error::Error;
};

/// Input data failed validation (weights, ragged rows, label ranges).
struct ValidationError : Error {
    using Error::Error;
};

/// An iterative solver left its trusted region.
struct InstabilityError : Error {
    using Error::Error;
};

/// Should-not-happen failures inside exact solvers.
struct InternalError : Error {
    using Error::Error;
};

/// Federated message exchange violated the round contract.
struct ProtocolError : Error {
    using Error::Error;
};

/// Malformed input files.
struct FormatError : Error {
    using Error::Error;
};

/// Files that cannot be opened, read or written.
struct IoError : Error {
    using Error::Error;
};

/// Runs fn, re-throwing solver errors with `suffix` appended to the message
/// while keeping their type.
template <typename Fn>
auto with_context(std::string_view suffix, Fn&& fn) {
    try {
        return fn();
    } catch (const InstabilityError& e) {
        throw InstabilityError(std::string(e.what()) + std::string(suffix));
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + std::string(suffix));
    }
}

inline std::string sample_context(std::size_t index) { return " [sample " + std::to_string(index) + "]"; }

}  // namespace wassrobust
