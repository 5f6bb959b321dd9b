#pragma once

#include <stdexcept>

namespace banditlab {

/// Invalid experiment configuration, including policy/prior mismatches.
/// The command-line tool maps this to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A diagnostic assertion failed (e.g. a violated regret-decomposition
/// bound). The command-line tool maps this to exit code 2.
struct DiagnosticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File read/write failures, malformed table or CSV files, and header
/// mismatches. The command-line tool maps this to exit code 3.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numeric computation produced a non-finite value.
struct ComputationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}
