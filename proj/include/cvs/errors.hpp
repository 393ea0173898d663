#pragma once

// Error taxonomy shared by the library and the CLI; each class maps to one
// documented process exit code.

#include <stdexcept>
#include <string>

namespace cvs {

struct ConfigError : std::runtime_error { // exit 2
    using std::runtime_error::runtime_error;
};

struct HypothesisError : std::runtime_error { // exit 3: stability or flatness lost
    using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error { // exit 4
    using std::runtime_error::runtime_error;
};

struct CflError : std::runtime_error { // exit 5
    using std::runtime_error::runtime_error;
};

} // namespace cvs
