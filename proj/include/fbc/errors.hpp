#pragma once

#include <stdexcept>
#include <string>

namespace fbc {

// Malformed input or a violated structural precondition.
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A mathematical precondition fails (non-maximal filtration, non-rose graph, ...).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InverseRequired : DomainError {
    InverseRequired() : DomainError("inverse required: load inverse_map to use this operation") {}
};

// Exploration exceeded a configured cap.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fbc
