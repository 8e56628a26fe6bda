#pragma once

#include <stdexcept>
#include <string>

namespace mswl {

// Error families. The CLI maps each family to its own exit code.
enum class ErrorKind {
    invalid_argument = 2,
    config = 3,
    shoot_diverged = 10,
    no_trapping = 11,
    unresolved = 12,
    tail_not_resolved = 13,
    superluminal = 14,
    slab_too_narrow = 15,
    cfl_violation = 16,
    non_finite = 17,
    no_contraction = 18,
    no_bound_state = 19,
    tail_not_controlled = 20,
    shoot_failed = 21,
    io = 22,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline int exit_code(ErrorKind k) { return static_cast<int>(k); }

}  // namespace mswl
