#pragma once

#include <stdexcept>
#include <string>

namespace lbnet {

// Every error raised by the library derives from lbnet::error. The CLI maps
// the leaf types onto process exit codes.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameters violate a NetworkConfig invariant. The message names the field.
class invalid_config : public error {
public:
    invalid_config(const std::string& field, const std::string& what)
        : error(field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// A valid config was handed to an operation whose preconditions it misses
// (e.g. the closed form with b_j != 1).
class precondition_error : public error {
public:
    using error::error;
};

// The reduced generator is not irreducible on K.
class model_error : public error {
public:
    using error::error;
};

// Linear algebra failed to produce an acceptable stationary measure.
class solver_error : public error {
public:
    using error::error;
};

// The queue process is not positive recurrent.
class ergodicity_error : public error {
public:
    using error::error;
};

// The recursive elimination referenced an entry it had not derived yet.
class sequencing_error : public error {
public:
    using error::error;
};

// A closing balance equation has no dependence on the phase unknown.
class degenerate_elimination : public error {
public:
    using error::error;
};

}  // namespace lbnet
