#pragma once

#include <stdexcept>
#include <string>

namespace chipcarbon {

/// A math precondition was violated (negative area, zero yield, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed or inconsistent user input: files, schema, flags.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A name lookup failed. Carries the closest known name, if any.
class NotFoundError : public InputError {
public:
    NotFoundError(const std::string& what, std::string suggestion)
        : InputError(what), suggestion_(std::move(suggestion)) {}

    const std::string& suggestion() const noexcept { return suggestion_; }

private:
    std::string suggestion_;
};

/// An internal invariant did not hold. Always a bug.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace chipcarbon
