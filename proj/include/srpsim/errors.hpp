#pragma once

#include <stdexcept>
#include <string>

namespace srpsim {

// Bad argument to a public operation (self-loop edge, empty metric list, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A node asked for an authenticator under a key it does not hold.
class KeyAccessViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scenario could not be parsed or failed validation. `where` is a file
// position ("line:col") or a JSON pointer into the document.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

// The event loop was asked to schedule into the past.
class OrderingError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace srpsim
