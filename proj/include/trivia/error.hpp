#pragma once

#include <stdexcept>
#include <string>

namespace trivia {

// Error categories map 1:1 onto CLI exit codes (input=2, lookup=3, config=4).
enum class ErrorKind {
    input,   // unreadable/malformed files, bad corpus data
    lookup,  // unknown article or category id
    config,  // invalid parameter values
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace trivia
