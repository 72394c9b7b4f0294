#pragma once

#include <stdexcept>
#include <string>

namespace nfq {

// Every failure carries a short machine-parsable category; the CLI prints
// "error:<category>: <message>" and exits nonzero.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}
    const std::string& category() const { return category_; }

private:
    std::string category_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("config", m) {}
};
struct InputError : Error {
    explicit InputError(const std::string& m) : Error("input", m) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& m) : Error("parse", m) {}
};
struct LookupError : Error {
    explicit LookupError(const std::string& m) : Error("lookup", m) {}
};
struct IoError : Error {
    explicit IoError(const std::string& m) : Error("io", m) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& m) : Error("numeric", m) {}
};

} // namespace nfq
