#pragma once

#include <stdexcept>
#include <string>

namespace wmr {

// Bad shapes, bad layer wiring, out-of-range hyperparameters.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad runtime inputs: malformed files, out-of-range labels, videos too short.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// NaN/Inf encountered where the pipeline requires finite values.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed text input; carries the 1-based line number when known.
class ParseError : public InputError {
public:
    ParseError(const std::string& msg, long line)
        : InputError(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

// No usable person detection for a frame; callers apply the whole-frame fallback.
class NoPrimaryError : public InputError {
public:
    explicit NoPrimaryError(const std::string& msg) : InputError(msg) {}
};

}  // namespace wmr
