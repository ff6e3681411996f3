#pragma once

#include <stdexcept>
#include <string>

namespace qrbm {

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Exact enumeration requested on an instance above the enumeration guard.
class SizeLimitError : public std::length_error {
public:
    using std::length_error::length_error;
};

// A rate whose denominator is zero, e.g. OTP when the truth has no 1s.
class UndefinedRateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qrbm
