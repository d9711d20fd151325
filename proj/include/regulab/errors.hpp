#pragma once

#include <stdexcept>
#include <string>

namespace regulab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    explicit ParseError(const std::string& msg) : Error(msg), line_(0) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ContainmentError : public Error {
public:
    using Error::Error;
};

class UndefinedDensityError : public Error {
public:
    using Error::Error;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class RefinementFailure : public Error {
public:
    using Error::Error;
};

class SearchFailure : public Error {
public:
    using Error::Error;
};

// Carries the serialized trace so callers can report how far the loop got.
class NonterminationError : public Error {
public:
    NonterminationError(const std::string& msg, std::string trace_json)
        : Error(msg), trace_json_(std::move(trace_json)) {}
    const std::string& trace_json() const { return trace_json_; }

private:
    std::string trace_json_;
};

}  // namespace regulab
