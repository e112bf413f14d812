#pragma once

#include <stdexcept>
#include <string>

namespace linekit {

// Base of every error raised by the library. The CLI maps the subclasses onto
// exit codes (see src/cli.cpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DegenerateSegment : public Error {
public:
    using Error::Error;
};

class PointAtInfinity : public Error {
public:
    using Error::Error;
};

class SingularHomography : public Error {
public:
    using Error::Error;
};

class OutOfBounds : public Error {
public:
    using Error::Error;
};

class SizeMismatch : public Error {
public:
    using Error::Error;
};

/// Malformed or unreadable file content (bad magic, truncation, non-finite values, bad JSON).
class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class DegenerateConfiguration : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

/// An operation that is well-formed but produced nothing usable (no matched lines, no RANSAC model).
class EmptyResult : public Error {
public:
    using Error::Error;
};

} // namespace linekit
