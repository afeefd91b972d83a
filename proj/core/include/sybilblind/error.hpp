#pragma once

#include <stdexcept>
#include <string>

namespace sybilblind {

/// Base class of everything the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data is unreadable, malformed, or too small for the request
/// (missing files, bad lines, 2n > |V|, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// A parameter is outside its documented range.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace sybilblind
