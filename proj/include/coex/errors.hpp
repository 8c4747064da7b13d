#pragma once

#include <stdexcept>
#include <string>

namespace coex {

/// Malformed or inconsistent input (duplicate ids, bad file fields, bad config).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation invoked on an argument it is not defined for.
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A configured resource cap (segment count, graph size) was exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative numeric routine failed to converge.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace coex
