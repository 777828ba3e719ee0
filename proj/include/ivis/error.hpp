#pragma once

#include <stdexcept>
#include <string>

namespace ivis {

// Input rejected by a contract check (bad geometry, malformed file content,
// mismatched dimensions). The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidGeometry : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidScene : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidArgument : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class RegionSourceError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// File system failures. The CLI maps these to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ivis
