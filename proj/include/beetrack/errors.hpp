#pragma once

#include <stdexcept>
#include <string>

namespace beetrack {

/// Precondition violated by a caller-supplied value.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Training could not produce a model (e.g. a single class in the samples).
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or incompatible model file.
class ModelLoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data file; the message carries file and line.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace beetrack
