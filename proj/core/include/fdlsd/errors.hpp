#pragma once

#include <stdexcept>
#include <string>

namespace fdlsd {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid hyperparameters, generation parameters or config files.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Matrix or parameter shapes that do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class LabelError : public Error {
public:
    using Error::Error;
};

/// A mini-batch that cannot satisfy the hardest-mining preconditions.
class BatchCompositionError : public Error {
public:
    using Error::Error;
};

/// DBSCAN produced no cluster at all.
class EmptyClusteringError : public Error {
public:
    using Error::Error;
};

class DiagnosticsError : public Error {
public:
    using Error::Error;
};

class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Malformed corpus, checkpoint or config text.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace fdlsd
