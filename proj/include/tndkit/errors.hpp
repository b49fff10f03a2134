#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tndkit {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- dataset / model errors ------------------------------------------------

struct EmptyDataset : Error {
    EmptyDataset() : Error("dataset is empty") {}
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// A margin of the data (cases, controls, or a vaccination arm) is missing.
// The message names the offending margin, and the fold when cross-fitting.
struct DegenerateArm : Error {
    using Error::Error;
};

struct InvalidFoldCount : Error {
    using Error::Error;
};

struct InsufficientSample : Error {
    InsufficientSample(std::size_t available, std::size_t requested)
        : Error("insufficient TND sample: " + std::to_string(available) +
                " sampled rows available, " + std::to_string(requested) + " requested"),
          available(available), requested(requested) {}
    std::size_t available;
    std::size_t requested;
};

struct DegenerateTruth : Error {
    using Error::Error;
};

struct ZeroDenominator : Error {
    using Error::Error;
};

struct DegenerateDenominator : Error {
    using Error::Error;
};

struct NonPositiveEstimate : Error {
    using Error::Error;
};

// -- solver errors -----------------------------------------------------------

struct NoConvergence : Error {
    NoConvergence(std::string what, std::vector<double> last_iterate, double max_score,
                  int iterations)
        : Error(std::move(what)), last_iterate(std::move(last_iterate)),
          max_score(max_score), iterations(iterations) {}
    std::vector<double> last_iterate;
    double max_score;
    int iterations;
};

struct SingularHessian : Error {
    using Error::Error;
};

// -- I/O, config -------------------------------------------------------------

struct SchemaError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct TruthResolutionFailed : Error {
    using Error::Error;
};

} // namespace tndkit
