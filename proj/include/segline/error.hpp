#pragma once

#include <stdexcept>
#include <string>

namespace segline {

// Error taxonomy maps onto CLI exit codes:
//   UsageError -> 1, DataError -> 2, everything else derived from Error -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad command line / bad config key.
struct UsageError : Error {
    using Error::Error;
};

// Malformed external input: corpus files, embedding files, checkpoints.
struct DataError : Error {
    using Error::Error;
};

// Dimension mismatch between tensors or layers.
struct ShapeError : Error {
    using Error::Error;
};

// Numeric failures: divergence, zero-norm vectors, non-deterministic loss.
struct NumericError : Error {
    using Error::Error;
};

}  // namespace segline
