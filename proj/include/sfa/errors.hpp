#pragma once

#include <stdexcept>
#include <string>

namespace sfa {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input files, unknown identifiers, malformed plans. CLI exit code 4.
struct ConfigError : Error {
    using Error::Error;
};

// A computation was handed data that violates its preconditions.
struct ValidationError : Error {
    using Error::Error;
};

// A (model, scenario) cell cannot be scored: some frame has no valid samples.
struct IncompleteCellError : ValidationError {
    using ValidationError::ValidationError;
};

// Provider-level failure that invalidates the whole run (auth, bad endpoint
// config). CLI exit code 3.
struct RunFatalError : Error {
    using Error::Error;
};

// One sample could not be obtained after retries. Recorded as an invalid
// attempt; never aborts the run.
struct SampleFailedError : Error {
    using Error::Error;
};

}  // namespace sfa
