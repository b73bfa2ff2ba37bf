// Copyright 2026 The mzi-twophoton Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MZI_ERRORS_HPP
#define MZI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mzi {

/// Root of every exception thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Matrix or state shapes that do not fit together.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Requested computation exceeds the supported size (e.g. permanent beyond 12x12).
class SizeLimitError : public Error {
public:
    using Error::Error;
};

/// Input and output Fock states carry different photon numbers.
class ConservationError : public Error {
public:
    using Error::Error;
};

/// A value violates a documented invariant (non-unitary matrix, eta outside [0,1], ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The requested physical configuration is outside the implemented model.
class UnsupportedModelError : public Error {
public:
    using Error::Error;
};

/// Least-squares iteration did not converge.
class FitFailure : public Error {
public:
    using Error::Error;
};

/// Normal matrix at the optimum is singular (degenerate or zero-variance data).
class SingularFitError : public FitFailure {
public:
    using FitFailure::FitFailure;
};

/// Scan does not span enough of the fringe to identify the model.
class CoverageError : public FitFailure {
public:
    using FitFailure::FitFailure;
};

/// Malformed or out-of-range scenario configuration.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = -1, int column = -1)
        : Error(line >= 0 ? what + " (line " + std::to_string(line + 1) + ", column " +
                                std::to_string(column + 1) + ")"
                          : what),
          line_(line),
          column_(column) {}

    /// Zero-based position of the offending node, -1 when unknown.
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace mzi

#endif  // MZI_ERRORS_HPP
