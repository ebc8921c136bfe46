// Copyright 2026 The trapspin Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace trapspin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a documented precondition.
class InvalidArgument : public Error {
   public:
    using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public InvalidArgument {
   public:
    ConfigError(const std::string &what, int line = 0) : InvalidArgument(what), line_(line) {}
    /// 1-based line of the offending entry, 0 when not tied to a line.
    int line() const { return line_; }

   private:
    int line_;
};

/// Two ions share a position, so Coulomb terms are undefined.
class InvalidGeometry : public Error {
   public:
    using Error::Error;
};

/// Newton iteration ran out of iterations.
class ConvergenceFailure : public Error {
   public:
    ConvergenceFailure(const std::string &what, double last_residual)
        : Error(what), last_residual_(last_residual) {}
    double last_residual() const { return last_residual_; }

   private:
    double last_residual_;
};

/// The crystal is mechanically unstable along an axis (negative curvature).
class InstabilityError : public Error {
   public:
    InstabilityError(const std::string &what, double eigenvalue)
        : Error(what), eigenvalue_(eigenvalue) {}
    double eigenvalue() const { return eigenvalue_; }

   private:
    double eigenvalue_;
};

/// A zero-frequency mode entered a formula that divides by its frequency.
class DegenerateModeError : public Error {
   public:
    using Error::Error;
};

/// Hilbert-space size exceeds a configured memory guard.
class CapacityError : public Error {
   public:
    using Error::Error;
};

/// Time evolution lost unitarity beyond tolerance.
class AccuracyError : public Error {
   public:
    using Error::Error;
};

}  // namespace trapspin
