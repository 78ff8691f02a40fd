// Copyright 2026 The gilbert-hsd Authors
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

namespace hsd {

// Every error raised by the library derives from Error so callers can catch
// the whole family; the subclasses let the CLI map failures to exit codes.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Shapes, subsystem dimensions or party indices that do not fit together.
class DimensionError : public Error {
   public:
    using Error::Error;
};

// Inputs that violate a mathematical invariant (Hermiticity, trace, PSD,
// unitarity).
class ValidationError : public Error {
   public:
    using Error::Error;
};

// Out-of-range scalar parameters (dimension < 2, too-short traces, ...).
class ParameterError : public Error {
   public:
    using Error::Error;
};

// A group closure grew beyond its configured cap.
class CapacityError : public Error {
   public:
    using Error::Error;
};

// Zero denominators: degenerate line-search directions, zero-variance series.
class DegenerateError : public Error {
   public:
    using Error::Error;
};

// Unreadable or malformed files.
class IoError : public Error {
   public:
    using Error::Error;
};

}  // namespace hsd
