// Copyright 2026 The qprior Authors
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

namespace qprior {

/// Base class of every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
struct InvalidArgument : Error {
    using Error::Error;
};

/// A file does not start with the expected magic or its header is malformed.
struct FormatError : Error {
    using Error::Error;
};

/// A file carries a format version this build cannot read.
struct VersionError : Error {
    using Error::Error;
};

/// A file ended before its declared payload.
struct TruncationError : Error {
    using Error::Error;
};

/// A strict-mode cursor reached the end of its pool.
struct ExhaustedError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

inline void require(bool condition, const std::string &message) {
    if (!condition) {
        throw InvalidArgument(message);
    }
}

}  // namespace qprior
