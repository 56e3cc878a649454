// evadapt/error.h

// Copyright 2026  The evadapt authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef EVADAPT_ERROR_H_
#define EVADAPT_ERROR_H_

#include <stdexcept>
#include <string>

namespace evadapt {

/// Base class for every error thrown by this library.  Callers that want a
/// single catch site can catch Error&; the concrete subclasses below exist so
/// that tests and tools can distinguish failure modes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file contents (bad header, bad field, unexpected end of data).
/// The message names the file and, where possible, the line or byte offset.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Operating-system level I/O failure (file missing, unwritable path).
class IoError : public Error {
 public:
  using Error::Error;
};

/// A domain-type invariant or an operation precondition was violated
/// (duplicate ids, dimension mismatch, non-finite values, bad flags).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Not enough samples, speakers, or utterances to estimate the requested
/// statistics.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Generic numerical failure (e.g. an eigensolver did not converge).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A matrix required to be positive semi-definite has an eigenvalue below
/// the tolerated roundoff band.
class NotPsdError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A matrix that must be inverted (or raised to a negative power) is
/// singular or numerically too ill-conditioned.
class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An eigenvalue spectrum has zero spread, so z-score normalization is
/// undefined.
class DegenerateSpectrumError : public Error {
 public:
  using Error::Error;
};

/// A single input vector is degenerate for the requested operation
/// (e.g. the zero vector at length normalization or cosine scoring).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A keyed trial list lacks one of the two classes (no targets, or no
/// nontargets), so detection error rates are undefined.
class DegenerateKeysError : public Error {
 public:
  using Error::Error;
};

/// An utterance id referenced by a trial is not present in the given set.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// A model stage required by the requested operation has not been fitted.
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace evadapt

#endif  // EVADAPT_ERROR_H_
