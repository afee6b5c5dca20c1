// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CEPNET_ERRORS_HPP_
#define CEPNET_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace cepnet {

// Bad caller input: length mismatches, unsupported sample rates, etc.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A file exists but is not in a format we accept.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CorruptFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model file or in-memory model is inconsistent.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dataset could not be assembled (e.g. no active speech).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training diverged.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Job configuration does not fit together (model vs. structure, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cepnet

#endif  // CEPNET_ERRORS_HPP_
