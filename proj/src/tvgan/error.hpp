// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace tvgan {

// Base of every error the library raises. The C API maps the subclasses
// below onto status codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Raised by configuration parsing and validation. `field` is the dotted path
// of the offending key (e.g. "dataset").
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A loss, score or gradient left the finite range.
class NonFiniteError : public Error {
 public:
  NonFiniteError(std::string where, const std::string& message)
      : Error(message), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tvgan
