// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace censorfc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t col)
      : Error(what + " (row " + std::to_string(row) + ", col " + std::to_string(col) + ")"),
        row_(row),
        col_(col) {}
  explicit ParseError(const std::string& what) : Error(what) {}
  const char* kind() const noexcept override { return "ParseError"; }
  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t row_ = 0;
  std::size_t col_ = 0;
};

#define CENSORFC_DEFINE_ERROR(Name)                               \
  class Name : public Error {                                     \
   public:                                                        \
    using Error::Error;                                           \
    const char* kind() const noexcept override { return #Name; }  \
  };

CENSORFC_DEFINE_ERROR(ShapeError)
CENSORFC_DEFINE_ERROR(ValidationError)
CENSORFC_DEFINE_ERROR(ArgumentError)
CENSORFC_DEFINE_ERROR(DegenerateError)
CENSORFC_DEFINE_ERROR(InsufficientDataError)
CENSORFC_DEFINE_ERROR(ConfigError)
CENSORFC_DEFINE_ERROR(IoError)

#undef CENSORFC_DEFINE_ERROR

/// Raised when a parcel has zero variance over the retained volumes.
class DegenerateParcelError : public DegenerateError {
 public:
  explicit DegenerateParcelError(std::size_t parcel)
      : DegenerateError("parcel " + std::to_string(parcel) + " is constant over the retained volumes"),
        parcel_(parcel) {}
  const char* kind() const noexcept override { return "DegenerateParcelError"; }
  std::size_t parcel() const { return parcel_; }

 private:
  std::size_t parcel_;
};

}  // namespace censorfc
