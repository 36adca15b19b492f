#pragma once

#include <stdexcept>
#include <string>

namespace slipkit {

// Failure classes thrown by the library. The CLI maps kinds onto exit
// codes: data problems (parsing, bad values, ordering, alignment, file IO)
// exit with 2, domain and calibration problems exit with 3.
enum class ErrorKind {
  input_domain,
  undefined_slip,
  ordering,
  parse,
  value,
  io,
  alignment,
  calibration,
  fold,
  labeling,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  int exit_code() const noexcept {
    switch (kind_) {
      case ErrorKind::parse:
      case ErrorKind::value:
      case ErrorKind::ordering:
      case ErrorKind::io:
      case ErrorKind::alignment:
        return 2;
      default:
        return 3;
    }
  }

 private:
  ErrorKind kind_;
};

struct InputDomainError : Error {
  explicit InputDomainError(const std::string& w) : Error(ErrorKind::input_domain, w) {}
};

struct UndefinedSlipError : Error {
  explicit UndefinedSlipError(const std::string& w) : Error(ErrorKind::undefined_slip, w) {}
};

struct OrderingError : Error {
  explicit OrderingError(const std::string& w) : Error(ErrorKind::ordering, w) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(ErrorKind::parse, w) {}
};

struct ValueError : Error {
  explicit ValueError(const std::string& w) : Error(ErrorKind::value, w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};

struct AlignmentError : Error {
  explicit AlignmentError(const std::string& w) : Error(ErrorKind::alignment, w) {}
};

struct CalibrationError : Error {
  explicit CalibrationError(const std::string& w) : Error(ErrorKind::calibration, w) {}
};

struct FoldError : Error {
  explicit FoldError(const std::string& w) : Error(ErrorKind::fold, w) {}
};

struct LabelingError : Error {
  explicit LabelingError(const std::string& w) : Error(ErrorKind::labeling, w) {}
};

}  // namespace slipkit
