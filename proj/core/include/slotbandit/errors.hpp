#pragma once

#include <stdexcept>
#include <string>

namespace slotbandit {

// Bad user input. `field()` names the offending document field or argument.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, std::string message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)), message_(std::move(message)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string field_;
  std::string message_;
};

class InvalidListError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An irrelevant arm has zero divergence from a relevant one.
class IllPosedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A policy was asked to decide before its initialization phase finished.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Runtime failure of an experiment (shape mismatch, solver failure).
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slotbandit
