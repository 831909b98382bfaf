#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace radtherm {

/// Invalid argument or violated physical invariant (negative temperature,
/// emissivity outside [0, 1], malformed geometry, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Measured signal lies outside the image of the solver bracket.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed binary or text artifact. `offset` is the byte offset at which
/// decoding failed.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Declared matrix shape disagrees with the fixed network topology.
class ShapeError : public ParseError {
 public:
  using ParseError::ParseError;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, int epoch)
      : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace radtherm
