#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace powder {

// Precondition violated by a caller (bad id, coordinate, dimension, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed bytes or text. offset() is the byte (or line) position where
// decoding stopped.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// An environment action that the active task does not allow.
class RejectedAction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// step() called on an episode that has already finished.
class EpisodeDone : public std::logic_error {
 public:
  EpisodeDone() : std::logic_error("episode is done") {}
};

}  // namespace powder
