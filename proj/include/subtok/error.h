#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subtok {

// Base class for recoverable input/data errors. The CLI maps these to exit
// status 1; anything else escaping a command is treated as an internal fault.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t byte_offset)
      : Error(what + " at byte offset " + std::to_string(byte_offset)),
        offset_(byte_offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class EmptyVocabError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  InsufficientDataError(std::size_t requested, std::size_t available)
      : Error("requested " + std::to_string(requested) +
              " tokens but only " + std::to_string(available) +
              " are available"),
        available_(available) {}
  std::size_t available() const { return available_; }

 private:
  std::size_t available_;
};

// Malformed file content; carries a 1-based line number when known.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class TrainError : public Error {
 public:
  using Error::Error;
};

}  // namespace subtok
