#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace faasflow {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed document. `position` is a byte offset, or npos when the
/// failure is structural rather than syntactic (then `path` locates it).
class ParseError : public Error {
 public:
  ParseError(std::string message, std::string path, std::size_t position = npos)
      : Error(std::move(message)), path_(std::move(path)), position_(position) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  const std::string& path() const { return path_; }
  std::size_t position() const { return position_; }

 private:
  std::string path_;
  std::size_t position_;
};

class DuplicateIdError : public Error {
 public:
  explicit DuplicateIdError(std::string id)
      : Error("duplicate id '" + id + "'"), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Transient failure of an external service; callers may retry.
class UnavailableError : public Error {
 public:
  using Error::Error;
};

}  // namespace faasflow
