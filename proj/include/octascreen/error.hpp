#pragma once

#include <stdexcept>
#include <string>

namespace octascreen {

enum class ErrorKind {
  io,                // missing/unwritable file
  format,            // malformed or unsupported file contents
  bounds,            // region query leaves the image
  invalid_argument,  // violated precondition on a parameter
  flat_template,     // template std-dev below threshold
  no_candidates,     // second stage given an empty candidate set
  retries_exhausted  // synthetic case generation gave up
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace octascreen
