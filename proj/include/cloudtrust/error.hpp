#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cloudtrust {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  Io,
  NotFound,
};

// Single exception type for the library; the C API maps `code()` onto its
// status values.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

// Malformed document. `position()` is the byte offset reported by the parser,
// or 0 when the document was well-formed JSON but violated the schema.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t position)
      : Error(ErrorCode::Parse, what), position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace cloudtrust
