#pragma once

#include <stdexcept>
#include <string>

namespace chsk {

// Failure categories; the CLI maps them to category-coded messages.
enum class ErrorKind { Usage, Config, Io, Format, Data };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Usage:
      return "usage";
    case ErrorKind::Config:
      return "config";
    case ErrorKind::Io:
      return "io";
    case ErrorKind::Format:
      return "format";
    case ErrorKind::Data:
      return "data";
  }
  return "unknown";
}

}  // namespace chsk
