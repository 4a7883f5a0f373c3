#pragma once

#include <stdexcept>
#include <string>

namespace blochgrass {

enum class ErrorKind {
    InvalidInput,
    Degenerate,
    Domain,
    Unsupported,
    Format,
    InvalidConfig,
};

/// Base exception for every library failure. The kind drives CLI exit codes.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::Degenerate: return "degenerate input";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Format: return "format error";
    case ErrorKind::InvalidConfig: return "invalid configuration";
    }
    return "error";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace blochgrass
