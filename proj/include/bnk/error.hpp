#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bnk {

enum class ErrorKind {
  invalid_parameter,
  degenerate,
  configuration,
  index,
  length,
  parse,
  ordering,
  coverage,
  convergence,
  instability,
  singular,
  checkpoint,
  io,
  usage,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid_parameter";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::index: return "index";
    case ErrorKind::length: return "length";
    case ErrorKind::parse: return "parse";
    case ErrorKind::ordering: return "ordering";
    case ErrorKind::coverage: return "coverage";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::instability: return "instability";
    case ErrorKind::singular: return "singular";
    case ErrorKind::checkpoint: return "checkpoint";
    case ErrorKind::io: return "io";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace bnk
