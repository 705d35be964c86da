#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gaitse {

/// Failure categories shared by every module.
enum class Errc {
  parse,
  unknown_joint,
  invalid_recording,
  joint_never_observed,
  insufficient_frames,
  excessive_dropout,
  empty_series,
  invalid_config,
  zero_variance_tolerance,
  insufficient_length,
  no_template_matches,
  undefined_entropy,
  degenerate_baseline,
  no_shared_keys,
  nothing_to_scale,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised while reading any of the CSV formats. `line()` is 1-based; 0 when the
/// problem concerns the document as a whole.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what, Errc code = Errc::parse)
      : Error(code, line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Sample entropy with matching m-templates but no matching (m+1)-templates.
class UndefinedEntropyError : public Error {
 public:
  UndefinedEntropyError(std::uint64_t a_count, std::uint64_t b_count)
      : Error(Errc::undefined_entropy,
              "undefined entropy (zero A): a_count=" + std::to_string(a_count) +
                  " b_count=" + std::to_string(b_count)),
        a_count_(a_count),
        b_count_(b_count) {}

  std::uint64_t a_count() const noexcept { return a_count_; }
  std::uint64_t b_count() const noexcept { return b_count_; }

 private:
  std::uint64_t a_count_;
  std::uint64_t b_count_;
};

}  // namespace gaitse
