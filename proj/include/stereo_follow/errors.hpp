#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stereo_follow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Point at or behind the image plane (z <= 0).
class BehindCameraError : public Error {
 public:
  using Error::Error;
};

class NonPositiveDisparityError : public Error {
 public:
  using Error::Error;
};

/// Left/right centers that cannot be the same person: disparity <= 0.
class BadMatchError : public Error {
 public:
  using Error::Error;
};

class EpipolarViolationError : public Error {
 public:
  using Error::Error;
};

class NoFusionError : public Error {
 public:
  using Error::Error;
};

class NoTorsoError : public Error {
 public:
  using Error::Error;
};

class NoAppearanceDataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Carries every offending field, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> fields)
      : Error(join(fields)), fields_(std::move(fields)) {}
  const std::vector<std::string>& fields() const noexcept { return fields_; }

 private:
  static std::string join(const std::vector<std::string>& f) {
    std::string s = "invalid scenario:";
    for (const auto& x : f) s += "\n  " + x;
    return s;
  }
  std::vector<std::string> fields_;
};

class AlignmentError : public Error {
 public:
  explicit AlignmentError(std::int64_t frame)
      : Error("left/right logs do not align at frame " + std::to_string(frame)),
        frame_(frame) {}
  std::int64_t frame() const noexcept { return frame_; }

 private:
  std::int64_t frame_;
};

}  // namespace stereo_follow
