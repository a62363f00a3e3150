#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace surfup {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DegenerateInput : public Error {
public:
  using Error::Error;
};

class EmptyCloud : public Error {
public:
  EmptyCloud() : Error("point cloud is empty") {}
  using Error::Error;
};

class KTooLarge : public Error {
public:
  using Error::Error;
};

class MTooLarge : public Error {
public:
  using Error::Error;
};

class DegenerateNeighborhood : public Error {
public:
  using Error::Error;
};

class SizeMismatch : public Error {
public:
  using Error::Error;
};

class EmptyMesh : public Error {
public:
  EmptyMesh() : Error("triangle mesh has no faces") {}
};

class InvalidConfig : public Error {
public:
  using Error::Error;
};

class UnsupportedFormat : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Malformed input. `location` is a 1-based line number for text content
/// and a byte offset for binary payloads.
class ParseError : public Error {
public:
  enum class Unit { line, byte };

  ParseError(const std::string& what, std::size_t location, Unit unit)
      : Error(what + (unit == Unit::line ? " (line " : " (byte offset ") +
              std::to_string(location) + ")"),
        location_(location), unit_(unit) {}

  std::size_t location() const noexcept { return location_; }
  Unit unit() const noexcept { return unit_; }

private:
  std::size_t location_;
  Unit unit_;
};

} // namespace surfup
