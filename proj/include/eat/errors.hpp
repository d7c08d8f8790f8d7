#pragma once

#include <stdexcept>
#include <string>

namespace eat {

// Exit-code category used by the CLI: validation errors map to exit 1,
// I/O errors to exit 2.
enum class ErrorKind { validation, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorKind::validation, w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};

// sfc
struct InvalidGrid : ValidationError {
  using ValidationError::ValidationError;
};
struct OutOfBounds : ValidationError {
  using ValidationError::ValidationError;
};
struct LengthMismatch : ValidationError {
  using ValidationError::ValidationError;
};

// diffcore
struct ShapeMismatch : ValidationError {
  using ValidationError::ValidationError;
};
struct NonScalarLoss : ValidationError {
  using ValidationError::ValidationError;
};

// evolution
struct IndexOutOfRange : ValidationError {
  using ValidationError::ValidationError;
};
struct SameIndividual : ValidationError {
  using ValidationError::ValidationError;
};
struct EmptyPopulation : ValidationError {
  using ValidationError::ValidationError;
};

// layers / analysis / model
struct InvalidConfig : ValidationError {
  using ValidationError::ValidationError;
};
struct InvalidGeometry : ValidationError {
  using ValidationError::ValidationError;
};
struct NoRecordedPass : ValidationError {
  using ValidationError::ValidationError;
};

// checkpoint / datasets
struct CorruptCheckpoint : IoError {
  using IoError::IoError;
};
struct UnsupportedVersion : IoError {
  using IoError::IoError;
};
struct BadMagic : IoError {
  using IoError::IoError;
};
struct TruncatedFile : IoError {
  using IoError::IoError;
};
struct CountMismatch : IoError {
  using IoError::IoError;
};
struct DataError : IoError {
  using IoError::IoError;
};

}  // namespace eat
