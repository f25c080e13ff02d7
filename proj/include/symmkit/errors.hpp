#pragma once

#include <stdexcept>
#include <string>

namespace symmkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reflection in the hyperplane does not map the cell-center lattice to itself.
class MisalignedHyperplane : public Error {
 public:
  using Error::Error;
};

class NonMonotoneMap : public Error {
 public:
  using Error::Error;
};

/// A column of a set is not a single contiguous run of cells.
class NonConvexColumn : public Error {
 public:
  using Error::Error;
};

class DegenerateBody : public Error {
 public:
  using Error::Error;
};

class UnknownName : public Error {
 public:
  using Error::Error;
};

class EmptySet : public Error {
 public:
  using Error::Error;
};

/// A moved cell would land outside the grid.
class OutOfGrid : public Error {
 public:
  using Error::Error;
};

class NotARearrangement : public Error {
 public:
  using Error::Error;
};

class GalleryMismatch : public Error {
 public:
  using Error::Error;
};

/// Malformed file or JSON document.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace symmkit
