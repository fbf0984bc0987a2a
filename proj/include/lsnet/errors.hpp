#pragma once

#include <stdexcept>
#include <string>

namespace lsnet {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};
struct InvalidPivots : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
struct DataError : Error {
  using Error::Error;
};
struct IndexError : Error {
  using Error::Error;
};
struct InvalidState : Error {
  using Error::Error;
};
struct InitError : Error {
  using Error::Error;
};
struct EmptyChain : Error {
  using Error::Error;
};
struct TestError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct UsageError : Error {
  using Error::Error;
};

}  // namespace lsnet
