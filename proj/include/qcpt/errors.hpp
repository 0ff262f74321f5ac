#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qcpt {

// Base of every library failure. Callers that only care about "did it work"
// can catch this; the subclasses tell apart user mistakes from numerics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};
class MappingError : public Error {
 public:
  using Error::Error;
};
class InputError : public Error {
 public:
  using Error::Error;
};
class ParameterError : public Error {
 public:
  using Error::Error;
};
class NotInformationallyComplete : public Error {
 public:
  using Error::Error;
};
class IdMismatchError : public Error {
 public:
  using Error::Error;
};
class RankError : public Error {
 public:
  using Error::Error;
};
class ResourceError : public Error {
 public:
  using Error::Error;
};
class OptimizerError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};
class InternalError : public Error {
 public:
  using Error::Error;
};

// A module error re-raised by the workflow driver with the stage it came from.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace qcpt
