#pragma once

#include <stdexcept>
#include <string>

namespace persona {

// Base for every error raised by the library. Callers that only care about
// "something in the agent stack failed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class NoActivePole : public Error {
 public:
  NoActivePole() : Error("personality has no active pole") {}
};

// Malformed data file. Line is 1-based; column is 1-based or 0 when unknown.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int col, const std::string& what)
      : Error("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + what),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotApplicable : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ScriptError : public Error {
 public:
  ScriptError(int line, const std::string& what)
      : Error("script line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class SessionClosed : public Error {
 public:
  SessionClosed() : Error("session is closed") {}
};

// A pluggable backend answered with something outside its contract.
class BackendProtocol : public Error {
 public:
  using Error::Error;
};

class InsufficientCoverage : public Error {
 public:
  using Error::Error;
};

class Degenerate : public Error {
 public:
  using Error::Error;
};

class ZeroTotalVariance : public Error {
 public:
  ZeroTotalVariance() : Error("row totals have zero variance") {}
};

class InsufficientTrials : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string file, int line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(std::move(file)), line_(line) {}
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

}  // namespace persona
