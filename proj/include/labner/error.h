#ifndef LABNER_ERROR_H_
#define LABNER_ERROR_H_

#include <stdexcept>
#include <string>

namespace labner {

// Base class for every data error raised by the toolkit. The CLI maps these
// to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input at a known line.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string &message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// A tag or tag sequence that violates the BIO scheme.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Inputs that are individually well formed but inconsistent with each other
// (misaligned corpora, mismatched alphabets, bad model files).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace labner

#endif  // LABNER_ERROR_H_
