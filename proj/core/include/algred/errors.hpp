#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace algred {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::string expected);
  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

class UnknownCoordinate : public Error {
 public:
  UnknownCoordinate(std::string name, std::size_t offset);
  const std::string& name() const { return name_; }
  std::size_t offset() const { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

// Raised by evaluation when a partial function leaves its domain. The point is
// filled in by the evaluator; jet arithmetic raises with an empty point.
class DomainError : public Error {
 public:
  DomainError(std::string op, std::vector<double> point = {});
  const std::string& op() const { return op_; }
  const std::vector<double>& point() const { return point_; }

 private:
  std::string op_;
  std::vector<double> point_;
};

class ArityMismatch : public Error {
 public:
  ArityMismatch(std::size_t expected, std::size_t got);
};

class DegreeMismatch : public Error {
 public:
  using Error::Error;
};

class NotBasic : public Error {
 public:
  using Error::Error;
};

class SingularMu : public Error {
 public:
  explicit SingularMu(std::vector<double> point);
  const std::vector<double>& point() const { return point_; }

 private:
  std::vector<double> point_;
};

// Model-file problems: line is 1-based, column is a 1-based byte column.
class ModelError : public Error {
 public:
  ModelError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

std::string format_point(const std::vector<double>& p);

}  // namespace algred
