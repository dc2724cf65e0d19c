#include "algred/errors.hpp"

#include <cstdio>

namespace algred {

SyntaxError::SyntaxError(std::size_t offset, std::string expected)
    : Error("syntax error at offset " + std::to_string(offset) + ": expected " + expected),
      offset_(offset),
      expected_(std::move(expected)) {}

UnknownCoordinate::UnknownCoordinate(std::string name, std::size_t offset)
    : Error("unknown coordinate '" + name + "' at offset " + std::to_string(offset)),
      name_(std::move(name)),
      offset_(offset) {}

DomainError::DomainError(std::string op, std::vector<double> point)
    : Error("domain error in " + op + (point.empty() ? std::string() : " at " + format_point(point))),
      op_(std::move(op)),
      point_(std::move(point)) {}

ArityMismatch::ArityMismatch(std::size_t expected, std::size_t got)
    : Error("arity mismatch: expected " + std::to_string(expected) + " arguments, got " + std::to_string(got)) {}

SingularMu::SingularMu(std::vector<double> point)
    : Error("mu is singular at " + format_point(point)), point_(std::move(point)) {}

ModelError::ModelError(std::size_t line, std::size_t column, const std::string& message)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

std::string format_point(const std::vector<double>& p) {
  std::string s = "(";
  char buf[32];
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", p[i]);
    if (i) s += ", ";
    s += buf;
  }
  return s + ")";
}

}  // namespace algred
