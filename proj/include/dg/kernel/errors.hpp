#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input/output widths do not match what a program or judge declares.
class WidthError : public Error {
 public:
  using Error::Error;
};

// Malformed program tree (dimension chaining, zero theta, ...).
class StructureError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IntervalError : public Error {
 public:
  using Error::Error;
};

class JudgeKindError : public Error {
 public:
  using Error::Error;
};

// A configured budget would be exceeded; callers that return verdicts map
// this onto the resource_exceeded outcome.
class BudgetError : public Error {
 public:
  BudgetError(std::string budget, unsigned long long limit)
      : Error("budget exceeded: " + budget + " (limit " + std::to_string(limit) + ")"),
        budget_(std::move(budget)),
        limit_(limit) {}
  const std::string& budget() const { return budget_; }
  unsigned long long limit() const { return limit_; }

 private:
  std::string budget_;
  unsigned long long limit_;
};

}  // namespace dg

namespace dg {

// A judge failed the non-triviality check where one was required.
class TrivialJudgeError : public Error {
 public:
  using Error::Error;
};

}  // namespace dg
