#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace zealotry {

// Bad input data: unreadable files, malformed records, invalid networks.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : InputError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A solver could not produce an answer for otherwise well-formed input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularSystem : public NumericalError {
 public:
  SingularSystem(const std::string& what, std::vector<std::size_t> nodes)
      : NumericalError(what), nodes_(std::move(nodes)) {}

  /// Free nodes that receive no zealot influence along any influence path.
  const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }

 private:
  std::vector<std::size_t> nodes_;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double gap) : NumericalError(what), gap_(gap) {}

  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

}  // namespace zealotry
