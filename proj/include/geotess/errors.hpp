#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace geotess {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidDensity : public Error {
 public:
  using Error::Error;
};

/// Mesh file parse or validation failure; `line()` is 1-based, 0 when not tied to a line.
class LoadError : public Error {
 public:
  LoadError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class UnsupportedMetric : public Error {
 public:
  using Error::Error;
};

/// Value iteration did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class UnreachableNode : public Error {
 public:
  UnreachableNode(const std::string& what, int node) : Error(what), node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

class BacktrackError : public Error {
 public:
  using Error::Error;
};

class EmptyCell : public Error {
 public:
  EmptyCell(const std::string& what, int cell) : Error(what), cell_(cell) {}
  int cell() const { return cell_; }

 private:
  int cell_;
};

/// Weight ascent stopped above its capacity tolerance; carries the best weights found.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, std::vector<double> weights, double gap)
      : Error(what), weights_(std::move(weights)), gap_(gap) {}
  const std::vector<double>& weights() const { return weights_; }
  double gap() const { return gap_; }

 private:
  std::vector<double> weights_;
  double gap_;
};

}  // namespace geotess
