#pragma once

#include <stdexcept>
#include <string>

namespace transit {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

class DuplicateName : public ModelError {
 public:
  explicit DuplicateName(const std::string& name)
      : ModelError("duplicate name: " + name) {}
};

class FrozenModel : public ModelError {
 public:
  FrozenModel() : ModelError("model is frozen") {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& file, int line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class DisconnectedPtn : public ValidationError {
 public:
  DisconnectedPtn(int from, int to)
      : ValidationError("no path between stops " + std::to_string(from) + " and " + std::to_string(to)) {}
};

// Brute-force enumeration refused because the integer domain is too large.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class StageInfeasible : public Error {
 public:
  explicit StageInfeasible(int stage)
      : Error("stage " + std::to_string(stage) + " is infeasible"), stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

class IntegrationInfeasible : public Error {
 public:
  IntegrationInfeasible(int k, int l)
      : Error("integrated stages " + std::to_string(k) + ".." + std::to_string(l) + " are infeasible"),
        k_(k),
        l_(l) {}
  int k() const { return k_; }
  int l() const { return l_; }

 private:
  int k_, l_;
};

// A solve hit its time or node limit before finding any feasible point.
class SolveLimit : public Error {
 public:
  using Error::Error;
};

class NonpositiveOptimal : public Error {
 public:
  NonpositiveOptimal() : Error("price of sequentiality needs a positive optimal value") {}
};

class EmptyIndexSet : public Error {
 public:
  EmptyIndexSet() : Error("no stage has a positive weight") {}
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class Unroutable : public Error {
 public:
  Unroutable(int u, int v)
      : Error("no path from stop " + std::to_string(u) + " to stop " + std::to_string(v)), u_(u), v_(v) {}
  int u() const { return u_; }
  int v() const { return v_; }

 private:
  int u_, v_;
};

class InfeasibleTimetable : public Error {
 public:
  using Error::Error;
};

class InvalidSchedule : public Error {
 public:
  using Error::Error;
};

}  // namespace transit
