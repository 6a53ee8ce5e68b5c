#pragma once

#include <stdexcept>
#include <string>

namespace lldp {

/// Caller violated a precondition (dimension mismatch, unknown name, bad range).
class usage_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical kernel could not produce a finite result: singular Padé
/// denominator, overflow, or a non-finite vector field value.
class computation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The adaptive loop could not make progress (step size fell below h_min).
class integration_error : public std::runtime_error {
 public:
  integration_error(const std::string& what, double t, double last_error)
      : std::runtime_error(what), t_(t), last_error_(last_error) {}

  double time() const noexcept { return t_; }
  double last_error() const noexcept { return last_error_; }

 private:
  double t_;
  double last_error_;
};

}  // namespace lldp
