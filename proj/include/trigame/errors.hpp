#ifndef TRIGAME_ERRORS_HPP
#define TRIGAME_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace trigame {

// Rejected inputs: bad parameters, malformed scenario files, wrong experiment
// kind. The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failures: diverging integrations, root solvers that ran out of
// iterations. The CLI maps these to exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationError : public NumericError {
 public:
  IntegrationError(const std::string& what, double time)
      : NumericError(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace trigame

#endif
