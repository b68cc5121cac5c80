#pragma once

#include <stdexcept>
#include <string>

namespace netrecon {

/// Error raised by any stage of the pipeline. `stage()` names the module that
/// failed ("topology", "signal", "solvers", ...) so CLI diagnostics can be
/// stage-labelled.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace netrecon
