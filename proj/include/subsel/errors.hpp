#pragma once

#include <stdexcept>
#include <string>

namespace subsel {

/// Malformed or inconsistent input (instance files, flag values).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured enumeration budget (cells, oracle supports) would be exceeded.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::string context = {})
      : std::runtime_error(context.empty() ? what : context + ": " + what),
        context_(std::move(context)) {}

  const std::string& context() const noexcept { return context_; }

 private:
  std::string context_;
};

}  // namespace subsel
