#pragma once

#include <stdexcept>
#include <string>

namespace sievelab {

// Thrown when an exhaustive computation would exceed its evaluation budget.
// The message names the required work so callers can raise the budget.
class budget_error : public std::runtime_error {
public:
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a cutoff with phi(0) = 0 is used where phi(0) != 0 is required.
class degenerate_cutoff_error : public std::domain_error {
public:
    explicit degenerate_cutoff_error(const std::string& what) : std::domain_error(what) {}
};

}  // namespace sievelab
