#pragma once

#include <stdexcept>
#include <string>

namespace offload {

/// Raised when an argument violates an operation's precondition.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised by the brute-force oracle when an instance is too large to enumerate.
class SearchSpaceError : public std::runtime_error {
public:
    SearchSpaceError(const std::string& what, double estimated_count)
        : std::runtime_error(what), estimated_count_(estimated_count) {}

    double estimated_count() const noexcept { return estimated_count_; }

private:
    double estimated_count_;
};

}  // namespace offload
