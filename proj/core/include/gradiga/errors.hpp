#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gradiga {

/// Parametric coordinate or probe point outside the patch domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Structurally invalid input (bad knot vector, nonpositive weight, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The geometric map or the deformation has a nonpositive Jacobian.
class ElementInversion : public std::runtime_error {
public:
    ElementInversion(std::size_t element, const std::string& what)
        : std::runtime_error(what + " (element " + std::to_string(element) + ")"), element_(element) {}

    [[nodiscard]] std::size_t element() const noexcept { return element_; }

private:
    std::size_t element_;
};

/// Run configuration rejected during validation; `key()` names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history)) {}

    [[nodiscard]] const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

class SingularMatrix : public std::runtime_error {
public:
    SingularMatrix(std::size_t dof, const std::string& what)
        : std::runtime_error(what + " (zero pivot at dof " + std::to_string(dof) + ")"), dof_(dof) {}

    [[nodiscard]] std::size_t dof() const noexcept { return dof_; }

private:
    std::size_t dof_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gradiga
