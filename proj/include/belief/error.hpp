#pragma once

// Error types shared by every module. Contract violations are programming
// errors on the caller side; the rest are runtime conditions the CLI maps to
// exit codes.

#include <stdexcept>
#include <string>

namespace belief {

class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by external scorer/extractor/generator adapters and by any port that
// cannot produce a value. Never swallowed into a default.
class BackendError : public std::runtime_error {
public:
    BackendError(std::string backend, const std::string& what)
        : std::runtime_error(backend + " backend: " + what), backend_(std::move(backend)) {}

    const std::string& backend() const noexcept { return backend_; }

private:
    std::string backend_;
};

class IngestionError : public std::runtime_error {
public:
    explicit IngestionError(const std::string& what) : std::runtime_error(what) {}
};

class VerificationError : public std::runtime_error {
public:
    VerificationError(std::size_t event_index, const std::string& what)
        : std::runtime_error("event " + std::to_string(event_index) + ": " + what),
          event_index_(event_index) {}

    std::size_t event_index() const noexcept { return event_index_; }

private:
    std::size_t event_index_;
};

inline void require(bool cond, const char* what) {
    if (!cond) throw ContractViolation(what);
}

} // namespace belief
