#pragma once

#include <string>
#include <utility>
#include <variant>

namespace srcmark {

enum class ErrorKind {
    Config,       // invalid configuration or CLI usage
    Environment,  // missing external binary, unusable environment
    Collision,    // clean input already matches the marker grammar
    Plan,         // inconsistent overlay plan
    Scan,         // source does not lex under the language subset
    Manifest,     // manifest/file mismatch
    Io,           // file read/write failure
    Verify,       // round-trip mismatch
};

struct Error {
    ErrorKind kind;
    std::string message;
};

// CLI contract: 0 success, 1 operation failure, 2 config error, 3 environment error.
inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return 2;
        case ErrorKind::Environment: return 3;
        default: return 1;
    }
}

template <typename T>
class [[nodiscard]] Result {
public:
    Result(T value) : state_(std::move(value)) {}
    Result(Error error) : state_(std::move(error)) {}

    bool ok() const { return std::holds_alternative<T>(state_); }
    explicit operator bool() const { return ok(); }

    T& value() & { return std::get<T>(state_); }
    const T& value() const& { return std::get<T>(state_); }
    T&& value() && { return std::get<T>(std::move(state_)); }

    const Error& error() const { return std::get<Error>(state_); }

    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }
    T& operator*() & { return value(); }
    const T& operator*() const& { return value(); }

private:
    std::variant<T, Error> state_;
};

template <>
class [[nodiscard]] Result<void> {
public:
    Result() = default;
    Result(Error error) : error_(std::move(error)), failed_(true) {}

    bool ok() const { return !failed_; }
    explicit operator bool() const { return ok(); }
    const Error& error() const { return error_; }

private:
    Error error_{};
    bool failed_ = false;
};

template <typename T>
Result<T> fail(ErrorKind kind, std::string message) {
    return Result<T>(Error{kind, std::move(message)});
}

}  // namespace srcmark
