#pragma once

#include <stdexcept>
#include <string>

namespace sprshift {

// Input/shape errors map to CLI exit 1, failed checks to exit 2.
enum class ErrorKind { InvalidInput, Precondition, Numeric };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string op, const std::string& what)
        : std::runtime_error(op + ": " + what), kind_(kind), op_(std::move(op)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& operation() const { return op_; }

private:
    ErrorKind kind_;
    std::string op_;
};

[[noreturn]] inline void fail_input(const std::string& op, const std::string& what) {
    throw Error(ErrorKind::InvalidInput, op, what);
}
[[noreturn]] inline void fail_pre(const std::string& op, const std::string& what) {
    throw Error(ErrorKind::Precondition, op, what);
}
[[noreturn]] inline void fail_numeric(const std::string& op, const std::string& what) {
    throw Error(ErrorKind::Numeric, op, what);
}

} // namespace sprshift
