#pragma once

#include <stdexcept>
#include <string>

namespace hreig {

enum class ErrorKind {
    InvalidArgument,
    Parse,
    Mesh,
    Config,
    Solver,
    Numeric,
    Io,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace hreig
