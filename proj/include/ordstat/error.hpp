#pragma once

#include <stdexcept>
#include <string>

namespace ordstat {

enum class ErrorKind {
    Validation,           // malformed query (duplicate / unordered indices, size mismatch)
    Range,                // index outside [1, n], d > n
    Input,                // malformed solver input (dimension mismatch, negative counts, NaN)
    InvalidDistribution,  // CDF provider violates monotonicity or normalisation
    InvalidConditional,   // conditional provider returned a non-distribution
    Resource,             // table or enumeration would exceed a configured cap
    Numerical             // result failed a numerical sanity check
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace ordstat
