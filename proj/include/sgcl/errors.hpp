#pragma once

#include <stdexcept>
#include <string>

namespace sgcl {

// Bad arguments, shape mismatches, malformed input files.
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure during training (non-finite loss or gradients).
class divergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A file could not be opened, read or written.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw invalid_input(what);
}

} // namespace detail
} // namespace sgcl
