#pragma once

#include <stdexcept>
#include <string>

namespace hydrospec {

// Bad arguments, mismatched precision contexts, shape mismatches.
class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Division by exact zero and similar domain violations.
class arithmetic_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed decimal strings or unreadable spectrum/CSV files.
class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// QZ non-convergence, singular pencils, failed fits.
class solver_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace hydrospec
