#ifndef XSTRAT_ERRORS_HPP
#define XSTRAT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xstrat {

/// Malformed repository-format or index input. `line()` is 1-based; 0 means
/// the error is not tied to a particular line (e.g. a premature end of input).
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          m_Line(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return m_Line; }

private:
    std::size_t m_Line;
};

/// Sampler parameters outside their admissible range, or a split that would
/// leave one partition empty.
class InvalidConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A metric was requested on input for which it has no value (empty test set).
class UndefinedMetric : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace xstrat

#endif
