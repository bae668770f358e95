// errors.hpp: exception types shared across modules

#pragma once

#include <stdexcept>
#include <string>

namespace avisim {

/// Invalid physical parameters or configuration values.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Configuration file syntax or schema problem, tagged with its location.
class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& msg, int line, int column = 0)
        : ValidationError(format(msg, line, column)), m_line(line), m_column(column)
    {
    }

    int line() const { return m_line; }
    int column() const { return m_column; }

private:
    static std::string format(const std::string& msg, int line, int column)
    {
        if (line <= 0)
            return msg;
        std::string where = "line " + std::to_string(line);
        if (column > 0)
            where += ", column " + std::to_string(column);
        return where + ": " + msg;
    }

    int m_line;
    int m_column;
};

/// The time integration could not proceed (step underflow, non-finite state,
/// or a density-matrix invariant broke at a sample).
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& msg, double time_ns)
        : std::runtime_error(msg + " (t = " + std::to_string(time_ns) + " ns)"),
          m_time(time_ns)
    {
    }

    double time_ns() const { return m_time; }

private:
    double m_time;
};

/// The Liouvillian has more than one stationary state.
class DegenerateSteadyStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace avisim
