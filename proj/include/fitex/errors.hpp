#pragma once

#include <stdexcept>
#include <string>

namespace fitex {

// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller violated an operation's precondition (dimension mismatch,
// invalid circuit handed to an evaluator, conflicting sample labels, ...).
class contract_error : public error {
public:
    explicit contract_error(const std::string& msg) : error(msg) {}
};

// A configured search ceiling or enumeration budget was exhausted
// before the operation could produce a certified answer.
class budget_error : public error {
public:
    budget_error(const std::string& msg, int cap = -1) : error(msg), cap_reached(cap) {}
    int cap_reached;
};

// Malformed text input; positions are 1-based, 0 = unknown.
class parse_error : public error {
public:
    parse_error(const std::string& msg, int line = 0, int column = 0)
        : error(format(msg, line, column)), line(line), column(column) {}
    int line;
    int column;

private:
    static std::string format(const std::string& msg, int line, int column) {
        if (line <= 0) return msg;
        std::string s = "line " + std::to_string(line);
        if (column > 0) s += ", column " + std::to_string(column);
        return s + ": " + msg;
    }
};

} // namespace fitex
