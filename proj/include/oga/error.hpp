#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oga {

/// Base of every error the library throws. `kind()` is a stable machine name
/// ("DuplicateNodeId", "SyntaxError", ...) that the HTTP layer reports verbatim.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class DuplicateNodeId : public Error {
public:
    explicit DuplicateNodeId(const std::string& id)
        : Error("DuplicateNodeId", "duplicate node id '" + id + "'"), id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class DanglingEdgeEndpoint : public Error {
public:
    explicit DanglingEdgeEndpoint(const std::string& id)
        : Error("DanglingEdgeEndpoint", "edge endpoint '" + id + "' names no node"), id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class InvalidGraph : public Error {
public:
    explicit InvalidGraph(const std::string& message) : Error("InvalidGraph", message) {}
};

/// Positioned parse failure. Lines and columns are 1-based.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, std::size_t column, const std::string& message)
        : Error("SyntaxError", "line " + std::to_string(line) + ", column " +
                                   std::to_string(column) + ": " + message),
          line_(line), column_(column), detail_(message) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string detail_;
};

class UnsupportedConstruct : public Error {
public:
    explicit UnsupportedConstruct(const std::string& name)
        : Error("UnsupportedConstruct", "unsupported construct: " + name), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class UnknownFormat : public Error {
public:
    explicit UnknownFormat(const std::string& message) : Error("UnknownFormat", message) {}
};

class Unrepresentable : public Error {
public:
    explicit Unrepresentable(const std::string& reason) : Error("Unrepresentable", reason) {}
};

class InvalidConfig : public Error {
public:
    explicit InvalidConfig(const std::string& message) : Error("InvalidConfig", message) {}
};

} // namespace oga
