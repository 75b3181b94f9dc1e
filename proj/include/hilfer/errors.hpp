#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hilfer {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(const std::string& name, std::size_t offset)
        : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset)),
          name_(name), offset_(offset) {}
    const std::string& name() const noexcept { return name_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string name_;
    std::size_t offset_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class MissingBinding : public Error {
public:
    explicit MissingBinding(const std::string& name)
        : Error("no binding for variable '" + name + "'"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// The boundary determinant vanished (within tolerance).
class SingularLambda : public Error {
public:
    using Error::Error;
};

/// Pointwise implicit equation g = f(t, y, g) did not settle.
class InnerDivergence : public Error {
public:
    InnerDivergence(const std::string& what, std::size_t node)
        : Error(what), node_(node) {}
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

class OuterDivergence : public Error {
public:
    using Error::Error;
};

/// Invalid configuration file content; carries the 1-based line number (0 if unknown).
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace hilfer
