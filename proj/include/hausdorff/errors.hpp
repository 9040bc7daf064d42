#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hausdorff {

// Root of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Expression language -------------------------------------------------------

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, const std::string& what)
        : Error("syntax error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifier : public SyntaxError {
public:
    UnknownIdentifier(std::size_t offset, const std::string& name)
        : SyntaxError(offset, "unknown identifier '" + name + "'"), name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class ArityError : public SyntaxError {
public:
    using SyntaxError::SyntaxError;
};

class DomainError : public Error {
public:
    DomainError(const std::string& subexpr, const std::string& what)
        : Error("domain error in '" + subexpr + "': " + what), subexpr_(subexpr) {}

    const std::string& subexpression() const noexcept { return subexpr_; }

private:
    std::string subexpr_;
};

// Polynomials and witnesses ---------------------------------------------------

class OrderTooLarge : public Error {
public:
    using Error::Error;
};

class OrderMismatch : public Error {
public:
    using Error::Error;
};

// Matrices ------------------------------------------------------------------

class NonFinite : public Error {
public:
    using Error::Error;
};

class SingularColumn : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class SingularConstantPart : public Error {
public:
    using Error::Error;
};

// Quadrature and operators -----------------------------------------------------

class DimensionTooLarge : public Error {
public:
    using Error::Error;
};

class NegativeValueDetected : public Error {
public:
    using Error::Error;
};

class NegativeKernel : public Error {
public:
    using Error::Error;
};

class NonPositiveScale : public Error {
public:
    using Error::Error;
};

class NonPositivePoint : public Error {
public:
    using Error::Error;
};

class DivergentTail : public Error {
public:
    using Error::Error;
};

class PreconditionUnmet : public Error {
public:
    using Error::Error;
};

class GridTooCoarse : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& path, std::size_t line, const std::string& what)
        : Error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          path_(path),
          line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

}  // namespace hausdorff
