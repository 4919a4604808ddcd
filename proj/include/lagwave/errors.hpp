#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lagwave {

/// Violated precondition on a physical or numerical parameter.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Specific volume, z or m left the admissible (non-vacuum) range.
class VacuumGuardError : public DomainError {
public:
  using DomainError::DomainError;
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

class UnknownIdentifierError : public ParseError {
public:
  UnknownIdentifierError(const std::string& name, std::size_t offset)
      : ParseError("unknown identifier '" + name + "'", offset), name_(name) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace lagwave
