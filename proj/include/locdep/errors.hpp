#pragma once

#include <stdexcept>
#include <string>

namespace locdep {

// Malformed structure: unknown index, broken nesting, bad shape.
class structural_error : public std::runtime_error {
public:
    explicit structural_error(const std::string& what) : std::runtime_error(what) {}
};

// Operation needs data the object does not carry (level too low, no enumerator, ...).
class capability_error : public std::runtime_error {
public:
    explicit capability_error(const std::string& what) : std::runtime_error(what) {}
};

// A variance or scale collapsed to zero (or below, after MC noise).
class degeneracy_error : public std::runtime_error {
public:
    explicit degeneracy_error(const std::string& what) : std::runtime_error(what) {}
};

// Bad user input: config fields, CLI arguments, parameter ranges.
class usage_error : public std::runtime_error {
public:
    explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace locdep
