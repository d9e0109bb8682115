#pragma once

#include <stdexcept>
#include <string>

namespace illusionpad {

/// Raised when an input lies outside the domain of a geometric or filter operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a distance or sigma search cannot produce a result.
class SearchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for malformed files or configuration (profiles, layouts, glyph assets).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace illusionpad
