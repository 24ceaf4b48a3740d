#pragma once

#include <stdexcept>
#include <string>

namespace segtrust {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input outside the documented domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Ciphertext/key binding violated or key material unusable.
class KeyError : public Error {
public:
    using Error::Error;
};

// Supplied encryption randomness is not a unit mod n.
class RandomnessError : public Error {
public:
    using Error::Error;
};

class GenerationError : public Error {
public:
    using Error::Error;
};

class EncodingError : public Error {
public:
    using Error::Error;
};

// Interest profiles of unequal length.
class ProfileError : public Error {
public:
    using Error::Error;
};

// Pair not within communication range.
class NotInRangeError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class DegenerateQueryError : public Error {
public:
    using Error::Error;
};

class UnreachableError : public Error {
public:
    using Error::Error;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

class NoOpinionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

} // namespace segtrust
