#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dcfwb {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t pos)
        : Error(what + " at position " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

// A configured size bound was exceeded.
class CapOverflow : public Error {
public:
    using Error::Error;
};

class NoLeader : public Error {
public:
    using Error::Error;
};

class MissingAssignment : public Error {
public:
    using Error::Error;
};

class Inconsistent : public Error {
public:
    using Error::Error;
};

// The tower of extensions could not be represented (e.g. a level is reducible).
class TowerLimitation : public Error {
public:
    using Error::Error;
};

// Outside the fragment supported by the closure engine or the consistency oracle.
class Unsupported : public Error {
public:
    using Error::Error;
};

// Bounded search hit its boundary while the answer was still open.
class Horizon : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

} // namespace dcfwb
