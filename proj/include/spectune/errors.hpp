#pragma once

#include <stdexcept>
#include <string>

namespace spectune {

/// Invalid argument or violated precondition.
class input_error : public std::invalid_argument {
public:
    explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Linear system too ill-conditioned to solve, even after the jitter ladder.
class conditioning_error : public std::runtime_error {
public:
    conditioning_error(const std::string& what, double condition_estimate)
        : std::runtime_error(what), condition_estimate_(condition_estimate) {}

    double condition_estimate() const { return condition_estimate_; }

private:
    double condition_estimate_;
};

/// Operation invoked in a state that cannot make progress (e.g. exhausted grid).
class state_error : public std::runtime_error {
public:
    explicit state_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numeric postcondition failed (overflow, residue beyond tolerance).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be read or parsed. byte_offset points at the failure site.
class io_error : public std::runtime_error {
public:
    io_error(const std::string& what, long long byte_offset = -1)
        : std::runtime_error(byte_offset >= 0 ? what + " (byte offset " + std::to_string(byte_offset) + ")"
                                              : what),
          byte_offset_(byte_offset) {}

    long long byte_offset() const { return byte_offset_; }

private:
    long long byte_offset_;
};

} // namespace spectune
