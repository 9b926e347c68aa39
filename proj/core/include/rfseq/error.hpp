#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rfseq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A frequency (or derived quantity) outside the alias-free band [0, f_s/2).
class OutOfBandError : public Error {
public:
    using Error::Error;
};

/// Invalid user input: bad durations, inconsistent gate timing, bad flags.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A value does not fit the fixed-width field it must be stored in.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// One of the on-chip lookup tables cannot hold the compiled library.
class CapacityError : public Error {
public:
    CapacityError(std::string table, std::size_t required, std::size_t limit,
                  const std::string& what)
        : Error(what), table_(std::move(table)), required_(required), limit_(limit) {}

    const std::string& table() const noexcept { return table_; }
    std::size_t required() const noexcept { return required_; }
    std::size_t limit() const noexcept { return limit_; }

private:
    std::string table_;
    std::size_t required_;
    std::size_t limit_;
};

/// Raised by the cycle simulator when the modeled hardware would fault.
class SimulationFault : public Error {
public:
    SimulationFault(std::uint64_t cycle, int channel, int parameter, const std::string& what)
        : Error(what), cycle_(cycle), channel_(channel), parameter_(parameter) {}

    std::uint64_t cycle() const noexcept { return cycle_; }
    int channel() const noexcept { return channel_; }
    int parameter() const noexcept { return parameter_; }

private:
    std::uint64_t cycle_;
    int channel_;
    int parameter_;
};

}  // namespace rfseq
