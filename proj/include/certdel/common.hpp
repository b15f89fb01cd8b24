#pragma once

#include <stdexcept>
#include <string>

namespace certdel {

inline constexpr const char* kVersionString = "certdel 0.1.0";

// Base class for all hard failures raised by the library. Recoverable
// outcomes (decode failure, decrypt failure) are values, not exceptions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class AlreadyConsumed : public Error {
public:
    using Error::Error;
};

class RegisterTooLarge : public Error {
public:
    using Error::Error;
};

class BallTooLarge : public Error {
public:
    using Error::Error;
};

class UnsupportedScheme : public Error {
public:
    using Error::Error;
};

class MalformedCiphertext : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// A sampled partition subset had zero probability mass; indicates a bug in
// the partition handed to the dense projector.
class EmptyOutcome : public Error {
public:
    using Error::Error;
};

class PartitionInvalid : public Error {
public:
    using Error::Error;
};

class StrategyUnavailable : public Error {
public:
    using Error::Error;
};

// Malformed or truncated artifact files (.qreg, record/key/cert JSON).
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace certdel
