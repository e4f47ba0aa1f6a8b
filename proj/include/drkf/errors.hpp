#pragma once

#include <stdexcept>
#include <string>

namespace drkf {

// Base class for all numerical / model errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ModelError : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class SingularResolvent : public Error {
public:
    using Error::Error;
};

class NotPD : public Error {
public:
    using Error::Error;
};

class GammaTooSmall : public Error {
public:
    using Error::Error;
};

class IterationCap : public Error {
public:
    using Error::Error;
};

class NonPositiveSample : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

class OrderCapExceeded : public Error {
public:
    using Error::Error;
};

class RootNearCircle : public Error {
public:
    using Error::Error;
};

class InstabilityDetected : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace drkf
