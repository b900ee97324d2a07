#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lineorient {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDirector : public Error {
public:
    using Error::Error;
};

class InvalidAux : public Error {
public:
    using Error::Error;
};

/// Input outside the domain of an operation (singular inversion, non-uniaxial tensor, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Consecutive path samples are too far apart for the lift to be unique.
class StepTooLarge : public Error {
public:
    StepTooLarge(std::size_t step, double size, double bound)
        : Error("step " + std::to_string(step) + " has |dQ| = " + std::to_string(size) +
                " >= bound " + std::to_string(bound)),
          step(step), size(size), bound(bound) {}
    std::size_t step;
    double size;
    double bound;
};

class InitialMismatch : public Error {
public:
    using Error::Error;
};

/// A mesh edge spans a change in Q that the mesh cannot resolve.
class EdgeStepTooLarge : public Error {
public:
    EdgeStepTooLarge(int u, int v, double size, double bound)
        : Error("edge (" + std::to_string(u) + "," + std::to_string(v) + ") has |dQ| = " +
                std::to_string(size) + " >= bound " + std::to_string(bound)),
          u(u), v(v), size(size), bound(bound) {}
    int u;
    int v;
    double size;
    double bound;
};

class GapTooLarge : public Error {
public:
    GapTooLarge(std::size_t index, double gap)
        : Error("angular gap at sample " + std::to_string(index) + " is " + std::to_string(gap) +
                " rad, loop is under-sampled"),
          index(index), gap(gap) {}
    std::size_t index;
    double gap;
};

class NonInteger : public Error {
public:
    using Error::Error;
};

class MeshingError : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// Inconsistent numerical data (flux mismatch, incompatible right-hand side, ...).
class DataError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace lineorient
