#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// argument outside the domain of a CDF/quantile/map
class DomainError : public Error {
public:
    using Error::Error;
};

// an operation's precondition does not hold (e.g. quantile of a measure without full support)
class PreconditionError : public Error {
public:
    using Error::Error;
};

// a blow-up orbit hits the cut point (0 in cut coordinates)
class BasepointError : public Error {
public:
    BasepointError(const std::string& what, double suggested)
        : Error(what), suggested_basepoint(suggested) {}
    double suggested_basepoint;
};

// pinch functions leave the interior of the fibre interval
class ScaleError : public Error {
public:
    using Error::Error;
};

// a point that must be aperiodic was found periodic within the checked horizon
class AperiodicityError : public Error {
public:
    using Error::Error;
};

// surgery/gluing produced a discontinuous or inconsistent map
class ConstructionError : public Error {
public:
    ConstructionError(const std::string& what, double residual)
        : Error(what), max_residual(residual) {}
    double max_residual;
};

class OracleError : public Error {
public:
    using Error::Error;
};

}  // namespace blowup
