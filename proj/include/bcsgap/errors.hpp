#pragma once

#include <stdexcept>
#include <string>

namespace bcsgap {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
   using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition (bad bracket, bad size, ...).
class PreconditionError : public Error {
public:
   using Error::Error;
};

// An argument lies outside the mathematical domain of a function.
class DomainError : public Error {
public:
   using Error::Error;
};

// The model (potential, couplings) violates its invariants.
class ModelError : public Error {
public:
   using Error::Error;
};

// A configuration document is malformed or out of range.
class ConfigError : public Error {
public:
   using Error::Error;
};

class IoError : public Error {
public:
   using Error::Error;
};

// An iterative method stopped before meeting its tolerance. Carries the best
// estimate and the achieved error measure at the point of giving up.
class NonConvergenceError : public Error {
public:
   NonConvergenceError(const std::string &what, double estimate, double error_estimate)
       : Error(what), estimate_(estimate), error_estimate_(error_estimate)
   {
   }

   double estimate() const noexcept { return estimate_; }
   double error_estimate() const noexcept { return error_estimate_; }

private:
   double estimate_;
   double error_estimate_;
};

} // namespace bcsgap
