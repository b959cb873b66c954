#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace localgain {

class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Zero/constant polynomial where a proper one is required.
class DegenerateInputError : public Error {
   public:
    using Error::Error;
};

class PoleAtPointError : public Error {
   public:
    PoleAtPointError(const std::string& what, std::complex<double> s) : Error(what), point_(s) {}
    std::complex<double> point() const { return point_; }

   private:
    std::complex<double> point_;
};

class LineResonanceError : public PoleAtPointError {
   public:
    using PoleAtPointError::PoleAtPointError;
};

class ReductionSingularError : public Error {
   public:
    ReductionSingularError(const std::string& what, std::size_t node) : Error(what), node_(node) {}
    std::size_t node() const { return node_; }

   private:
    std::size_t node_;
};

class ConfigError : public Error {
   public:
    using Error::Error;
};

// The boundary reduction does not apply (e.g. an entry is not analytic inside the domain).
class CertificateInapplicableError : public Error {
   public:
    using Error::Error;
};

}  // namespace localgain
