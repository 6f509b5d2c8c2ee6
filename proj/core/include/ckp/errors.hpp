#ifndef CKP_ERRORS_HPP
#define CKP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ckp {

// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A truncated operator cannot support the requested number of negative orders.
class DepthExhausted : public Error {
public:
    using Error::Error;
};

// A pseudo-differential operator with negative orders was applied to a function.
class NegativeOrderApplication : public Error {
public:
    using Error::Error;
};

// Integration would create an antiderivative atom nested deeper than allowed.
class NestingTooDeep : public Error {
public:
    using Error::Error;
};

// A scaling substitution left an odd power of the scale constant behind.
class OddScaleResidue : public Error {
public:
    using Error::Error;
};

// Antiderivative atoms survived in a quantity that must be local.
class ResidualNonlocal : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace ckp

#endif
