#ifndef PDEIDENT_ERRORS_HPP
#define PDEIDENT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pdeident {

struct Error : std::runtime_error {
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Parameter / domain validation failures.
struct InvalidDomain : Error {
    using Error::Error;
};
struct InvalidParameter : Error {
    using Error::Error;
};
struct InvalidSigma : Error {
    using Error::Error;
};
struct DegenerateOperator : Error {
    using Error::Error;
};
struct UnsupportedDrift : Error {
    using Error::Error;
};
struct OutOfDomain : Error {
    using Error::Error;
};
struct SamePoint : Error {
    using Error::Error;
};

// Numerical failures.
struct RootScanExhausted : Error {
    using Error::Error;
};
struct NotConstructible : Error {
    using Error::Error;
};
struct InvalidScale : Error {
    using Error::Error;
};
struct NonCommuting : Error {
    using Error::Error;
};
struct NonSingular : Error {
    using Error::Error;
};
struct BasisMismatch : Error {
    using Error::Error;
};
struct StepSizeRejected : Error {
    using Error::Error;
};
struct BlowUp : Error {
    using Error::Error;
};
struct GridMismatch : Error {
    using Error::Error;
};
struct IntegratorBlowUp : Error {
    using Error::Error;
};
struct RangeTooNarrow : Error {
    using Error::Error;
};
struct CholeskyFailure : Error {
    using Error::Error;
};

} // namespace pdeident

#endif // PDEIDENT_ERRORS_HPP
