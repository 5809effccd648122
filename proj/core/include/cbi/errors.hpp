#pragma once

#include <stdexcept>
#include <string>

namespace cbi {

enum class Errc {
    NotDoublySymmetric,
    NotIrreducible,
    NonPositiveEigenvalue,
    StepUnderflow,
    QuadratureMismatch,
    NotPureImmigration,
    InvalidStep,
    EstimatorUndefined,
    NonPositiveEstimate,
    DegenerateDenominator,
    NotCritical,
    UnknownKey,
    MissingKey,
    TypeError,
    InvalidMeasureAtom,
    IoError,
};

const char* errc_name(Errc c);

/// True for input/contract violations (CLI exit 1); false for numerical
/// failures detected mid-computation (CLI exit 2).
bool errc_is_validation(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace cbi
