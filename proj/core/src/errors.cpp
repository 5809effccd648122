#include "cbi/errors.hpp"

namespace cbi {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::NotDoublySymmetric: return "NotDoublySymmetric";
        case Errc::NotIrreducible: return "NotIrreducible";
        case Errc::NonPositiveEigenvalue: return "NonPositiveEigenvalue";
        case Errc::StepUnderflow: return "StepUnderflow";
        case Errc::QuadratureMismatch: return "QuadratureMismatch";
        case Errc::NotPureImmigration: return "NotPureImmigration";
        case Errc::InvalidStep: return "InvalidStep";
        case Errc::EstimatorUndefined: return "EstimatorUndefined";
        case Errc::NonPositiveEstimate: return "NonPositiveEstimate";
        case Errc::DegenerateDenominator: return "DegenerateDenominator";
        case Errc::NotCritical: return "NotCritical";
        case Errc::UnknownKey: return "UnknownKey";
        case Errc::MissingKey: return "MissingKey";
        case Errc::TypeError: return "TypeError";
        case Errc::InvalidMeasureAtom: return "InvalidMeasureAtom";
        case Errc::IoError: return "IoError";
    }
    return "UnknownError";
}

bool errc_is_validation(Errc c) {
    switch (c) {
        case Errc::NotDoublySymmetric:
        case Errc::NotIrreducible:
        case Errc::NonPositiveEigenvalue:
        case Errc::NotPureImmigration:
        case Errc::InvalidStep:
        case Errc::NotCritical:
        case Errc::UnknownKey:
        case Errc::MissingKey:
        case Errc::TypeError:
        case Errc::InvalidMeasureAtom:
        case Errc::IoError:
            return true;
        default:
            return false;
    }
}

}  // namespace cbi
