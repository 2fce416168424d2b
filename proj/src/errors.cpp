#include "rbskit/errors.hpp"

namespace rbskit {

const char* errc_name(Errc c) noexcept
{
    switch (c) {
    case Errc::DisconnectedGraph: return "DisconnectedGraph";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NegativeRate: return "NegativeRate";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::OddSideForbidden: return "OddSideForbidden";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingularResolvent: return "SingularResolvent";
    case Errc::TimeDependentA: return "TimeDependentA";
    case Errc::UnresolvedModes: return "UnresolvedModes";
    case Errc::NoResonantTone: return "NoResonantTone";
    case Errc::ValidityViolation: return "ValidityViolation";
    case Errc::SingularAeff: return "SingularAeff";
    case Errc::UnknownDevice: return "UnknownDevice";
    case Errc::OverlappingPairs: return "OverlappingPairs";
    case Errc::RatioUnreachable: return "RatioUnreachable";
    case Errc::RegimeViolation: return "RegimeViolation";
    case Errc::PortMismatch: return "PortMismatch";
    case Errc::NotAtGCC: return "NotAtGCC";
    case Errc::NotAt5050: return "NotAt5050";
    case Errc::SearchLimitExceeded: return "SearchLimitExceeded";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::DegenerateSpectrum: return "DegenerateSpectrum";
    case Errc::StepFailure: return "StepFailure";
    case Errc::InsufficientWindow: return "InsufficientWindow";
    case Errc::SchemaError: return "SchemaError";
    }
    return "Unknown";
}

bool is_validity_guard(Errc c) noexcept
{
    return c == Errc::ValidityViolation || c == Errc::UnresolvedModes;
}

} // namespace rbskit
