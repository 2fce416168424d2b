#pragma once

#include <stdexcept>
#include <string>

namespace rbskit {

enum class Errc {
    DisconnectedGraph,
    DuplicateEdge,
    IndexOutOfRange,
    NegativeRate,
    LengthMismatch,
    OddSideForbidden,
    DimensionMismatch,
    SingularResolvent,
    TimeDependentA,
    UnresolvedModes,
    NoResonantTone,
    ValidityViolation,
    SingularAeff,
    UnknownDevice,
    OverlappingPairs,
    RatioUnreachable,
    RegimeViolation,
    PortMismatch,
    NotAtGCC,
    NotAt5050,
    SearchLimitExceeded,
    NoConvergence,
    DegenerateSpectrum,
    StepFailure,
    InsufficientWindow,
    SchemaError,
};

const char* errc_name(Errc c) noexcept;

// Validity-guard failures map to CLI exit code 3, everything else to 2.
bool is_validity_guard(Errc c) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace rbskit
