#pragma once

#include <stdexcept>
#include <string>

namespace nullprop {

// Every failure mode of the library is a named exception type so callers
// (and the CLI exit-code mapping) can tell them apart.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define NULLPROP_ERROR(NAME)                                        \
    struct NAME : Error {                                           \
        explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
    }

NULLPROP_ERROR(DegenerateInput);
NULLPROP_ERROR(EmptyPhaseSet);
NULLPROP_ERROR(PointInsideBall);
NULLPROP_ERROR(NoMargin);
NULLPROP_ERROR(NotInSigma);
NULLPROP_ERROR(PathSearchFailed);
NULLPROP_ERROR(EmptyGrid);
NULLPROP_ERROR(HypothesisViolated);
NULLPROP_ERROR(GeometryFailure);
NULLPROP_ERROR(ZeroData);
NULLPROP_ERROR(NonExact);
NULLPROP_ERROR(OutOfDomain);
NULLPROP_ERROR(DegeneratePoint);
NULLPROP_ERROR(DegeneratePair);
NULLPROP_ERROR(BranchInconsistent);
NULLPROP_ERROR(BudgetExceeded);
NULLPROP_ERROR(ProvisoViolated);
NULLPROP_ERROR(IllConditioned);
NULLPROP_ERROR(StabilityLost);
NULLPROP_ERROR(MarginExhausted);
NULLPROP_ERROR(NoPhaseFound);
NULLPROP_ERROR(DegenerateDerivative);
NULLPROP_ERROR(PhaseDegenerate);
NULLPROP_ERROR(ParseError);
NULLPROP_ERROR(FlatCurve);

#undef NULLPROP_ERROR

} // namespace nullprop
