#pragma once

#include <stdexcept>
#include <string>

namespace evokit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define EVOKIT_ERROR(NAME)                                                     \
    struct NAME : Error {                                                      \
        explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {}     \
    }

EVOKIT_ERROR(DuplicateGeneType);
EVOKIT_ERROR(EmptyRegistry);
EVOKIT_ERROR(UnknownTypeError);
EVOKIT_ERROR(IndexError);
EVOKIT_ERROR(InvalidMove);
EVOKIT_ERROR(NotPermutation);
EVOKIT_ERROR(LayoutMismatch);
EVOKIT_ERROR(LengthPolicyError);
EVOKIT_ERROR(RepairFailed);
EVOKIT_ERROR(WeightError);
EVOKIT_ERROR(PenaltyRangeError);
EVOKIT_ERROR(ShapeError);
EVOKIT_ERROR(ConfigError);
EVOKIT_ERROR(SeedValidationError);
EVOKIT_ERROR(InstanceError);
EVOKIT_ERROR(InsufficientData);
EVOKIT_ERROR(TooLarge);
EVOKIT_ERROR(TuneFailure);
EVOKIT_ERROR(LsApplicabilityError);

#undef EVOKIT_ERROR

}  // namespace evokit
