#pragma once

#include <stdexcept>
#include <string>

namespace precoh {

// Base for all validation and runtime failures in the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define PRECOH_ERROR_TYPE(Name)                                   \
    struct Name : Error {                                         \
        explicit Name(const std::string& msg) : Error(msg) {}     \
    }

// denmat
PRECOH_ERROR_TYPE(NotHermitian);
PRECOH_ERROR_TYPE(NotPositive);
PRECOH_ERROR_TYPE(TraceMismatch);
PRECOH_ERROR_TYPE(DimMismatch);
PRECOH_ERROR_TYPE(ZeroMatrix);
PRECOH_ERROR_TYPE(NonPositiveTemperature);

// collision
PRECOH_ERROR_TYPE(NotUnitary);
PRECOH_ERROR_TYPE(BadSchedule);
PRECOH_ERROR_TYPE(NonUnitaryDrift);

// transport
PRECOH_ERROR_TYPE(UnstableStep);
PRECOH_ERROR_TYPE(GridTooShort);
PRECOH_ERROR_TYPE(FrontNotFormed);
PRECOH_ERROR_TYPE(WindowSaturated);

// collapse
PRECOH_ERROR_TYPE(OffSimplex);
PRECOH_ERROR_TYPE(StepTooLarge);
PRECOH_ERROR_TYPE(TooManySteps);

// measurement
PRECOH_ERROR_TYPE(DomainError);
PRECOH_ERROR_TYPE(CellNarrowerThanMFP);
PRECOH_ERROR_TYPE(BadParams);

// cli
PRECOH_ERROR_TYPE(UnknownKey);
PRECOH_ERROR_TYPE(MissingRequired);
PRECOH_ERROR_TYPE(TypeError);

#undef PRECOH_ERROR_TYPE

}  // namespace precoh
