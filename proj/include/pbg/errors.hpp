#pragma once

#include <stdexcept>
#include <string>

namespace pbg {

// Base for every domain error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// materials
struct WavelengthOutOfRange : Error { using Error::Error; };
struct NegativeIndexSquared : Error { using Error::Error; };
struct NonUnitVector : Error { using Error::Error; };

// stack
struct UnknownMaterial : Error { using Error::Error; };
struct NonPositiveThickness : Error { using Error::Error; };
struct EmptyStack : Error { using Error::Error; };
struct SingularScattering : Error { using Error::Error; };

// spdc
struct EvanescentIdler : Error { using Error::Error; };
struct GridTooNarrow : Error { using Error::Error; };

// biphoton
struct AsymmetricGrid : Error { using Error::Error; };
struct NyquistViolation : Error { using Error::Error; };
struct VanishingState : Error { using Error::Error; };
struct NonUniformGrid : Error { using Error::Error; };
struct ZeroRow : Error { using Error::Error; };

// cli / scenario
struct NoPeakPair : Error { using Error::Error; };
struct ConfigInvalid : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

} // namespace pbg
