#pragma once

#include <stdexcept>
#include <string>

namespace mll {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input/validation failures. The CLI maps these to exit code 2.
struct NotPrime : Error { using Error::Error; };
struct RamifiedPrime : Error { using Error::Error; };
struct NonIntegralElement : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// Resource-cap exhaustion. The CLI maps these to exit code 3.
struct CapError : Error { using Error::Error; };
struct CapExceeded : CapError { using CapError::CapError; };
struct DimensionCap : CapError { using CapError::CapError; };
struct SearchSpaceCap : CapError { using CapError::CapError; };
struct PrecisionExhausted : CapError { using CapError::CapError; };

}  // namespace mll
