#pragma once

#include <stdexcept>
#include <string>

namespace fglab {

// Every library failure derives from Error; kind() is the stable tag used by the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define FGLAB_ERROR(Name)                                                      \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    };

FGLAB_ERROR(NonPrimeModulus)
FGLAB_ERROR(ReducibleModulusPolynomial)
FGLAB_ERROR(InhomogeneousRelation)
FGLAB_ERROR(InfiniteRing)
FGLAB_ERROR(ParseError)
FGLAB_ERROR(DivisionByNonUnit)
FGLAB_ERROR(RingMismatch)
FGLAB_ERROR(BoundMismatch)
FGLAB_ERROR(NonzeroConstantTerm)
FGLAB_ERROR(NonUnitLinearCoefficient)
FGLAB_ERROR(UnknownVariable)
FGLAB_ERROR(NonUnitDenominator)
FGLAB_ERROR(IntegralityFailure)
FGLAB_ERROR(UnsupportedBase)
FGLAB_ERROR(PrecisionExhausted)
FGLAB_ERROR(WrongCharacteristic)
FGLAB_ERROR(NonvanishingDerivative)
FGLAB_ERROR(HeightTooSmall)
FGLAB_ERROR(HeightMismatch)
FGLAB_ERROR(NotPTypicalCoordinate)
FGLAB_ERROR(CapExceeded)
FGLAB_ERROR(DegreeOverflow)
FGLAB_ERROR(NonStabilizing)
FGLAB_ERROR(UnsupportedIdeal)
FGLAB_ERROR(NotRegular)
FGLAB_ERROR(InvalidArgument)

#undef FGLAB_ERROR

// Carries the integer that could not be inverted.
class NonInvertibleDenominator : public Error {
public:
    NonInvertibleDenominator(const std::string& denominator, const std::string& context)
        : Error("NonInvertibleDenominator", denominator + " (" + context + ")"),
          denominator_(denominator) {}
    const std::string& denominator() const noexcept { return denominator_; }

private:
    std::string denominator_;
};

} // namespace fglab
