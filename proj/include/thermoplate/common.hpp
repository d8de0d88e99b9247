#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace thermoplate {

using cx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Error taxonomy. ValidationError covers malformed inputs and broken
// preconditions (CLI exit code 1); NumericError covers failures of the
// numerics on otherwise well-formed inputs (CLI exit code 2).
// ---------------------------------------------------------------------------

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

#define THERMOPLATE_DEFINE_ERROR(Name, Base)                                  \
    class Name : public Base {                                                \
    public:                                                                   \
        explicit Name(const std::string& what) : Base(#Name ": " + what) {}   \
    }

THERMOPLATE_DEFINE_ERROR(ShapeMismatch, ValidationError);
THERMOPLATE_DEFINE_ERROR(ConfigInvalid, ValidationError);
THERMOPLATE_DEFINE_ERROR(PreconditionViolated, ValidationError);
THERMOPLATE_DEFINE_ERROR(MissingIndex, ValidationError);

THERMOPLATE_DEFINE_ERROR(SingularResolvent, NumericError);
THERMOPLATE_DEFINE_ERROR(DegenerateSymbol, NumericError);
THERMOPLATE_DEFINE_ERROR(ZeroModeNotInvertible, NumericError);
THERMOPLATE_DEFINE_ERROR(BoundaryViolation, NumericError);
THERMOPLATE_DEFINE_ERROR(ZeroForcing, NumericError);
THERMOPLATE_DEFINE_ERROR(NoConvergence, NumericError);
THERMOPLATE_DEFINE_ERROR(NonFiniteValue, NumericError);
THERMOPLATE_DEFINE_ERROR(DegenerateDenominator, NumericError);
THERMOPLATE_DEFINE_ERROR(InsufficientBand, NumericError);
THERMOPLATE_DEFINE_ERROR(InternalNumericalFailure, NumericError);

#undef THERMOPLATE_DEFINE_ERROR

// Global worker count for the chunked loops below. Set once at startup
// (CLI --threads / THERMOPLATE_THREADS); defaults to 1.
void set_thread_count(int n);
int thread_count();

// Runs fn(begin, end) over [0, n) split into fixed-size chunks. Chunking is
// independent of the worker count, and every chunk writes disjoint state or
// feeds an order-independent reduction, so results do not depend on the
// schedule.
void parallel_for_chunked(std::size_t n, std::size_t grain,
                          const std::function<void(std::size_t, std::size_t)>& fn);

// Floating-point formatting used by every CSV/JSON writer: 17 significant
// digits so that values round-trip exactly.
std::string fmt_double(double v);

}  // namespace thermoplate
