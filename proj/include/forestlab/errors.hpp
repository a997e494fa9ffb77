#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace forestlab {

// Input rejected before any real work started.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Matrix failed the invertibility check |det| > tol.
struct SingularMatrix : ValidationError {
    explicit SingularMatrix(const std::string& what) : ValidationError(what) {}
};

// Requested dimension outside the supported range of the operation.
struct UnsupportedDimension : ValidationError {
    explicit UnsupportedDimension(const std::string& what) : ValidationError(what) {}
};

// Direction vector whose pivot component is exactly zero.
struct ZeroPivot : ValidationError {
    explicit ZeroPivot(const std::string& what) : ValidationError(what) {}
};

// Parameters fall outside the regime where the formula is defined.
struct InvalidRegime : ValidationError {
    explicit InvalidRegime(const std::string& what) : ValidationError(what) {}
};

// Base for "ran out of configured budget, result inconclusive" failures.
struct BudgetExceeded : std::runtime_error {
    std::uint64_t budget;
    BudgetExceeded(const std::string& what, std::uint64_t b)
        : std::runtime_error(what), budget(b) {}
};

// Lattice cell walk near a segment would visit more cells than allowed.
struct EnumerationBudgetExceeded : BudgetExceeded {
    using BudgetExceeded::BudgetExceeded;
};

// Combinatorial witness search exhausted its candidate budget inconclusively.
struct SearchBudgetExceeded : BudgetExceeded {
    using BudgetExceeded::BudgetExceeded;
};

// Box subdivision hit its node budget before certifying either way.
struct RecursionBudgetExceeded : BudgetExceeded {
    using BudgetExceeded::BudgetExceeded;
};

// An arithmetic hypothesis required by a derivation fails at a specific index.
struct HypothesisViolated : std::runtime_error {
    long long index;
    HypothesisViolated(const std::string& what, long long idx)
        : std::runtime_error(what), index(idx) {}
};

// Process exit conventions shared by the command line tool and tests:
// 0 success, 2 invalid input, 3 budget exhausted, 4 certified negative verdict.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitNegative = 4;

}  // namespace forestlab
