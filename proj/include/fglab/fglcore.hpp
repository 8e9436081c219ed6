#pragma once

#include <string>
#include <vector>

#include "fglab/series.hpp"

namespace fglab {

// A formal group law bud: F(x,y) modulo total degree bound+1.
// When graded is set, the coefficient of x^i y^j must be homogeneous of
// degree i+j-1 in the generator degrees of the base ring.
struct FormalGroupLaw {
    TruncSeries F;
    bool graded = false;

    const Ring& ring() const { return F.ring(); }
    int bound() const { return F.bound(); }
};

struct AxiomFailure {
    std::string axiom;    // "unit", "commutativity", "associativity"
    std::string monomial; // lowest offending monomial
};

struct ValidationReport {
    std::vector<AxiomFailure> failures;
    bool ok() const { return failures.empty(); }
    std::string str() const;
};

ValidationReport validate_fgl(const TruncSeries& F);
// Validates and wraps; throws InvalidArgument with the report on failure.
FormalGroupLaw make_fgl(TruncSeries F, bool graded = false);

FormalGroupLaw additive_fgl(const Ring& r, int bound);
FormalGroupLaw multiplicative_fgl(const Ring& r, int bound);
FormalGroupLaw fgl_change_ring(const FormalGroupLaw& G, const Ring& to);

// File format: "ring=...; bound=...; grading=declared|none" then the series.
std::string write_fgl(const FormalGroupLaw& G);
FormalGroupLaw read_fgl(std::string_view text);

// d_n = p when n is a power of the prime p, otherwise 1.
long cocycle_divisor(int n);
// ((x+y)^n - x^n - y^n) / d_n over ZZ, bound n.
TruncSeries symmetric_cocycle(int n, const Ring& r);
TruncSeries symmetric_cocycle(int n);

// F(a, b) for series a, b sharing variables and bound.
TruncSeries formal_sum(const FormalGroupLaw& G, const TruncSeries& a, const TruncSeries& b);
TruncSeries formal_inverse(const FormalGroupLaw& G);
// [n](x) for any integer n.
TruncSeries n_series(const FormalGroupLaw& G, long n);
// [1/n](x); NonUnitDenominator when n is not a unit.
TruncSeries n_series_inverse(const FormalGroupLaw& G, long n);

// F^phi(x,y) = phi^{-1}(F(phi x, phi y)).
FormalGroupLaw coordinate_change(const FormalGroupLaw& G, const TruncSeries& phi);

// f(x) = 1 / F_x(0, x); reliable through degree bound-1.
TruncSeries invariant_differential(const FormalGroupLaw& G);
// Termwise antiderivative of the invariant differential. With rationalize
// set, torsion-free bases are first extended to their rationalization;
// otherwise every denominator must be invertible in the base.
TruncSeries logarithm(const FormalGroupLaw& G, bool rationalize = true);
TruncSeries exponential(const FormalGroupLaw& G, bool rationalize = true);

struct HomCheck {
    bool is_hom = false;
    Value derivative;
    std::string first_failure; // lowest monomial where the identity fails
};
HomCheck check_homomorphism(const TruncSeries& phi, const FormalGroupLaw& G, const FormalGroupLaw& H);

struct GradingReport {
    bool ok = true;
    std::vector<std::string> failures;
};
GradingReport grading_check(const FormalGroupLaw& G);

// Univariate phi(x) viewed in variable `var` of `vars`.
TruncSeries embed_univariate(const TruncSeries& phi, const std::vector<std::string>& vars, int var);
std::string render_key(SeriesKey k, const std::vector<std::string>& vars);

} // namespace fglab
