#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fglab/fglcore.hpp"

namespace fglab {

struct PSeriesData {
    int64_t p = 0;
    TruncSeries p_series;
    std::vector<Value> coefficients; // a_0 .. a_N of [p](x)
    int hmax = 0;                    // floor(log_p N)
    std::optional<int> height;       // unset when [p] vanishes to the bound ("at least hmax")
    Value vn;                        // a_{p^h}, of grading degree p^h - 1
    int vn_degree = 0;
    // Over non-fields: generator lists of I_1 = (p), I_2 = (p, v_1), ...
    std::vector<std::vector<std::string>> ideal_chain;
    bool field = true;

    std::string height_str() const;
};

// Reduces a law over ZZ, ZZ_(p), ZZ/p^K, GR or polynomial rings over those to characteristic p.
FormalGroupLaw reduce_mod_p(const FormalGroupLaw& G, int64_t p);

// Requires characteristic p. Over non-fields a p-typical coordinate is needed: the chain is
// then read off as I_{n+1} = I_n + (a_{p^n} mod I_n).
PSeriesData p_series_analyze(const FormalGroupLaw& G, int64_t p, bool ptypical_coordinate = false);

struct FrobeniusTwist {
    FormalGroupLaw twist;
    bool frobenius_is_hom = false; // x^p : G -> G^(p)
};
FrobeniusTwist frobenius_twist(const FormalGroupLaw& G);

// g with phi(x) = g(x^p), bound floor(N/p).
TruncSeries frobenius_factor(const TruncSeries& phi);

// V_n with [p](x) = V_n(x^{p^n}); HeightTooSmall when [p] does not factor.
TruncSeries verschiebung_series(const FormalGroupLaw& G, int n);
// Compares V_n with u_n x +_G u_{n+1} x^p +_G ... where u[i] is u_{i+1}.
bool verschiebung_matches(const FormalGroupLaw& G, const TruncSeries& V, int n, const std::vector<Value>& u);

} // namespace fglab
