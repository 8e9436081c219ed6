#pragma once

#include <map>
#include <string>
#include <vector>

#include "fglab/fglcore.hpp"

namespace fglab {

enum class Convention { Araki, Hazewinkel };

// Log coefficients l_i of x^{p^i}, over QQ[u_1, ..., u_r].
struct LogData {
    int64_t p = 0;
    Convention convention = Convention::Araki;
    Ring ring;
    std::vector<Value> coefficients; // l_0 = 1, l_1, ..., l_r
};

struct PTypicalLaw {
    FormalGroupLaw law; // over ZZ_(p)[u_1:p-1, ..., u_r:p^r-1]
    LogData log;
    TruncSeries p_series;
    // Araki: [p](x) = px +_F u_1 x^p +_F ... exactly.
    // Hazewinkel: the same identity modulo p.
    bool p_series_identity = false;
    bool grading_ok = false;
};

// Largest r with p^r <= N.
int ptypical_rank(int64_t p, int N);
// ZZ_(p)[u1:p-1, ..., ur:p^r-1] (or another base).
RingSpec ptypical_ring_spec(int64_t p, int r, const RingSpec& base);

LogData ptypical_log(int64_t p, int r, Convention c);
PTypicalLaw universal_p_typical(int64_t p, int N, Convention c = Convention::Araki);

// Right-hand side of the p-series identity: v_0 x +_F u_1 x^p +_F ... with v_0 = p.
TruncSeries araki_series(const FormalGroupLaw& G, int64_t p, const std::vector<Value>& u, const Value& v0);

struct TypicalityResult {
    int64_t ell;
    bool vanishes;
    std::string detail; // offending degree or extension used
};
struct TypicalityReport {
    bool p_typical = true;
    std::string route; // "logarithm" or "roots-of-unity"
    std::vector<TypicalityResult> tests;
};
// Tests f_ell = 0 for primes ell != p with ell <= max_ell (and ell <= bound).
TypicalityReport p_typicality_test(const FormalGroupLaw& G, int64_t p, int max_ell);

// f_ell(x) = [1/ell](sum_F zeta^k x) over the extension of a finite field containing mu_ell.
TruncSeries typicality_tester(const FormalGroupLaw& G, int64_t ell);

struct Typification {
    FormalGroupLaw eG;
    TruncSeries phi; // strict isomorphism G -> eG
    bool phi_is_hom = false;
    bool eG_p_typical = false;
};
Typification cartier_typify(const FormalGroupLaw& G, int64_t p);

// Law over GF(p) with logarithm sum x^{p^{ni}} / p^i, reduced mod p.
FormalGroupLaw honda_fgl(int64_t p, int n, int N);

struct RightUnit {
    int64_t p = 0;
    int r = 0;
    Ring ring; // ZZ_(p)[u_1..u_r, t_1..t_r]
    std::vector<Value> eta_u; // eta_R(u_i), i = 1..r (index 0 unused, holds 0)
    bool integral = false;
    bool counit_ok = false;
    bool isomorphism_ok = false;
};
RightUnit right_unit_images(int64_t p, int N);

struct LubinTate {
    FormalGroupLaw law;
    bool special_fiber_is_honda = false;
};
// Universal p-typical law with u_n -> 1 and u_k -> 0 for k > n, over W(F_{p^m})/p^K[u_1..u_{n-1}].
LubinTate lubin_tate_bud(int64_t p, int n, int K, int N, int m = 1);

// Ring map helpers shared with later modules.
// Base change along a finite field inclusion (GF(p^m) into GF(p^m') with m | m').
FormalGroupLaw extend_scalars(const FormalGroupLaw& G, const Ring& L);
FormalGroupLaw specialize(const FormalGroupLaw& G, const Ring& to, const std::vector<Value>& images);

} // namespace fglab
