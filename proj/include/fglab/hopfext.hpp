#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fglab/fglcore.hpp"
#include "fglab/linalg.hpp"

namespace fglab {

// Universal n-bud over L<n> = ZZ[x_1, ..., x_{n-1}], deg x_i = i. The degree k
// part is Gamma_k(x_1..x_{k-2}) + x_{k-1} C_k, normalized so that the fixed
// integer combination sum_i lambda_i (coefficient of x^i y^{k-i}) of Gamma_k
// vanishes; that combination then reads off the coordinate x_{k-1}.
struct UniversalBud {
    int n = 0;
    FormalGroupLaw law;                       // bound n, graded
    std::vector<std::vector<mpz_class>> lambda; // lambda[k] for 2 <= k <= n
};
UniversalBud universal_bud(int n);
// Coordinates (x_1..x_{n-1}) of an n-bud over any ring.
std::vector<Value> bud_coordinates(const UniversalBud& U, const TruncSeries& G);

struct AlgebroidCheck {
    std::string axiom;
    bool ok = false;
    std::string detail;
};

// Graded Hopf algebroid (A, Gamma) with Gamma = A[e_1, ..., e_m] free over A.
// Structure maps are tables of generator images. Gamma^{tensor s} over A is
// modelled as the chain ring A[e^(1), ..., e^(s)] with A placed leftmost.
struct GradedHopfAlgebroid {
    std::string name;
    int64_t p = 0; // 0 for the bud algebroid over ZZ
    int T = 0;
    Ring A;
    Ring Gamma;                  // generators: those of A, then the extras
    std::vector<Value> eta_R;    // per A generator, in Gamma
    std::vector<Value> delta;    // per extra generator, in chain_ring(2)
    std::vector<Value> antipode; // per extra generator, in Gamma
    std::vector<AlgebroidCheck> checks;

    int base_gens() const { return A->ngens(); }
    int extra_gens() const { return Gamma->ngens() - A->ngens(); }
    bool verified() const;
    // A tensor Gamma^{tensor s} over the given coefficient ring (default: exact base).
    Ring chain_ring(int s, const Ring& coefficients = nullptr) const;
};

// (L<n>_*, W<n>_{0,*}): strict isomorphisms of n-buds, right unit from the
// transported universal bud, coproduct from composition.
struct BudAlgebroid {
    UniversalBud bud;
    GradedHopfAlgebroid H;
};
BudAlgebroid build_bud_algebroid(int n, int T);

// (V_*, V_*[t_1, ...]) over ZZ_(p), keeping u_k, t_k with p^k - 1 <= T.
GradedHopfAlgebroid build_ptypical_algebroid(int64_t p, int T);

// Generators and structure images are checked exactly (degree, counit, coassociativity, antipode).
std::vector<AlgebroidCheck> verify_algebroid(const GradedHopfAlgebroid& H);

// A / (p?, listed generators of A), shifted in internal degree. The listed
// ideal must be invariant; this is checked when the complex is built.
struct GradedComodule {
    int shift = 0;
    bool mod_p = false;
    std::vector<std::string> killed;
    std::string str() const;
};

enum class Coefficients {
    Integers,   // exact over ZZ
    PAdic,      // ZZ_(p) known modulo p^K
    PrimeField, // GF(p)
};

struct ExtOptions {
    int64_t p = 0; // required unless the algebroid already fixes it
    int K = 0;     // precision; 0 means exact over ZZ
    bool strict = false; // PrecisionExhausted when a free summand appears in s >= 1 at finite precision
};

// Reduced cobar complex: C^{s,t} is spanned by monomials x^alpha [m_1 | ... | m_s]
// with every m_j a nonconstant monomial in the extras; d = sum (-1)^i d^i.
struct CobarComplex {
    const GradedHopfAlgebroid* H = nullptr;
    GradedComodule M;
    int s_max = 0, T = 0;
    Coefficients coefficients = Coefficients::Integers;
    int64_t p = 0;
    int K = 0;
    Ring base;                                          // working coefficient ring
    std::vector<Ring> rings;                            // chain rings 0..s_max+1
    std::map<std::pair<int, int>, std::vector<Mono>> basis; // (s, t), 0 <= s <= s_max+1
    std::map<std::pair<int, int>, IntMatrix> d;        // d^{s,t}: C^{s,t} -> C^{s+1,t}, columns = source
    bool d_squared_zero = false;

    const std::vector<Mono>& cells(int s, int t) const;
    std::string render(int s, const Mono& m) const;
    // Coordinates of a chain-ring element (degree t) in the basis of C^{s,t}.
    std::vector<mpz_class> coordinates(int s, int t, const Value& v) const;
};
CobarComplex cobar_complex(const GradedHopfAlgebroid& H, const GradedComodule& M, int s_max, int T,
                           const ExtOptions& opts = {});

struct ExtGroup {
    int free_rank = 0;              // over GF(p): the dimension
    std::vector<mpz_class> torsion; // orders > 1, each dividing the next
    bool is_zero() const { return free_rank == 0 && torsion.empty(); }
};

struct ExtChart {
    int s_max = 0, T = 0;
    Coefficients coefficients = Coefficients::Integers;
    int64_t p = 0;
    int K = 0;
    std::map<std::pair<int, int>, ExtGroup> groups; // (s, t)
    bool d_squared_zero = false;

    const ExtGroup& at(int s, int t) const;
    std::string group_str(const ExtGroup& g) const;
    // "exact" or "mod p^K" (free summands may hide torsion of order >= p^K).
    std::string precision() const;
    std::string table() const;
};
ExtChart ext_chart(const CobarComplex& C, bool strict = false);
ExtChart ext_chart(const GradedHopfAlgebroid& H, const GradedComodule& M, int s_max, int T, const ExtOptions& opts = {});

struct ClassOrder {
    bool cocycle = false;
    bool infinite = false;
    bool beyond_precision = false; // not killed below p^K
    mpz_class order = 0;
};
// Order of the class of a chain-ring element of bidegree (s, t).
ClassOrder class_order(const CobarComplex& C, int s, int t, const Value& element);

} // namespace fglab
