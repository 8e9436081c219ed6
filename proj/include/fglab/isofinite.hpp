#pragma once

#include <string>
#include <vector>

#include "fglab/fglcore.hpp"

namespace fglab {

// One node of the lifting tree: phi = b_0 x +_H b_1 x^p +_H ... +_H b_{j} x^{p^j}.
struct BudIsoNode {
    std::vector<Value> b;
    int parent = -1; // index in the previous level
    TruncSeries phi; // bound p^{j+1}
};

// Level j+1 holds the solutions b_0..b_j of
//   b_0^{p^n-1} = v                 (v = u_n / u'_n)
//   A b_j^{p^n} + B b_j + w = 0     (A = u'_n, B = -u_n^{p^j}, w computed from b_0..b_{j-1})
// read off the coefficient of x^{p^j} in V_H(phi^{(p^n)}(x)) = phi(V_G(x)).
struct BudIsoLevel {
    int k = 0;
    int n = 0;
    int64_t p = 0;
    Ring field;
    std::vector<std::vector<BudIsoNode>> levels; // levels[j] = level j+1
    std::string reason;                          // set when empty by the height dichotomy
    bool verified = false;                       // every phi passed check_homomorphism at p^k

    const std::vector<BudIsoNode>& top() const { return levels.back(); }
    size_t count() const { return levels.empty() ? 0 : levels.back().size(); }
    std::vector<TruncSeries> isomorphisms() const;
};

// G and H are p-typical laws over the same finite field with bound at least p^{k+n-1}.
BudIsoLevel bud_isomorphisms(const FormalGroupLaw& G, const FormalGroupLaw& H, int k);

struct FiniteStabilizerGroup {
    int64_t p = 0;
    int n = 0, k = 0, m = 0;
    std::vector<TruncSeries> elements; // bound p^k - 1
    std::vector<std::vector<int>> table; // table[i][j] = index of elements[i] o elements[j]
    std::vector<size_t> level_counts;
    int identity = -1;
    bool closed = false;
    bool inverses = false;
    bool associative = false;
    bool stabilizer_relation = false; // every coefficient a satisfies a^{p^n} = a
    size_t order() const { return elements.size(); }
};

// Automorphisms of the p^k-bud of G after base change to GF(p^m).
FiniteStabilizerGroup automorphism_group(const FormalGroupLaw& G, int k, int m);

enum class SplitMode {
    Nonempty, // some level-k isomorphism is defined over GF(p^m)
    Complete, // all (p^n-1) p^{n(k-1)} of them are
};
// Least m (a multiple of the base degree) meeting the mode; CapExceeded past p^m > 2^16.
int minimal_splitting_degree(const FormalGroupLaw& G, const FormalGroupLaw& H, int k, SplitMode mode = SplitMode::Nonempty);

// p-typical law over `field` from a torsion-free lift: Cartier typification, then reduction.
FormalGroupLaw ptypical_reduction(const FormalGroupLaw& lift, int64_t p, const Ring& field);

Ring finite_field_ring(int64_t p, int m);

} // namespace fglab
