#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fglab/coeffring.hpp"
#include "fglab/linalg.hpp"

namespace fglab {

// Degrees over Lambda[u_1..u_N], Lambda = ZZ/p^K. The first `core` variables are
// graded only by internal degree; the remaining free variables also carry their
// own exponent. A multidegree is (core internal degree, free exponents...).
using MultiDeg = std::vector<int>;

struct GradedRing {
    int64_t p = 0;
    int K = 1;
    std::vector<std::string> names;
    std::vector<int> degrees; // internal degrees, all positive
    int core = 0;

    int nvars() const { return static_cast<int>(names.size()); }
    int nfree() const { return nvars() - core; }
    MultiDeg zero() const { return MultiDeg(static_cast<size_t>(nfree()) + 1, 0); }
    MultiDeg shift(int var) const;
    int internal(const MultiDeg& d) const;
    int index(const std::string& name) const;
    // Lambda[u_1..u_N] as a coefficient-ring polynomial ring.
    Ring poly() const;
    std::string str() const;
};

// ZZ/p^K[u_1..u_N] with deg u_k = p^k - 1.
GradedRing v_truncation(int64_t p, int K, int N, int core);

// A finite Lambda-module Lambda^n / rel.
struct FinMod {
    ModSpan rel;
    size_t dim() const { return rel.dim(); }
    int length() const { return static_cast<int>(dim()) * rel.K() - rel.length(); }
    bool is_zero() const { return length() == 0; }
    ModSpan full() const;
};

// Finite abelian p-group sum ZZ/p^(e_i), exponents descending.
struct GroupType {
    std::vector<int> exps;
    int length() const;
    bool is_zero() const { return exps.empty(); }
    std::string str(int64_t p) const;
    bool operator==(const GroupType&) const = default;
};
GroupType group_type(const FinMod& M);
GroupType operator+(GroupType a, const GroupType& b);

// A graded module known one multidegree at a time.
class DegreewiseModule {
public:
    virtual ~DegreewiseModule() = default;
    virtual const GradedRing& ring() const = 0;
    virtual FinMod piece(const MultiDeg& d) const = 0;
    // Multiplication by u_var from piece(d) to piece(d + shift(var)).
    virtual ModMatrix act(int var, const MultiDeg& d) const = 0;
    // Multiplication by a monomial in the variables; by default a composite of act().
    virtual ModMatrix act_mono(const Mono& m, const MultiDeg& d) const;
    // Componentwise lower bound of the support; nullopt entries are unbounded.
    virtual std::vector<std::optional<int>> lower() const = 0;
    // Internal degree at or above which no generators or relations live.
    virtual int settle_degree() const = 0;
    // Models a p-torsion-free module at precision p^K (rather than a torsion module).
    virtual bool lifted() const { return false; }
    virtual std::string str() const = 0;
};
using ModulePtr = std::shared_ptr<const DegreewiseModule>;

// Finitely presented graded module: generators in given multidegrees, relations
// as vectors over Lambda[u_1..u_N] (homogeneous).
class GradedModule : public DegreewiseModule {
public:
    GradedModule(GradedRing R, std::vector<MultiDeg> generators, std::vector<std::vector<Value>> relations,
                 bool lifted = false, std::string name = "");
    // R / (elements), one generator in degree zero.
    static std::shared_ptr<GradedModule> quotient(const GradedRing& R, const std::vector<std::string>& elements, bool lifted = false);

    const GradedRing& ring() const override { return R_; }
    FinMod piece(const MultiDeg& d) const override;
    ModMatrix act(int var, const MultiDeg& d) const override;
    ModMatrix act_mono(const Mono& m, const MultiDeg& d) const override;
    std::vector<std::optional<int>> lower() const override;
    int settle_degree() const override { return settle_; }
    bool lifted() const override { return lifted_; }
    std::string str() const override { return name_; }

private:
    struct Basis;
    const Basis& basis(const MultiDeg& d) const;

    GradedRing R_;
    Ring P_;
    std::vector<MultiDeg> gens_;
    std::vector<std::vector<Value>> rels_;
    std::vector<MultiDeg> rel_degs_;
    bool lifted_;
    std::string name_;
    int settle_ = 0;
    mutable std::map<MultiDeg, std::shared_ptr<Basis>> cache_;
};

// Degreewise M[u^-1], realized as the colimit along u with stabilization
// detection (a window of consecutive isomorphisms past the monomial bound).
ModulePtr localize(const ModulePtr& M, int var, int window = 4);
// M / I M for I generated by the listed variables and, optionally, p.
ModulePtr quotient_by(const ModulePtr& M, const std::vector<int>& vars, bool with_p);
// The cokernel of the unit M -> M[u^-1].
ModulePtr localization_cokernel(const ModulePtr& M, const ModulePtr& localized);
// Unit map M_d -> M[u^-1]_d of a module built by localize().
ModMatrix localization_unit(const ModulePtr& localized, const MultiDeg& d);

// Homogeneous ideal generators, parsed in Lambda[u_1..u_N] ("p", "u1^2", "1", ...).
std::vector<Value> parse_ideal(const GradedRing& R, const std::vector<std::string>& gens);

struct DegreeGroup {
    int s = 0;
    MultiDeg degree; // empty for an internal-degree total
    int t = 0;       // internal degree
    GroupType group;
    int stage = 0;   // colimit stage where the window closed (local cohomology)
};

struct LocalCohResult {
    int64_t p = 0;
    int K = 1;
    std::string module, ideal;
    std::vector<DegreeGroup> entries;
    const DegreeGroup* find(int s, int t) const;
    const DegreeGroup* find(int s, const MultiDeg& d) const;
    std::string table() const;
};

// H_s(K(u) (x) M) per internal degree t in [t_lo, t_hi].
LocalCohResult koszul_homology(const ModulePtr& M, const std::vector<std::string>& u, int t_lo, int t_hi);
LocalCohResult koszul_homology(const ModulePtr& M, const std::vector<std::string>& u, const std::vector<MultiDeg>& degrees);

struct LocalCohOptions {
    int window = 4;
    int max_extra_stages = 64; // NonStabilizing past bound + this
};

// H^s_I(M) = colim_k H^s(Hom(K(u^k), M)) per internal degree. I must contain a power
// of every variable (UnsupportedIdeal otherwise). For a lifted module a power of p in I
// contributes M (x) ZZ/p^oo, modelled as M itself, one cohomological degree up.
LocalCohResult local_cohomology(const ModulePtr& M, const std::vector<std::string>& I, int t_lo, int t_hi,
                                const LocalCohOptions& opts = {});
// Per multidegree; free variables may stay outside I, and core variables must be
// all in or all out.
LocalCohResult local_cohomology(const ModulePtr& M, const std::vector<std::string>& I, const std::vector<MultiDeg>& degrees,
                                const LocalCohOptions& opts = {});

// Multidegrees with every |free exponent| * degree and |internal degree| at most D.
std::vector<MultiDeg> degree_box(const GradedRing& R, int D, int core_lo, int core_hi);

struct ChromaticLink {
    int n = 0;           // 0 -> O/I_n -> O/I_n[v_n^-1] -> O/I_{n+1} -> 0
    std::string element; // v_n
    bool injective = true;
    bool exact = true;
    int degrees = 0;
};

struct ChromaticChain {
    GradedRing R;
    int m = 0; // sequence (p, u_1, ..., u_{m-1})
    int D = 0;
    bool regular = false;
    std::vector<ModulePtr> modules;   // O/I_n^oo for n = 1..m, torsion models at precision p^K
    std::vector<ModulePtr> localized; // O/I_n^oo[v_n^-1] for n = 1..m-1
    std::vector<ChromaticLink> links; // n = 0..m-1
    std::vector<bool> top_matches;    // n = 1..m: H^s_{I_n}(R) = 0 for s != n and H^n = O/I_n^oo
    std::vector<MultiDeg> degrees;
    bool ok() const;
    std::string table() const;
};
// R must have only free variables; NotRegular when the sequence fails to be regular.
ChromaticChain chromatic_chain(const GradedRing& R, int m, int D);

enum class LandweberVerdict { RegularAndFinite, RegularNotFinite, FailsAt };

struct LandweberReport {
    LandweberVerdict verdict = LandweberVerdict::RegularNotFinite;
    int n = -1;                   // finite at n, or fails at n
    std::vector<bool> injective;  // v_n on M / I_n M, n = 0..H
    std::vector<bool> quotient_zero;
    std::string str() const;
};
// v_0 = p is regular when every piece is free over Lambda (p-torsion-free at
// precision K); v_n = u_n for n >= 1, zero past the last variable.
LandweberReport landweber_check(const ModulePtr& M, int H, const std::vector<MultiDeg>& degrees);

struct TransitionEntry {
    int n = 0, s = 0;
    MultiDeg degree;
    int t = 0;
    std::vector<std::vector<int64_t>> matrix; // images of source generators, reduced in the target
    bool zero = true;
};

struct TransitionReport {
    int r = 0, m = 0;
    std::vector<TransitionEntry> entries;
    bool all_zero_above_r = true; // the verdict over n > r
    std::string table() const;
};
// Maps H^s_{I_{n+1}}(M) -> H^s_{I_n}(M) for M = V_m (x)_{V_r} M0, n = 1..m-1, s = 0..s_max.
TransitionReport transition_zero_check(const ModulePtr& M, int r, int m, int s_max, int D);

struct FractureEntry {
    int s = 0;
    MultiDeg degree;
    int t = 0;
    GroupType local, completed;
    bool iso = false;
};
struct FractureReport {
    std::vector<FractureEntry> entries;
    bool iso = true;
    std::string table() const;
};
// Compares H^s_I(M) with H^s_I of the degreewise completion lim M / I^k M.
FractureReport fracture_check(const ModulePtr& M, const std::vector<std::string>& I, const std::vector<MultiDeg>& degrees,
                              const LocalCohOptions& opts = {});
// Degreewise I-adic completion with stabilization detection.
ModulePtr complete(const ModulePtr& M, const std::vector<std::string>& I, int window = 4);

} // namespace fglab
