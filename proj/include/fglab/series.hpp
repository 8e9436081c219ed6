#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fglab/coeffring.hpp"

namespace fglab {

// Exponent vectors of at most four variables packed into one word:
// degree in the top 16 bits, then 12 bits per exponent. Keys add under
// multiplication and sort by (total degree, lexicographic exponent).
using SeriesKey = uint64_t;
constexpr int kMaxSeriesVars = 4;
constexpr int kMaxSeriesDegree = 4095;

SeriesKey pack_exponents(const std::vector<int>& e);
std::vector<int> unpack_exponents(SeriesKey k, int nvars);
inline int key_degree(SeriesKey k) { return static_cast<int>(k >> 48); }
inline int key_exponent(SeriesKey k, int i) { return static_cast<int>((k >> (36 - 12 * i)) & 0xfff); }

class TruncSeries {
public:
    using Entry = std::pair<SeriesKey, Value>;

    TruncSeries() = default;
    TruncSeries(Ring ring, std::vector<std::string> vars, int bound);

    static TruncSeries variable(Ring ring, std::vector<std::string> vars, int bound, int index);
    static TruncSeries constant(Ring ring, std::vector<std::string> vars, int bound, const Value& c);
    // Terms may arrive in any order; duplicates are summed, zeros and terms above the bound dropped.
    static TruncSeries from_terms(Ring ring, std::vector<std::string> vars, int bound, std::vector<Entry> terms);
    // Expression over the variables and the ring's own names, e.g. "x+y+u1*x*y".
    static TruncSeries parse_expr(Ring ring, std::vector<std::string> vars, int bound, std::string_view expr);
    // Inverse of str().
    static TruncSeries parse(Ring ring, std::string_view text);

    const Ring& ring() const { return ring_; }
    const std::vector<std::string>& vars() const { return vars_; }
    int nvars() const { return static_cast<int>(vars_.size()); }
    int bound() const { return bound_; }
    // Highest degree whose coefficients are trustworthy (lower than bound() after differentiation).
    int reliable_bound() const { return reliable_; }
    void set_reliable_bound(int r) { reliable_ = r; }

    const std::vector<Entry>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Value coeff(SeriesKey k) const;
    Value coeff(const std::vector<int>& e) const { return coeff(pack_exponents(e)); }
    // Lowest total degree of a nonzero term, or bound()+1 for the zero series.
    int min_degree() const;
    int max_degree() const;

    TruncSeries truncate(int new_bound) const;
    TruncSeries with_terms(std::vector<Entry> terms) const; // same metadata
    std::string str() const;
    std::string expr() const; // human-readable sum of monomials

    bool operator==(const TruncSeries& o) const;

private:
    Ring ring_;
    std::vector<std::string> vars_;
    int bound_ = 0;
    int reliable_ = 0;
    std::vector<Entry> terms_;
};

TruncSeries series_add(const TruncSeries& a, const TruncSeries& b);
TruncSeries series_sub(const TruncSeries& a, const TruncSeries& b);
TruncSeries series_neg(const TruncSeries& a);
TruncSeries series_scale(const TruncSeries& a, const Value& c);
TruncSeries series_mul(const TruncSeries& a, const TruncSeries& b);
// Product keeping only total degree <= limit.
TruncSeries series_mul_trunc(const TruncSeries& a, const TruncSeries& b, int limit);
TruncSeries series_pow(const TruncSeries& a, int e);
// Multiplicative inverse; the constant term must be a unit.
TruncSeries series_inverse(const TruncSeries& a);

// outer is univariate; inner has zero constant term.
TruncSeries series_compose(const TruncSeries& outer, const TruncSeries& inner);
// f(images[0], ..., images[k-1]); all images share ring, variables and bound.
TruncSeries series_substitute(const TruncSeries& f, const std::vector<TruncSeries>& images);
TruncSeries series_reversion(const TruncSeries& f);
TruncSeries series_partial(const TruncSeries& f, const std::string& var);
TruncSeries series_partial(const TruncSeries& f, int var);

// Moves variable i of f to position map[i] of new_vars.
TruncSeries series_reindex(const TruncSeries& f, const std::vector<std::string>& new_vars, const std::vector<int>& map);
// Sets variable i to zero (dropping it from the variable list when drop is true).
TruncSeries series_set_zero(const TruncSeries& f, int var);
// Coefficient ring change along convert().
TruncSeries series_change_ring(const TruncSeries& f, const Ring& to);
// Applies a coefficient map; the result lives over `to`.
template <class Fn>
TruncSeries series_map(const TruncSeries& f, const Ring& to, Fn&& fn) {
    std::vector<TruncSeries::Entry> out;
    out.reserve(f.terms().size());
    for (auto& [k, c] : f.terms()) out.emplace_back(k, fn(c));
    TruncSeries r = TruncSeries::from_terms(to, f.vars(), f.bound(), std::move(out));
    r.set_reliable_bound(f.reliable_bound());
    return r;
}

// Univariate coefficient of x^k.
Value series_coeff(const TruncSeries& f, int k);

} // namespace fglab
