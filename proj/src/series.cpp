#include "fglab/series.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <sstream>
#include <unordered_map>

namespace fglab {

SeriesKey pack_exponents(const std::vector<int>& e) {
    if (e.size() > static_cast<size_t>(kMaxSeriesVars)) throw InvalidArgument("at most four series variables");
    SeriesKey k = 0;
    int deg = 0;
    for (size_t i = 0; i < e.size(); ++i) {
        if (e[i] < 0 || e[i] > kMaxSeriesDegree) throw DegreeOverflow("series exponent out of range");
        k |= static_cast<SeriesKey>(e[i]) << (36 - 12 * i);
        deg += e[i];
    }
    if (deg > kMaxSeriesDegree) throw DegreeOverflow("series degree out of range");
    return k | (static_cast<SeriesKey>(deg) << 48);
}

std::vector<int> unpack_exponents(SeriesKey k, int nvars) {
    std::vector<int> e(static_cast<size_t>(nvars));
    for (int i = 0; i < nvars; ++i) e[static_cast<size_t>(i)] = key_exponent(k, i);
    return e;
}

static bool same_ring(const Ring& a, const Ring& b) { return a == b || a->name() == b->name(); }

static void check_compatible(const TruncSeries& a, const TruncSeries& b) {
    if (!same_ring(a.ring(), b.ring())) throw RingMismatch(a.ring()->name() + " vs " + b.ring()->name());
    if (a.vars() != b.vars()) throw RingMismatch("series variables differ");
    if (a.bound() != b.bound()) throw BoundMismatch(std::to_string(a.bound()) + " vs " + std::to_string(b.bound()));
}

// ---------------------------------------------------------------- TruncSeries

TruncSeries::TruncSeries(Ring ring, std::vector<std::string> vars, int bound)
    : ring_(std::move(ring)), vars_(std::move(vars)), bound_(bound), reliable_(bound) {
    if (vars_.size() > static_cast<size_t>(kMaxSeriesVars)) throw InvalidArgument("at most four series variables");
    if (bound_ < 0 || bound_ > kMaxSeriesDegree) throw DegreeOverflow("bound out of range");
}

TruncSeries TruncSeries::variable(Ring ring, std::vector<std::string> vars, int bound, int index) {
    TruncSeries s(std::move(ring), std::move(vars), bound);
    std::vector<int> e(s.vars_.size(), 0);
    e[static_cast<size_t>(index)] = 1;
    if (bound >= 1) s.terms_.emplace_back(pack_exponents(e), s.ring_->one());
    return s;
}

TruncSeries TruncSeries::constant(Ring ring, std::vector<std::string> vars, int bound, const Value& c) {
    TruncSeries s(std::move(ring), std::move(vars), bound);
    if (!s.ring_->is_zero(c)) s.terms_.emplace_back(0, c);
    return s;
}

TruncSeries TruncSeries::from_terms(Ring ring, std::vector<std::string> vars, int bound, std::vector<Entry> terms) {
    TruncSeries s(std::move(ring), std::move(vars), bound);
    std::sort(terms.begin(), terms.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    for (auto& t : terms) {
        if (key_degree(t.first) > bound) continue;
        if (!s.terms_.empty() && s.terms_.back().first == t.first)
            s.ring_->add_to(s.terms_.back().second, t.second);
        else
            s.terms_.push_back(std::move(t));
    }
    std::erase_if(s.terms_, [&](const Entry& e) { return s.ring_->is_zero(e.second); });
    return s;
}

TruncSeries TruncSeries::with_terms(std::vector<Entry> terms) const {
    TruncSeries s = from_terms(ring_, vars_, bound_, std::move(terms));
    s.reliable_ = reliable_;
    return s;
}

Value TruncSeries::coeff(SeriesKey k) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), k, [](const Entry& e, SeriesKey key) { return e.first < key; });
    if (it != terms_.end() && it->first == k) return it->second;
    return ring_->zero();
}

int TruncSeries::min_degree() const { return terms_.empty() ? bound_ + 1 : key_degree(terms_.front().first); }
int TruncSeries::max_degree() const { return terms_.empty() ? -1 : key_degree(terms_.back().first); }

TruncSeries TruncSeries::truncate(int new_bound) const {
    if (new_bound > bound_) throw BoundMismatch("cannot raise a truncation bound");
    TruncSeries s(ring_, vars_, new_bound);
    s.reliable_ = std::min(reliable_, new_bound);
    for (auto& t : terms_)
        if (key_degree(t.first) <= new_bound) s.terms_.push_back(t);
    return s;
}

bool TruncSeries::operator==(const TruncSeries& o) const {
    if (bound_ != o.bound_ || vars_ != o.vars_ || terms_.size() != o.terms_.size()) return false;
    if (!same_ring(ring_, o.ring_)) return false;
    for (size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].first != o.terms_[i].first || !ring_->eq(terms_[i].second, o.terms_[i].second)) return false;
    return true;
}

std::string TruncSeries::str() const {
    std::ostringstream out;
    out << bound_ << "; vars=";
    for (size_t i = 0; i < vars_.size(); ++i) out << (i ? "," : "") << vars_[i];
    for (auto& [k, c] : terms_) {
        out << "\nterm ";
        for (int i = 0; i < nvars(); ++i) out << (i ? "," : "") << key_exponent(k, i);
        out << ": " << ring_->render(c);
    }
    return out.str();
}

static bool needs_parens(const std::string& c) {
    for (size_t i = 1; i < c.size(); ++i)
        if (c[i] == '+' || c[i] == '-') return true;
    return false;
}

std::string TruncSeries::expr() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto& [k, c] : terms_) {
        std::string mono;
        for (int i = 0; i < nvars(); ++i) {
            int e = key_exponent(k, i);
            if (!e) continue;
            if (!mono.empty()) mono += "*";
            mono += vars_[static_cast<size_t>(i)];
            if (e > 1) mono += "^" + std::to_string(e);
        }
        std::string cs = ring_->render(c);
        std::string term;
        if (mono.empty())
            term = needs_parens(cs) ? "(" + cs + ")" : cs;
        else if (cs == "1")
            term = mono;
        else if (cs == "-1")
            term = "-" + mono;
        else
            term = (needs_parens(cs) ? "(" + cs + ")" : cs) + "*" + mono;
        if (!out.empty() && term[0] != '-') out += "+";
        out += term;
    }
    return out;
}

TruncSeries TruncSeries::parse(Ring ring, std::string_view text) {
    std::string s(text);
    for (size_t pos; (pos = s.find("; term")) != std::string::npos;) s.replace(pos, 6, "\nterm");
    std::istringstream in(s);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty series");
    auto semi = line.find(';');
    if (semi == std::string::npos) throw ParseError("series header needs 'N; vars=...'");
    int bound = std::stoi(line.substr(0, semi));
    auto vpos = line.find("vars=", semi);
    if (vpos == std::string::npos) throw ParseError("series header needs vars=");
    std::vector<std::string> vars;
    std::string vl = line.substr(vpos + 5);
    std::string cur;
    for (char c : vl) {
        if (c == ',') {
            vars.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) vars.push_back(cur);
    std::vector<Entry> terms;
    while (std::getline(in, line)) {
        auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        line = line.substr(b);
        if (line.rfind("term", 0) != 0) throw ParseError("expected 'term' line: " + line);
        auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError("term line needs ':'");
        std::vector<int> e;
        std::string ex = line.substr(4, colon - 4);
        std::string num;
        for (char c : ex + ",") {
            if (c == ',') {
                if (num.empty()) throw ParseError("bad exponent list");
                e.push_back(std::stoi(num));
                num.clear();
            } else if (!std::isspace(static_cast<unsigned char>(c))) {
                num += c;
            }
        }
        if (e.size() != vars.size()) throw ParseError("exponent count does not match variables");
        terms.emplace_back(pack_exponents(e), ring->parse(line.substr(colon + 1)));
    }
    return from_terms(std::move(ring), std::move(vars), bound, std::move(terms));
}

// ---------------------------------------------------------------- expression parser

namespace {

class SeriesParser {
public:
    SeriesParser(Ring r, std::vector<std::string> vars, int bound, std::string_view s)
        : R(std::move(r)), vars_(std::move(vars)), N(bound), s_(s) {}

    TruncSeries run() {
        TruncSeries v = expr();
        skip();
        if (i_ != s_.size()) fail("trailing input");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) {
        throw ParseError(what + " at position " + std::to_string(i_) + " in '" + std::string(s_) + "'");
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    TruncSeries constant(const Value& v) { return TruncSeries::constant(R, vars_, N, v); }
    TruncSeries expr() {
        TruncSeries v = eat('-') ? series_neg(term()) : (eat('+'), term());
        for (;;) {
            if (eat('+'))
                v = series_add(v, term());
            else if (eat('-'))
                v = series_sub(v, term());
            else
                return v;
        }
    }
    TruncSeries term() {
        TruncSeries v = factor();
        for (;;) {
            if (eat('*')) {
                v = series_mul(v, factor());
            } else if (eat('/')) {
                skip();
                if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
                    mpz_class n(digits());
                    std::vector<TruncSeries::Entry> t;
                    for (auto& [k, c] : v.terms()) t.emplace_back(k, R->divide_by_integer(c, n));
                    v = v.with_terms(std::move(t));
                } else {
                    v = series_mul(v, series_inverse(factor()));
                }
            } else {
                return v;
            }
        }
    }
    std::string digits() {
        size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (start == i_) fail("expected digits");
        return std::string(s_.substr(start, i_ - start));
    }
    TruncSeries factor() {
        if (eat('-')) return series_neg(factor());
        TruncSeries b = atom();
        if (eat('^')) {
            skip();
            return series_pow(b, std::stoi(digits()));
        }
        return b;
    }
    TruncSeries atom() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        char c = s_[i_];
        if (c == '(') {
            ++i_;
            TruncSeries v = expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return constant(R->from_int(mpz_class(digits())));
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
            std::string nm(s_.substr(start, i_ - start));
            for (size_t v = 0; v < vars_.size(); ++v)
                if (vars_[v] == nm) return TruncSeries::variable(R, vars_, N, static_cast<int>(v));
            int idx = R->lookup_name(nm);
            if (idx < 0) throw UnknownVariable(nm);
            return constant(R->named(idx));
        }
        fail(std::string("unexpected '") + c + "'");
    }

    Ring R;
    std::vector<std::string> vars_;
    int N;
    std::string_view s_;
    size_t i_ = 0;
};

} // namespace

TruncSeries TruncSeries::parse_expr(Ring ring, std::vector<std::string> vars, int bound, std::string_view expr) {
    return SeriesParser(std::move(ring), std::move(vars), bound, expr).run();
}

// ---------------------------------------------------------------- arithmetic

static TruncSeries result_like(const TruncSeries& a, const TruncSeries& b) {
    TruncSeries r(a.ring(), a.vars(), a.bound());
    r.set_reliable_bound(std::min(a.reliable_bound(), b.reliable_bound()));
    return r;
}

TruncSeries series_add(const TruncSeries& a, const TruncSeries& b) {
    check_compatible(a, b);
    const Ring& R = a.ring();
    std::vector<TruncSeries::Entry> out;
    out.reserve(a.terms().size() + b.terms().size());
    auto i = a.terms().begin(), j = b.terms().begin();
    while (i != a.terms().end() || j != b.terms().end()) {
        if (j == b.terms().end() || (i != a.terms().end() && i->first < j->first)) {
            out.push_back(*i++);
        } else if (i == a.terms().end() || j->first < i->first) {
            out.push_back(*j++);
        } else {
            Value c = R->add(i->second, j->second);
            if (!R->is_zero(c)) out.emplace_back(i->first, std::move(c));
            ++i;
            ++j;
        }
    }
    TruncSeries r = result_like(a, b);
    return r.with_terms(std::move(out));
}

TruncSeries series_neg(const TruncSeries& a) {
    std::vector<TruncSeries::Entry> out;
    out.reserve(a.terms().size());
    for (auto& [k, c] : a.terms()) out.emplace_back(k, a.ring()->neg(c));
    return a.with_terms(std::move(out));
}

TruncSeries series_sub(const TruncSeries& a, const TruncSeries& b) { return series_add(a, series_neg(b)); }

TruncSeries series_scale(const TruncSeries& a, const Value& c) {
    std::vector<TruncSeries::Entry> out;
    out.reserve(a.terms().size());
    for (auto& [k, x] : a.terms()) out.emplace_back(k, a.ring()->mul(x, c));
    return a.with_terms(std::move(out));
}

TruncSeries series_mul_trunc(const TruncSeries& a, const TruncSeries& b, int limit) {
    check_compatible(a, b);
    limit = std::min(limit, a.bound());
    const Ring& R = a.ring();
    TruncSeries r = result_like(a, b);
    if (a.is_zero() || b.is_zero() || limit < 0) return r;
    const auto& A = a.terms();
    const auto& B = b.terms();
    std::unordered_map<SeriesKey, Value> acc;
    for (auto& [ka, ca] : A) {
        int room = limit - key_degree(ka);
        if (room < 0) break;
        for (auto& [kb, cb] : B) {
            if (key_degree(kb) > room) break;
            SeriesKey k = ka + kb;
            auto it = acc.find(k);
            if (it == acc.end())
                acc.emplace(k, R->mul(ca, cb));
            else
                R->addmul(it->second, ca, cb);
        }
    }
    std::vector<TruncSeries::Entry> out;
    out.reserve(acc.size());
    for (auto& [k, c] : acc) out.emplace_back(k, std::move(c));
    return r.with_terms(std::move(out));
}

TruncSeries series_mul(const TruncSeries& a, const TruncSeries& b) { return series_mul_trunc(a, b, a.bound()); }

TruncSeries series_pow(const TruncSeries& a, int e) {
    if (e < 0) return series_pow(series_inverse(a), -e);
    TruncSeries r = TruncSeries::constant(a.ring(), a.vars(), a.bound(), a.ring()->one());
    r.set_reliable_bound(a.reliable_bound());
    TruncSeries b = a;
    while (e > 0) {
        if (e & 1) r = series_mul(r, b);
        e >>= 1;
        if (e) b = series_mul(b, b);
    }
    return r;
}

TruncSeries series_inverse(const TruncSeries& a) {
    const Ring& R = a.ring();
    Value c0 = a.coeff(SeriesKey{0});
    if (!R->is_unit(c0)) throw DivisionByNonUnit("constant term " + R->render(c0) + " is not a unit");
    TruncSeries h = TruncSeries::constant(R, a.vars(), a.bound(), R->inv(c0));
    TruncSeries two = TruncSeries::constant(R, a.vars(), a.bound(), R->from_int(2));
    // h is correct through degree prec; each step reaches 2*prec+1.
    for (int prec = 0; prec < a.bound();) {
        prec = std::min(2 * prec + 1, a.bound());
        TruncSeries ah = series_mul_trunc(a, h, prec);
        h = series_mul_trunc(h, series_sub(two, ah), prec);
    }
    h.set_reliable_bound(a.reliable_bound());
    return h;
}

Value series_coeff(const TruncSeries& f, int k) {
    std::vector<int> e(static_cast<size_t>(f.nvars()), 0);
    e[0] = k;
    return f.coeff(pack_exponents(e));
}

// ---------------------------------------------------------------- composition

static bool is_unit_monomial(const TruncSeries& s) {
    return s.terms().size() == 1 && s.ring()->is_one(s.terms()[0].second);
}

TruncSeries series_compose(const TruncSeries& outer, const TruncSeries& inner) {
    if (outer.nvars() != 1) throw InvalidArgument("outer series must be univariate");
    if (!same_ring(outer.ring(), inner.ring())) throw RingMismatch(outer.ring()->name() + " vs " + inner.ring()->name());
    if (!inner.is_zero() && inner.terms()[0].first == 0)
        throw NonzeroConstantTerm("inner series has constant term " + inner.ring()->render(inner.terms()[0].second));
    const Ring& R = inner.ring();
    const int N = inner.bound();
    TruncSeries result(R, inner.vars(), N);
    result.set_reliable_bound(inner.reliable_bound());
    Value c0 = outer.coeff(SeriesKey{0});
    if (inner.is_zero()) return TruncSeries::constant(R, inner.vars(), N, c0);
    const int md = inner.min_degree();
    if (static_cast<long>(outer.bound() + 1) * md <= N)
        throw BoundMismatch("outer bound " + std::to_string(outer.bound()) + " too small for inner bound " + std::to_string(N));
    if (outer.reliable_bound() < outer.bound()) {
        int r = (outer.reliable_bound() + 1) * md - 1;
        result.set_reliable_bound(std::min(result.reliable_bound(), r));
    }
    const int K = std::min(outer.max_degree(), N / md);
    if (K <= 0) return TruncSeries::constant(R, inner.vars(), N, c0);

    // Monomial inner series: shift keys directly.
    if (is_unit_monomial(inner)) {
        SeriesKey step = inner.terms()[0].first;
        std::vector<TruncSeries::Entry> out;
        for (auto& [k, c] : outer.terms()) {
            int e = key_exponent(k, 0);
            if (e * md > N) break;
            out.emplace_back(step * static_cast<SeriesKey>(e), c);
        }
        return result.with_terms(std::move(out));
    }

    size_t nterms = outer.terms().size();
    int log2K = 1;
    while ((1 << log2K) < K) ++log2K;
    if (nterms * static_cast<size_t>(log2K) < static_cast<size_t>(K)) {
        // Sparse outer: accumulate c_k * inner^k with powers reached incrementally.
        std::vector<TruncSeries::Entry> out;
        TruncSeries acc = result;
        TruncSeries pw = TruncSeries::constant(R, inner.vars(), N, R->one());
        int have = 0;
        for (auto& [k, c] : outer.terms()) {
            int e = key_exponent(k, 0);
            if (e > K) break;
            if (e == 0) {
                acc = series_add(acc, TruncSeries::constant(R, inner.vars(), N, c));
                continue;
            }
            TruncSeries step = series_pow(inner, e - have);
            pw = series_mul(pw, step);
            have = e;
            acc = series_add(acc, series_scale(pw, c));
        }
        acc.set_reliable_bound(result.reliable_bound());
        return acc;
    }

    // Horner: S_k = c_k + inner * S_{k+1}, where S_k only matters below degree N - k*md.
    auto coeff = [&](int k) { return series_coeff(outer, k); };
    TruncSeries S = TruncSeries::constant(R, inner.vars(), N, coeff(K));
    for (int k = K - 1; k >= 0; --k) {
        S = series_mul_trunc(inner, S, N - k * md);
        S = series_add(S, TruncSeries::constant(R, inner.vars(), N, coeff(k)));
    }
    S.set_reliable_bound(result.reliable_bound());
    return S;
}

namespace {

struct Substituter {
    const TruncSeries& f;
    const std::vector<TruncSeries>& img;
    Ring R;
    std::vector<std::string> vars;
    int N;
    std::vector<int> md;
    std::vector<bool> monomial;
    std::vector<std::vector<TruncSeries>> powers;

    TruncSeries zero() const { return TruncSeries(R, vars, N); }

    const TruncSeries& power(int v, int e) {
        auto& P = powers[static_cast<size_t>(v)];
        if (P.empty()) P.push_back(TruncSeries::constant(R, vars, N, R->one()));
        while (static_cast<int>(P.size()) <= e) P.push_back(series_mul(P.back(), img[static_cast<size_t>(v)]));
        return P[static_cast<size_t>(e)];
    }

    TruncSeries shift(const TruncSeries& s, int v, int e, int limit) {
        SeriesKey step = img[static_cast<size_t>(v)].terms()[0].first * static_cast<SeriesKey>(e);
        std::vector<TruncSeries::Entry> out;
        int add = key_degree(step);
        for (auto& [k, c] : s.terms()) {
            if (key_degree(k) + add > limit) break;
            out.emplace_back(k + step, c);
        }
        return s.with_terms(std::move(out));
    }

    // terms: (remaining exponent vector as key of f, coefficient) restricted to variables >= v.
    TruncSeries run(const std::vector<const TruncSeries::Entry*>& terms, int v, int limit) {
        if (terms.empty() || limit < 0) return zero();
        const int n = f.nvars();
        if (v == n) {
            Value c = R->zero();
            for (auto* t : terms) R->add_to(c, t->second);
            return TruncSeries::constant(R, vars, N, c);
        }
        int maxe = 0;
        for (auto* t : terms) maxe = std::max(maxe, key_exponent(t->first, v));
        if (md[static_cast<size_t>(v)] > 0) maxe = std::min(maxe, limit / md[static_cast<size_t>(v)]);
        std::vector<std::vector<const TruncSeries::Entry*>> groups(static_cast<size_t>(maxe) + 1);
        for (auto* t : terms) {
            int e = key_exponent(t->first, v);
            if (e <= maxe) groups[static_cast<size_t>(e)].push_back(t);
        }
        const int m = md[static_cast<size_t>(v)];
        if (v == n - 1 && !monomial[static_cast<size_t>(v)]) {
            // innermost variable: linear combination of cached powers
            std::unordered_map<SeriesKey, Value> acc;
            for (int e = 0; e <= maxe; ++e) {
                if (groups[static_cast<size_t>(e)].empty()) continue;
                Value c = R->zero();
                for (auto* t : groups[static_cast<size_t>(e)]) R->add_to(c, t->second);
                if (R->is_zero(c)) continue;
                for (auto& [k, x] : power(v, e).terms()) {
                    if (key_degree(k) > limit) break;
                    auto it = acc.find(k);
                    if (it == acc.end())
                        acc.emplace(k, R->mul(x, c));
                    else
                        R->addmul(it->second, x, c);
                }
            }
            std::vector<TruncSeries::Entry> out;
            for (auto& [k, c] : acc) out.emplace_back(k, std::move(c));
            return zero().with_terms(std::move(out));
        }
        if (monomial[static_cast<size_t>(v)]) {
            TruncSeries acc = zero();
            for (int e = 0; e <= maxe; ++e) {
                if (groups[static_cast<size_t>(e)].empty()) continue;
                TruncSeries g = run(groups[static_cast<size_t>(e)], v + 1, limit - e * m);
                acc = series_add(acc, shift(g, v, e, limit));
            }
            return acc;
        }
        TruncSeries S = run(groups[static_cast<size_t>(maxe)], v + 1, limit - maxe * m);
        for (int e = maxe - 1; e >= 0; --e) {
            S = series_mul_trunc(img[static_cast<size_t>(v)], S, limit - e * m);
            S = series_add(S, run(groups[static_cast<size_t>(e)], v + 1, limit - e * m));
        }
        return S;
    }
};

} // namespace

TruncSeries series_substitute(const TruncSeries& f, const std::vector<TruncSeries>& images) {
    if (static_cast<int>(images.size()) != f.nvars()) throw InvalidArgument("one image per variable required");
    if (images.empty()) throw InvalidArgument("no images");
    const TruncSeries& first = images[0];
    for (auto& im : images) {
        check_compatible(first, im);
        if (!im.is_zero() && im.terms()[0].first == 0) throw NonzeroConstantTerm("substituted series has a constant term");
    }
    if (!same_ring(f.ring(), first.ring())) throw RingMismatch(f.ring()->name() + " vs " + first.ring()->name());
    Substituter S{f, images, first.ring(), first.vars(), first.bound(), {}, {}, {}};
    int lowest = INT_MAX;
    int reliable = first.bound();
    for (auto& im : images) {
        S.md.push_back(im.is_zero() ? first.bound() + 1 : im.min_degree());
        S.monomial.push_back(is_unit_monomial(im));
        lowest = std::min(lowest, S.md.back());
        reliable = std::min(reliable, im.reliable_bound());
    }
    S.powers.resize(images.size());
    if (static_cast<long>(f.bound() + 1) * lowest <= first.bound())
        throw BoundMismatch("outer bound " + std::to_string(f.bound()) + " too small for bound " + std::to_string(first.bound()));
    if (f.reliable_bound() < f.bound()) reliable = std::min(reliable, (f.reliable_bound() + 1) * lowest - 1);
    std::vector<const TruncSeries::Entry*> all;
    for (auto& t : f.terms()) {
        bool dead = false;
        for (int v = 0; v < f.nvars(); ++v)
            if (key_exponent(t.first, v) > 0 && images[static_cast<size_t>(v)].is_zero()) dead = true;
        if (!dead) all.push_back(&t);
    }
    TruncSeries r = S.run(all, 0, first.bound());
    r.set_reliable_bound(reliable);
    return r;
}

TruncSeries series_reversion(const TruncSeries& f) {
    if (f.nvars() != 1) throw InvalidArgument("reversion needs a univariate series");
    const Ring& R = f.ring();
    if (!R->is_zero(f.coeff(SeriesKey{0}))) throw NonzeroConstantTerm("series has a constant term");
    Value a1 = series_coeff(f, 1);
    if (!R->is_unit(a1)) throw NonUnitLinearCoefficient(R->render(a1));
    const int N = f.bound();
    TruncSeries x = TruncSeries::variable(R, f.vars(), N, 0);
    TruncSeries g = series_scale(x, R->inv(a1));
    TruncSeries df = series_partial(f, 0);
    df.set_reliable_bound(N);
    // Newton: g <- g - (f(g) - x) / f'(g), doubling the number of correct coefficients.
    for (int prec = 1; prec < N;) {
        prec = std::min(2 * prec + 1, N);
        TruncSeries gp = g.truncate(prec);
        TruncSeries e = series_sub(series_compose(f.truncate(prec), gp), x.truncate(prec));
        TruncSeries d = series_compose(df.truncate(prec), gp);
        TruncSeries corr = series_mul(e, series_inverse(d));
        gp = series_sub(gp, corr);
        std::vector<TruncSeries::Entry> t = gp.terms();
        g = TruncSeries::from_terms(R, f.vars(), N, std::move(t));
    }
    g.set_reliable_bound(f.reliable_bound());
    return g;
}

TruncSeries series_partial(const TruncSeries& f, const std::string& var) {
    for (int i = 0; i < f.nvars(); ++i)
        if (f.vars()[static_cast<size_t>(i)] == var) return series_partial(f, i);
    throw UnknownVariable(var);
}

TruncSeries series_partial(const TruncSeries& f, int var) {
    if (var < 0 || var >= f.nvars()) throw UnknownVariable(std::to_string(var));
    const Ring& R = f.ring();
    std::vector<TruncSeries::Entry> out;
    SeriesKey unit = (SeriesKey{1} << (36 - 12 * var)) | (SeriesKey{1} << 48);
    for (auto& [k, c] : f.terms()) {
        int e = key_exponent(k, var);
        if (!e) continue;
        out.emplace_back(k - unit, R->mul(c, R->from_int(e)));
    }
    TruncSeries r = f.with_terms(std::move(out));
    r.set_reliable_bound(std::min(f.reliable_bound(), f.bound()) - 1);
    return r;
}

TruncSeries series_reindex(const TruncSeries& f, const std::vector<std::string>& new_vars, const std::vector<int>& map) {
    std::vector<TruncSeries::Entry> out;
    out.reserve(f.terms().size());
    for (auto& [k, c] : f.terms()) {
        std::vector<int> e(new_vars.size(), 0);
        for (int i = 0; i < f.nvars(); ++i) e[static_cast<size_t>(map[static_cast<size_t>(i)])] += key_exponent(k, i);
        out.emplace_back(pack_exponents(e), c);
    }
    TruncSeries r = TruncSeries::from_terms(f.ring(), new_vars, f.bound(), std::move(out));
    r.set_reliable_bound(f.reliable_bound());
    return r;
}

TruncSeries series_set_zero(const TruncSeries& f, int var) {
    std::vector<TruncSeries::Entry> out;
    for (auto& t : f.terms())
        if (key_exponent(t.first, var) == 0) out.push_back(t);
    return f.with_terms(std::move(out));
}

TruncSeries series_change_ring(const TruncSeries& f, const Ring& to) {
    if (same_ring(f.ring(), to)) return f;
    return series_map(f, to, [&](const Value& c) { return convert(f.ring(), c, to); });
}

} // namespace fglab
