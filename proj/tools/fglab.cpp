// fglab: command-line front end. Every subcommand prints aligned text, or with
// --records one JSON object per line with a fixed key order.
//
// Exit status: 0 success, 1 a mathematical check failed, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "fglab/errors.hpp"
#include "fglab/height.hpp"
#include "fglab/hopfext.hpp"
#include "fglab/isofinite.hpp"
#include "fglab/localcoh.hpp"
#include "fglab/ptypical.hpp"

using namespace fglab;
using Record = nlohmann::ordered_json;

namespace {

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Output {
    bool records = false;
    std::ostringstream text;
    std::vector<Record> rows;

    void line(const std::string& s) { text << s << "\n"; }
    void block(const std::string& s) { text << s; }
    void record(Record r) { rows.push_back(std::move(r)); }
    void flush(std::ostream& os) const {
        if (records)
            for (auto& r : rows) os << r.dump() << "\n";
        else
            os << text.str();
    }
};

// Options shared by the law-consuming subcommands.
struct LawSource {
    std::string input;
    std::string law = "multiplicative";
    std::string ring;
    int64_t p = 0;
    int n = 1;
    int degree = 0;

    void add(CLI::App* cmd, bool need_p) {
        cmd->add_option("--input", input, "FGL file (ring/bound header then the series)");
        cmd->add_option("--law", law, "built-in law when no file is given")
            ->check(CLI::IsMember({"additive", "multiplicative", "honda", "universal"}));
        cmd->add_option("--ring", ring, "coefficient ring for additive/multiplicative, e.g. ZZ_(2), GF(3)");
        auto* po = cmd->add_option("--p", p, "prime");
        if (need_p) po->required();
        cmd->add_option("--n", n, "height for the Honda law")->check(CLI::PositiveNumber);
        cmd->add_option("--degree", degree, "truncation bound")->check(CLI::NonNegativeNumber);
    }

    FormalGroupLaw load() const {
        if (!input.empty()) {
            std::ifstream in(input);
            if (!in) throw Usage("cannot read " + input);
            std::stringstream ss;
            ss << in.rdbuf();
            return read_fgl(ss.str());
        }
        if (degree < 1) throw Usage("--degree is required without --input");
        if (law == "honda") {
            require_prime();
            return honda_fgl(p, n, degree);
        }
        if (law == "universal") {
            require_prime();
            return universal_p_typical(p, degree).law;
        }
        Ring r = make_ring(ring.empty() ? (p ? "ZZ_(" + std::to_string(p) + ")" : std::string("ZZ")) : ring);
        return law == "additive" ? additive_fgl(r, degree) : multiplicative_fgl(r, degree);
    }

    void require_prime() const {
        if (!is_prime(p)) throw Usage("--p must be prime, got " + std::to_string(p));
    }
};

void require_prime(int64_t p) {
    if (!is_prime(p)) throw Usage("--p must be prime, got " + std::to_string(p));
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

void emit_series(Output& out, const std::string& name, const TruncSeries& f) {
    out.line(name + ":");
    out.block(f.str());
    if (!f.str().empty() && f.str().back() != '\n') out.line("");
    for (auto& [k, c] : f.terms()) {
        Record r;
        r["record"] = "term";
        r["series"] = name;
        r["exponents"] = unpack_exponents(k, f.nvars());
        r["coefficient"] = f.ring()->render(c);
        out.record(r);
    }
}

void emit_law(Output& out, const std::string& name, const FormalGroupLaw& G) {
    out.block(write_fgl(G));
    if (write_fgl(G).back() != '\n') out.line("");
    Record h;
    h["record"] = "law";
    h["name"] = name;
    h["ring"] = G.ring()->name();
    h["bound"] = G.bound();
    out.record(h);
    for (auto& [k, c] : G.F.terms()) {
        Record r;
        r["record"] = "term";
        r["series"] = name;
        r["exponents"] = unpack_exponents(k, G.F.nvars());
        r["coefficient"] = G.ring()->render(c);
        out.record(r);
    }
}

void emit_flag(Output& out, const std::string& what, bool value) {
    out.line(what + ": " + (value ? "yes" : "no"));
    Record r;
    r["record"] = "check";
    r["name"] = what;
    r["ok"] = value;
    out.record(r);
}

Convention parse_convention(const std::string& c) { return c == "hazewinkel" ? Convention::Hazewinkel : Convention::Araki; }

// ---------------------------------------------------------------- graded modules

struct ModuleSource {
    int64_t p = 0;
    int K = 1;
    int vars = 1;
    int core = -1;
    std::string relations;
    bool lifted = false;
    std::string localize_at;

    void add(CLI::App* cmd, int default_vars) {
        vars = default_vars;
        cmd->add_option("--p", p, "prime")->required();
        cmd->add_option("--K", K, "precision exponent, coefficients ZZ/p^K")->check(CLI::PositiveNumber);
        cmd->add_option("--vars", vars, "number of variables u1..uN, deg uk = p^k - 1")->check(CLI::NonNegativeNumber);
        cmd->add_option("--core", core, "leading variables graded by internal degree only (default: all)");
        cmd->add_option("--module", relations, "relations of R/(...), comma separated");
        cmd->add_flag("--lifted", lifted, "treat R/(...) as p-torsion-free, modelled at precision p^K");
        cmd->add_option("--localize", localize_at, "invert this variable");
    }

    GradedRing ring(int default_core) const {
        require_prime(p);
        const int c = core >= 0 ? core : default_core;
        if (c > vars) throw Usage("--core exceeds --vars");
        return v_truncation(p, K, vars, c);
    }

    ModulePtr module(const GradedRing& R) const {
        ModulePtr M = GradedModule::quotient(R, split(relations), lifted);
        if (!localize_at.empty()) M = localize(M, R.index(localize_at));
        return M;
    }
};

void emit_groups(Output& out, const LocalCohResult& H, const std::string& kind) {
    out.block(H.table());
    for (auto& e : H.entries) {
        Record r;
        r["record"] = kind;
        r["s"] = e.s;
        r["t"] = e.t;
        if (!e.degree.empty()) r["multidegree"] = e.degree;
        r["group"] = e.group.str(H.p);
        r["exponents"] = e.group.exps;
        r["length"] = e.group.length();
        if (kind == "local_cohomology") r["stage"] = e.stage;
        out.record(r);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Formal group laws and chromatic invariants"};
    app.require_subcommand(1);
    app.fallthrough();
    Output out;
    app.add_flag("--records", out.records, "one JSON record per line instead of text");
    std::function<int()> run;
    std::string law_out;
    // Writes the law in the FGL file format, for --input of later commands.
    auto save = [&](const FormalGroupLaw& G) {
        if (law_out.empty()) return;
        std::ofstream f(law_out);
        if (!f) throw Usage("cannot write " + law_out);
        f << write_fgl(G);
    };

    // universal
    int64_t u_p = 0;
    int u_deg = 0;
    std::string u_conv = "araki";
    auto* universal = app.add_subcommand("universal", "universal p-typical law");
    universal->add_option("--p", u_p, "prime")->required();
    universal->add_option("--degree", u_deg, "truncation bound")->required()->check(CLI::PositiveNumber);
    universal->add_option("--convention", u_conv)->check(CLI::IsMember({"araki", "hazewinkel"}));
    universal->add_option("--out", law_out, "also write the law to this file");
    universal->callback([&] {
        run = [&] {
            require_prime(u_p);
            PTypicalLaw U = universal_p_typical(u_p, u_deg, parse_convention(u_conv));
            emit_law(out, "F", U.law);
            save(U.law);
            for (size_t i = 0; i < U.log.coefficients.size(); ++i) {
                const std::string v = U.log.ring->render(U.log.coefficients[i]);
                out.line("l" + std::to_string(i) + " = " + v);
                Record r;
                r["record"] = "log_coefficient";
                r["index"] = i;
                r["value"] = v;
                out.record(r);
            }
            emit_series(out, "[p](x)", U.p_series);
            emit_flag(out, "p-series identity", U.p_series_identity);
            emit_flag(out, "grading", U.grading_ok);
            return U.p_series_identity && U.grading_ok ? 0 : 1;
        };
    });

    // typify
    LawSource ty;
    auto* typify = app.add_subcommand("typify", "Cartier typification");
    ty.add(typify, true);
    typify->add_option("--out", law_out, "also write eF to this file");
    typify->callback([&] {
        run = [&] {
            ty.require_prime();
            Typification T = cartier_typify(ty.load(), ty.p);
            emit_law(out, "eF", T.eG);
            save(T.eG);
            emit_series(out, "phi", T.phi);
            emit_flag(out, "phi is a homomorphism", T.phi_is_hom);
            emit_flag(out, "eF is p-typical", T.eG_p_typical);
            return T.phi_is_hom && T.eG_p_typical ? 0 : 1;
        };
    });

    // honda
    int64_t h_p = 0;
    int h_n = 1, h_deg = 0;
    auto* honda = app.add_subcommand("honda", "Honda law of height n over GF(p)");
    honda->add_option("--p", h_p)->required();
    honda->add_option("--n", h_n)->required()->check(CLI::PositiveNumber);
    honda->add_option("--degree", h_deg, "truncation bound (default p^(2n))");
    honda->add_option("--out", law_out, "also write the law to this file");
    honda->callback([&] {
        run = [&] {
            require_prime(h_p);
            int N = h_deg;
            if (N == 0) {
                int64_t q = 1;
                for (int i = 0; i < 2 * h_n; ++i) q *= h_p;
                N = static_cast<int>(q);
            }
            FormalGroupLaw H = honda_fgl(h_p, h_n, N);
            emit_law(out, "F", H);
            save(H);
            emit_series(out, "[p](x)", n_series(H, h_p));
            return 0;
        };
    });

    // pseries
    LawSource ps;
    long ps_k = 0;
    auto* pseries = app.add_subcommand("pseries", "[k](x), by default the p-series");
    ps.add(pseries, false);
    pseries->add_option("--k", ps_k, "multiplier (default p)");
    pseries->callback([&] {
        run = [&] {
            FormalGroupLaw G = ps.load();
            long k = ps_k ? ps_k : ps.p;
            if (k == 0) throw Usage("give --k or --p");
            emit_series(out, "[" + std::to_string(k) + "](x)", n_series(G, k));
            return 0;
        };
    });

    // height
    LawSource hs;
    bool hs_typical = false;
    auto* height = app.add_subcommand("height", "height, v_n and the Verschiebung");
    hs.add(height, true);
    height->add_flag("--ptypical", hs_typical, "the coordinate is p-typical (needed over non-fields)");
    height->callback([&] {
        run = [&] {
            hs.require_prime();
            FormalGroupLaw G = reduce_mod_p(hs.load(), hs.p);
            PSeriesData D = p_series_analyze(G, hs.p, hs_typical);
            out.line("height: " + D.height_str());
            out.line("v_n = " + G.ring()->render(D.vn) + " (degree " + std::to_string(D.vn_degree) + ")");
            Record r;
            r["record"] = "height";
            r["height"] = D.height ? Record(*D.height) : Record(nullptr);
            if (!D.height) r["at_least"] = D.hmax;
            r["vn"] = G.ring()->render(D.vn);
            r["vn_degree"] = D.vn_degree;
            out.record(r);
            for (size_t i = 0; i < D.ideal_chain.size(); ++i) {
                std::string g;
                for (auto& x : D.ideal_chain[i]) g += (g.empty() ? "" : ",") + x;
                out.line("I_" + std::to_string(i + 1) + " = (" + g + ")");
                Record c;
                c["record"] = "ideal";
                c["n"] = i + 1;
                c["generators"] = D.ideal_chain[i];
                out.record(c);
            }
            if (D.height && *D.height > 0) emit_series(out, "V_" + std::to_string(*D.height), verschiebung_series(G, *D.height));
            return 0;
        };
    });

    // iso and aut share the Honda setup
    int64_t i_p = 0;
    int i_n = 1, i_level = 1, i_m = 1;
    std::string i_source, i_target;
    auto* iso = app.add_subcommand("iso", "isomorphisms of p^k-buds over GF(p^m)");
    iso->add_option("--p", i_p)->required();
    iso->add_option("--n", i_n, "height of the Honda laws used when no files are given")->check(CLI::PositiveNumber);
    iso->add_option("--level", i_level, "k")->required()->check(CLI::PositiveNumber);
    iso->add_option("--field-degree", i_m, "m")->check(CLI::PositiveNumber);
    iso->add_option("--source", i_source, "FGL file over a finite field");
    iso->add_option("--target", i_target, "FGL file over a finite field");
    auto honda_bud = [&](int64_t p, int n, int k, int m) {
        int64_t q = 1;
        for (int i = 0; i < k + n - 1; ++i) q *= p;
        return extend_scalars(honda_fgl(p, n, static_cast<int>(q)), finite_field_ring(p, m));
    };
    auto read_law = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Usage("cannot read " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return read_fgl(ss.str());
    };
    iso->callback([&] {
        run = [&] {
            require_prime(i_p);
            FormalGroupLaw G = i_source.empty() ? honda_bud(i_p, i_n, i_level, i_m) : read_law(i_source);
            FormalGroupLaw H = i_target.empty() ? honda_bud(i_p, i_n, i_level, i_m) : read_law(i_target);
            BudIsoLevel L = bud_isomorphisms(G, H, i_level);
            out.line("isomorphisms: " + std::to_string(L.count()));
            if (!L.reason.empty()) out.line("reason: " + L.reason);
            Record r;
            r["record"] = "isomorphisms";
            r["count"] = L.count();
            r["reason"] = L.reason;
            r["verified"] = L.verified;
            out.record(r);
            for (size_t j = 0; j < L.levels.size(); ++j) {
                out.line("level " + std::to_string(j + 1) + ": " + std::to_string(L.levels[j].size()));
                Record c;
                c["record"] = "level";
                c["level"] = j + 1;
                c["count"] = L.levels[j].size();
                out.record(c);
            }
            auto phis = L.isomorphisms();
            for (size_t j = 0; j < phis.size(); ++j) emit_series(out, "phi" + std::to_string(j), phis[j]);
            emit_flag(out, "verified", L.verified || L.count() == 0);
            return L.verified || L.count() == 0 ? 0 : 1;
        };
    });

    auto* aut = app.add_subcommand("aut", "automorphism group of the p^k-bud of the Honda law");
    aut->add_option("--p", i_p)->required();
    aut->add_option("--n", i_n)->required()->check(CLI::PositiveNumber);
    aut->add_option("--level", i_level, "k")->required()->check(CLI::PositiveNumber);
    aut->add_option("--field-degree", i_m, "m")->check(CLI::PositiveNumber);
    aut->callback([&] {
        run = [&] {
            require_prime(i_p);
            int64_t q = 1;
            for (int i = 0; i < i_level + i_n - 1; ++i) q *= i_p;
            FiniteStabilizerGroup S = automorphism_group(honda_fgl(i_p, i_n, static_cast<int>(q)), i_level, i_m);
            out.line("order " + std::to_string(S.order()));
            Record r;
            r["record"] = "group";
            r["order"] = S.order();
            r["level_counts"] = S.level_counts;
            out.record(r);
            std::string lc;
            for (size_t c : S.level_counts) lc += (lc.empty() ? "" : " ") + std::to_string(c);
            out.line("level counts: " + lc);
            for (size_t j = 0; j < S.elements.size(); ++j) emit_series(out, "g" + std::to_string(j), S.elements[j]);
            const bool ok = S.closed && S.inverses && S.associative && S.stabilizer_relation;
            emit_flag(out, "group axioms", S.closed && S.inverses && S.associative);
            emit_flag(out, "a^(p^n) = a", S.stabilizer_relation);
            return ok ? 0 : 1;
        };
    });

    // algebroid and ext
    std::string a_kind = "bud";
    int a_n = 2, a_T = 6, a_s = 2, a_K = 0, a_shift = 0;
    int64_t a_p = 0;
    bool a_strict = false, a_modp = false;
    std::string a_kill;
    auto algebroid_opts = [&](CLI::App* cmd) {
        cmd->add_option("--kind", a_kind)->check(CLI::IsMember({"bud", "ptypical"}));
        cmd->add_option("--n", a_n, "bud size")->check(CLI::Range(2, 12));
        cmd->add_option("--p", a_p, "prime (ptypical kind, or the Ext precision prime)");
        cmd->add_option("--T", a_T, "internal degree bound")->check(CLI::PositiveNumber);
    };
    auto build_algebroid = [&]() -> GradedHopfAlgebroid {
        if (a_kind == "bud") return build_bud_algebroid(a_n, a_T).H;
        require_prime(a_p);
        return build_ptypical_algebroid(a_p, a_T);
    };
    auto* algebroid = app.add_subcommand("algebroid", "structure maps and axiom checks");
    algebroid_opts(algebroid);
    algebroid->callback([&] {
        run = [&] {
            GradedHopfAlgebroid H = build_algebroid();
            out.line(H.name + ": A = " + H.A->name() + ", Gamma = " + H.Gamma->name());
            auto table = [&](const std::string& what, const std::vector<Value>& v, const Ring& R, int first) {
                for (size_t i = 0; i < v.size(); ++i) {
                    const std::string g = H.Gamma->render(H.Gamma->gen(first + static_cast<int>(i)));
                    const std::string s = R->render(v[i]);
                    out.line(what + "(" + g + ") = " + s);
                    Record r;
                    r["record"] = what;
                    r["generator"] = g;
                    r["image"] = s;
                    out.record(r);
                }
            };
            table("eta_R", H.eta_R, H.Gamma, 0);
            table("Delta", H.delta, H.chain_ring(2), H.base_gens());
            table("c", H.antipode, H.Gamma, H.base_gens());
            for (auto& c : H.checks) emit_flag(out, c.axiom + (c.detail.empty() ? "" : " " + c.detail), c.ok);
            return H.verified() ? 0 : 1;
        };
    });

    auto* ext = app.add_subcommand("ext", "Ext chart from the cobar complex");
    algebroid_opts(ext);
    ext->add_option("--s-max", a_s)->check(CLI::NonNegativeNumber);
    ext->add_option("--K", a_K, "work modulo p^K (0: exact)")->check(CLI::NonNegativeNumber);
    ext->add_flag("--strict", a_strict, "fail when a free summand appears at s >= 1 at finite precision");
    ext->add_flag("--mod-p", a_modp, "comodule A/p");
    ext->add_option("--kill", a_kill, "further generators of A to kill, comma separated");
    ext->add_option("--shift", a_shift, "internal degree shift of the comodule");
    ext->callback([&] {
        run = [&] {
            GradedHopfAlgebroid H = build_algebroid();
            GradedComodule M{a_shift, a_modp, split(a_kill)};
            ExtChart E = ext_chart(H, M, a_s, a_T, ExtOptions{a_p, a_K, a_strict});
            out.line(H.name + " with coefficients " + M.str() + ", precision " + E.precision());
            out.block(E.table());
            for (auto& [st, g] : E.groups) {
                Record r;
                r["record"] = "ext";
                r["s"] = st.first;
                r["t"] = st.second;
                r["free_rank"] = g.free_rank;
                std::vector<std::string> tors;
                for (auto& o : g.torsion) tors.push_back(o.get_str());
                r["torsion"] = tors;
                r["precision"] = E.precision();
                out.record(r);
            }
            emit_flag(out, "d o d = 0", E.d_squared_zero);
            return E.d_squared_zero ? 0 : 1;
        };
    });

    // graded module commands
    ModuleSource ms_koszul, ms_local, ms_land, ms_trans, ms_frac;
    std::string seq, ideal;
    int t_lo = 0, t_hi = 10, box = -1, m_len = 2, height_h = 2, r_core = 0, s_max = 3;
    auto* koszul = app.add_subcommand("koszul", "Koszul homology H_s(K(u) (x) M)");
    ms_koszul.add(koszul, 1);
    koszul->add_option("--seq", seq, "the sequence, comma separated (p allowed)")->required();
    koszul->add_option("--t-lo", t_lo);
    koszul->add_option("--t-hi", t_hi);
    koszul->callback([&] {
        run = [&] {
            GradedRing R = ms_koszul.ring(ms_koszul.vars);
            emit_groups(out, koszul_homology(ms_koszul.module(R), split(seq), t_lo, t_hi), "koszul");
            return 0;
        };
    });

    auto* localcoh = app.add_subcommand("localcoh", "local cohomology H^s_I(M)");
    ms_local.add(localcoh, 1);
    localcoh->add_option("--ideal", ideal, "generators of I, comma separated (p allowed)")->required();
    localcoh->add_option("--t-lo", t_lo);
    localcoh->add_option("--t-hi", t_hi);
    localcoh->add_option("--box", box, "per multidegree with |internal degree| <= box, instead of totals");
    localcoh->callback([&] {
        run = [&] {
            GradedRing R = ms_local.ring(ms_local.vars);
            ModulePtr M = ms_local.module(R);
            if (box >= 0)
                emit_groups(out, local_cohomology(M, split(ideal), degree_box(R, box, R.core ? -box : 0, R.core ? box : 0)), "local_cohomology");
            else
                emit_groups(out, local_cohomology(M, split(ideal), t_lo, t_hi), "local_cohomology");
            return 0;
        };
    });

    auto* chromatic = app.add_subcommand("chromatic", "chromatic chain of ZZ/p^K[u1..uN]");
    int64_t c_p = 0;
    int c_K = 1, c_vars = 2, c_deg = 20;
    chromatic->add_option("--p", c_p)->required();
    chromatic->add_option("--K", c_K)->check(CLI::PositiveNumber);
    chromatic->add_option("--vars", c_vars)->check(CLI::NonNegativeNumber);
    chromatic->add_option("--m", m_len, "length of the sequence (p, u1, ..., u_{m-1})")->check(CLI::PositiveNumber);
    chromatic->add_option("--degree", c_deg, "bound on |internal degree|")->check(CLI::NonNegativeNumber);
    chromatic->callback([&] {
        run = [&] {
            require_prime(c_p);
            ChromaticChain C = chromatic_chain(v_truncation(c_p, c_K, c_vars, 0), m_len, c_deg);
            out.block(C.table());
            for (auto& l : C.links) {
                Record r;
                r["record"] = "link";
                r["n"] = l.n;
                r["element"] = l.element;
                r["injective"] = l.injective;
                r["exact"] = l.exact;
                r["degrees"] = l.degrees;
                out.record(r);
            }
            for (size_t n = 0; n < C.top_matches.size(); ++n) {
                Record r;
                r["record"] = "top";
                r["n"] = n + 1;
                r["concentrated_and_matching"] = static_cast<bool>(C.top_matches[n]);
                out.record(r);
            }
            return C.ok() ? 0 : 1;
        };
    });

    auto* landweber = app.add_subcommand("landweber", "Landweber exactness of a module");
    ms_land.add(landweber, 2);
    landweber->add_option("--height", height_h, "H")->check(CLI::NonNegativeNumber);
    landweber->add_option("--degree", c_deg, "bound on |internal degree|");
    landweber->callback([&] {
        run = [&] {
            GradedRing R = ms_land.ring(0);
            LandweberReport L = landweber_check(ms_land.module(R), height_h, degree_box(R, c_deg, R.core ? -c_deg : 0, R.core ? c_deg : 0));
            out.block(L.str());
            for (size_t n = 0; n < L.injective.size(); ++n) {
                Record r;
                r["record"] = "landweber_step";
                r["n"] = n;
                r["injective"] = static_cast<bool>(L.injective[n]);
                r["quotient_zero"] = static_cast<bool>(L.quotient_zero[n]);
                out.record(r);
            }
            Record v;
            v["record"] = "verdict";
            v["verdict"] = L.verdict == LandweberVerdict::RegularAndFinite   ? "regular-and-finite"
                           : L.verdict == LandweberVerdict::RegularNotFinite ? "regular-not-finite"
                                                                             : "fails-at";
            v["n"] = L.n;
            out.record(v);
            return L.verdict == LandweberVerdict::FailsAt ? 1 : 0;
        };
    });

    auto* transitions = app.add_subcommand("transitions", "transition maps H^s_{I_{n+1}} -> H^s_{I_n}");
    ms_trans.add(transitions, 2);
    transitions->add_option("--r", r_core, "M is induced from the first r variables")->check(CLI::NonNegativeNumber);
    transitions->add_option("--m", m_len)->check(CLI::PositiveNumber);
    transitions->add_option("--s-max", s_max)->check(CLI::NonNegativeNumber);
    transitions->add_option("--degree", c_deg, "bound on |internal degree|");
    transitions->callback([&] {
        run = [&] {
            if (ms_trans.core >= 0 && ms_trans.core != r_core) throw Usage("--core must equal --r");
            GradedRing R = ms_trans.ring(r_core);
            TransitionReport T = transition_zero_check(ms_trans.module(R), r_core, m_len, s_max, c_deg);
            out.block(T.table());
            for (auto& e : T.entries) {
                Record r;
                r["record"] = "transition";
                r["n"] = e.n;
                r["s"] = e.s;
                r["multidegree"] = e.degree;
                r["t"] = e.t;
                r["zero"] = e.zero;
                r["matrix"] = e.matrix;
                out.record(r);
            }
            return T.all_zero_above_r ? 0 : 1;
        };
    });

    auto* fracture = app.add_subcommand("fracture", "local cohomology against that of the completion");
    ms_frac.add(fracture, 1);
    fracture->add_option("--ideal", ideal)->required();
    fracture->add_option("--degree", c_deg, "bound on |internal degree|");
    fracture->callback([&] {
        run = [&] {
            GradedRing R = ms_frac.ring(ms_frac.vars);
            FractureReport F = fracture_check(ms_frac.module(R), split(ideal), degree_box(R, c_deg, R.core ? -c_deg : 0, R.core ? c_deg : 0));
            out.block(F.table());
            for (auto& e : F.entries) {
                Record r;
                r["record"] = "fracture";
                r["s"] = e.s;
                r["multidegree"] = e.degree;
                r["t"] = e.t;
                r["local"] = e.local.str(R.p);
                r["completed"] = e.completed.str(R.p);
                r["iso"] = e.iso;
                out.record(r);
            }
            return F.iso ? 0 : 1;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        const int code = run();
        out.flush(std::cout);
        return code;
    } catch (const Usage& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        // failures of a mathematical check; everything else is a bad request
        static const std::vector<std::string> check_failures{"NonStabilizing", "NotRegular", "PrecisionExhausted", "IntegralityFailure",
                                                             "CapExceeded"};
        std::cerr << e.what() << "\n";
        for (auto& k : check_failures)
            if (e.kind() == k) return 1;
        return 2;
    }
}
