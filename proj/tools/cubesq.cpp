// cubesq: command-line front end.
//
//   cubesq enumerate ...   smooth sets, cube-sum sieves, weight tables
//   cubesq local ...       exponential sums, singular series, local densities
//   cubesq arcs ...        generating functions, arcs, integrals, R(n)
//   cubesq census ...      the exceptional set E(N)
//
// Exit codes: 0 success, 1 other failure, 2 capacity, 3 verification, 4 bad
// configuration.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cubesq/arcs.hpp"
#include "cubesq/census.hpp"
#include "cubesq/cube_core.hpp"
#include "cubesq/local_densities.hpp"
#include "cubesq/numtheory.hpp"
#include "cubesq/run_config.hpp"
#include "cubesq/serialize.hpp"

using namespace cubesq;
using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kCapacity = 2, kVerification = 3, kBadConfig = 4 };

// Keys that do not affect results and so stay out of the config hash.
const std::vector<std::string> kUnhashed = {"threads", "config", "out", "elist", "witness-out"};

struct Output {
    std::string path;  // empty: stdout
    std::ofstream file;

    std::ostream& stream() {
        if (path.empty()) return std::cout;
        if (!file.is_open()) {
            file.open(path, std::ios::binary);
            if (!file) throw Error("cannot open " + path + " for writing");
        }
        return file;
    }
};

// Builds the RunConfig from every option the subcommand actually received.
RunConfig collect_config(const CLI::App* sub) {
    RunConfig cfg;
    cfg.subcommand = sub->get_name();
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->count() == 0) continue;
        std::string key = opt->get_single_name();
        if (std::find(kUnhashed.begin(), kUnhashed.end(), key) != kUnhashed.end()) continue;
        if (key == "help") continue;
        const auto res = opt->results();
        if (opt->get_type_size() == 0 || (res.size() == 1 && res[0] == "true")) {
            cfg.values[key] = true;
        } else if (res.size() == 1) {
            cfg.values[key] = res[0];
        } else {
            cfg.values[key] = res;
        }
    }
    return cfg;
}

// Turns {"key": value} into command-line tokens.
std::vector<std::string> config_to_args(const nlohmann::json& j) {
    if (!j.is_object()) throw ContractError("config: top level must be a JSON object");
    std::vector<std::string> args;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "subcommand") continue;
        const std::string flag = "--" + it.key();
        const auto& v = it.value();
        if (v.is_boolean()) {
            if (v.get<bool>()) args.push_back(flag);
        } else if (v.is_string()) {
            args.push_back(flag);
            args.push_back(v.get<std::string>());
        } else if (v.is_number() || v.is_array()) {
            if (v.is_array()) {
                for (const auto& e : v) {
                    args.push_back(flag);
                    args.push_back(e.is_string() ? e.get<std::string>() : e.dump());
                }
            } else {
                args.push_back(flag);
                args.push_back(v.dump());
            }
        } else {
            throw ContractError("config: unsupported value for key " + it.key());
        }
    }
    return args;
}

void stamp(ordered_json& j, const RunConfig& cfg) {
    j["config_hash"] = cfg.hash();
    j["version"] = kVersion;
    j["config"] = cfg.to_json();
}

void write_meta_sidecar(const std::string& path, const RunConfig& cfg, const std::string& what) {
    ordered_json j;
    j["artifact"] = path;
    j["content"] = what;
    stamp(j, cfg);
    std::ofstream os(path + ".meta.json");
    if (!os) throw Error("cannot write " + path + ".meta.json");
    os << j.dump(2) << '\n';
}

ordered_json cjson(cplx v) { return ordered_json::array({v.real(), v.imag()}); }

Params params_from_flags(std::optional<u64> N, std::optional<u64> P, double eta, std::optional<u64> R) {
    if (N && P) throw ContractError("give either --N or --P, not both");
    if (N) return derive_params(*N, eta, R);
    return params_from_P(P.value_or(8), eta, R);
}

std::vector<u64> prime_window(const Params& prm, const std::vector<u64>& override_primes) {
    if (!override_primes.empty()) return override_primes;
    auto pr = primes_in(prm.M / 2.0, prm.M);
    if (pr.empty()) {
        throw DegenerateError("no prime in [M/2, M] = [" + std::to_string(prm.M / 2) + ", " + std::to_string(prm.M) +
                              "]; pass --primes explicitly");
    }
    return pr;
}

// --- enumerate -----------------------------------------------------------------------

struct EnumerateOpts {
    std::optional<u64> csums, smooth, bound;
    bool counts = false;
    std::string weights;  // "a" or "b"
    std::optional<u64> N, P, R;
    double eta = 0.5;
    std::string format = "csv";
    std::string out;
};

int run_enumerate(const EnumerateOpts& o, const RunConfig& cfg) {
    PairTable table;
    std::string what;
    if (o.csums) {
        table = to_pairs(sieve_cube_sums(*o.csums, o.counts));
        what = "cube-sum sieve up to " + std::to_string(*o.csums);
    } else if (o.smooth) {
        if (!o.bound) throw ContractError("--smooth needs --bound");
        table = to_pairs(enumerate_smooth(*o.smooth, *o.bound));
        what = "smooth set A(" + std::to_string(*o.smooth) + ", " + std::to_string(*o.bound) + ")";
    } else if (!o.weights.empty()) {
        if (o.weights != "a" && o.weights != "b") throw ContractError("--weights must be a or b");
        const Params prm = params_from_flags(o.N, o.P, o.eta, o.R);
        table = to_pairs(build_weight_table(prm, o.weights == "a" ? Role::a : Role::b));
        what = "weight table " + o.weights + " at P = " + std::to_string(prm.P);
    } else {
        throw ContractError("enumerate: one of --csums, --smooth, --weights is required");
    }

    if (o.format == "bin") {
        if (o.out.empty()) throw ContractError("--format bin needs --out");
        write_binary_file(o.out, table);
        write_meta_sidecar(o.out, cfg, what);
    } else if (o.format == "csv") {
        Output out{o.out, {}};
        out.stream() << artifact_header(cfg) << '\n';
        write_csv(out.stream(), table);
    } else {
        throw ContractError("--format must be csv or bin");
    }
    return kOk;
}

// --- local -----------------------------------------------------------------------------

struct LocalOpts {
    bool verify_paper_sets = false;
    std::optional<u64> sigma_p, S_table, series_Q, hensel, two_adic, w2_max;
    std::optional<i64> n;
    int hmax = 3;
    int h = 8;
    double tol = 1e-4;
    bool check_majorant = false;
    std::string out;
};

int run_local(const LocalOpts& o, const RunConfig& cfg) {
    ordered_json j;
    int code = kOk;
    bool did = false;
    if (o.verify_paper_sets) {
        did = true;
        try {
            const PaperSets s = paper_sets_A_B();
            j["paper_sets"] = {{"A", s.A}, {"B", s.B}, {"A_plus_B", s.AplusB}, {"M33_27", s.m33_27}, {"match", true}};
        } catch (const VerificationError& e) {
            j["paper_sets"] = {{"match", false}, {"error", e.what()}};
            code = kVerification;
        }
    }
    if (o.sigma_p) {
        did = true;
        const EulerFactorEstimate e = sigma_p(*o.sigma_p, o.n.value_or(1), o.hmax, o.tol);
        ordered_json s;
        s["p"] = e.p;
        s["n"] = e.n;
        s["h"] = e.h;
        s["value"] = e.value;
        s["levels"] = e.levels;
        s["deltas"] = e.deltas;
        s["converged"] = e.converged;
        if (e.lower_constant) s["lower_constant"] = *e.lower_constant;
        j["sigma_p"] = s;
    }
    if (o.S_table) {
        did = true;
        const auto tab = complete_sum_table(*o.S_table);
        ordered_json rows = ordered_json::array();
        for (std::size_t a = 0; a < tab.size(); ++a) rows.push_back({a, tab[a].real(), tab[a].imag()});
        j["S_table"] = {{"q", *o.S_table}, {"rows", rows}};
    }
    if (o.series_Q) {
        did = true;
        const i64 n = o.n.value_or(1);
        const SeriesResult s = truncated_singular_series(n, *o.series_Q);
        ordered_json tails = ordered_json::array();
        for (const auto& t : s.tails) tails.push_back({{"lo", t.lo}, {"hi", t.hi}, {"abs_sum", t.abs_sum}});
        j["series"] = {{"n", n}, {"Q", s.Q}, {"value", s.value}, {"tails", tails}};
    }
    if (o.hensel) {
        did = true;
        const HenselCertificate c = hensel_certificate(*o.hensel, o.n.value_or(1));
        j["hensel"] = {{"p", c.p},         {"n", c.n},
                       {"modulus", c.modulus}, {"witness", c.witness},
                       {"found", c.found}, {"condition_checked", c.condition_checked},
                       {"branch", c.branch}};
    }
    if (o.two_adic) {
        did = true;
        const TwoAdicProfile t = two_adic_profile(*o.two_adic, o.h);
        ordered_json s{{"n", t.n},
                       {"gamma", t.gamma},
                       {"theta", t.theta},
                       {"h", t.h},
                       {"x", t.x},
                       {"solution_checked", t.solution_checked},
                       {"lower_bound", t.lower_bound},
                       {"count_exponent", t.count_exponent}};
        if (t.count) s["count"] = t.count->str();
        if (t.count_bound_holds) s["count_bound_holds"] = *t.count_bound_holds;
        j["two_adic"] = s;
    }
    if (o.w2_max) {
        did = true;
        u64 violations = 0, tight = 0;
        std::vector<double> decade_sums;
        double acc = 0;
        u64 next_decade = 10;
        for (u64 q = 1; q <= *o.w2_max; ++q) {
            const u128 inv6 = w2_inverse_sixth(q);
            if (inv6 < static_cast<u128>(q)) ++violations;
            if (inv6 == static_cast<u128>(q)) ++tight;
            const double w = w2(q);
            acc += w * w;
            if (q == next_decade) {
                decade_sums.push_back(acc);
                next_decade *= 10;
            }
        }
        std::vector<double> ratios;
        for (std::size_t i = 1; i < decade_sums.size(); ++i) ratios.push_back(decade_sums[i] / decade_sums[i - 1]);
        j["w2"] = {{"q_max", *o.w2_max},
                   {"majorant_violations", violations},
                   {"tight_count", tight},
                   {"decade_sums", decade_sums},
                   {"decade_ratios", ratios}};
        if (o.check_majorant && violations != 0) code = kVerification;
    }
    if (!did) throw ContractError("local: nothing to do (see --help)");
    stamp(j, cfg);
    Output out{o.out, {}};
    out.stream() << j.dump(2) << '\n';
    return code;
}

// --- arcs -----------------------------------------------------------------------------------

struct ArcsOpts {
    std::optional<u64> N, P, R;
    double eta = 0.5;
    std::vector<u64> primes;
    bool rn_exact = false, toy = false, v_at_zero = false, dft = false;
    std::optional<double> classify_alpha, X;
    std::optional<double> n_real;
    std::optional<u64> n_lo, n_hi;
    int sweep = 0;  // number of alpha grid points
    int decay = 0;  // number of beta points
    double tol = 1e-6;
    bool main_term = false;
    int n_samples = 4;
    u64 Q = 64;
    u64 seed = 1;
    u64 samples = 1000;
    bool restricted = false;
    std::string out;
};

int run_arcs(const ArcsOpts& o, const RunConfig& cfg) {
    Output out{o.out, {}};
    if (o.classify_alpha) {
        const double alpha = *o.classify_alpha;
        const ArcDissection d{o.X.value_or(1.0), o.n_real.value_or(1e6), kTau};
        const ArcHit h = classify(alpha, d);
        ordered_json j;
        j["alpha"] = alpha;
        j["X"] = d.X;
        j["n"] = d.n;
        j["class"] = h.major ? "major" : "minor";
        if (h.major) {
            j["a"] = h.a;
            j["q"] = h.q;
            j["beta"] = h.beta;
        }
        j["upsilon"] = upsilon(alpha, d, 0.0);
        stamp(j, cfg);
        out.stream() << j.dump(2) << '\n';
        return kOk;
    }
    if (o.rn_exact && o.toy) {
        // Single configuration: a = {3: 1}, b = {3: 1}, primes = {2}. The only
        // representation is 3^2 + 3^2 + (2^3 3)^2 + (2^3 3)^2 = 1170.
        WeightTable ta{Role::a, {3}, {1}}, tb{Role::b, {3}, {1}};
        const std::vector<u64> pr{2};
        ordered_json j;
        ordered_json rows = ordered_json::array();
        for (u64 n : {u64{0}, u64{1}, u64{1170}, u64{663570}}) {
            rows.push_back({{"n", n}, {"R", to_string(exact_Rn(n, ta, tb, pr))}});
        }
        j["toy"] = rows;
        const DftCounts d = exact_R_dft(ta, tb, pr);
        u64 mismatches = 0;
        const auto sparse = exact_R_range(0, d.grid - 1, ta, tb, pr);
        for (u64 n = 0; n < d.grid; ++n) mismatches += static_cast<u64>(sparse[n]) != d.R[n];
        j["dft_grid"] = d.grid;
        j["dft_mismatches"] = mismatches;
        stamp(j, cfg);
        out.stream() << j.dump(2) << '\n';
        return mismatches == 0 ? kOk : kVerification;
    }

    const Params prm = params_from_flags(o.N, o.P, o.eta, o.R);
    const double P = static_cast<double>(prm.P);
    OscOptions oo;
    oo.rel_tol = o.tol;

    if (o.v_at_zero) {
        const cplx a = osc_integral_v(0.0, P, OscMethod::cubature3d, oo);
        const cplx b = osc_integral_v(0.0, P, OscMethod::kernel1d, oo);
        const double vol = P * P * P / 2.0;
        const double rel = std::max(std::abs(a - vol), std::abs(b - vol)) / vol;
        ordered_json j{{"P", prm.P}, {"volume", vol}, {"cubature3d", cjson(a)}, {"kernel1d", cjson(b)},
                       {"max_rel_error", rel}, {"ok", rel < 1e-6}};
        stamp(j, cfg);
        out.stream() << j.dump(2) << '\n';
        return rel < 1e-6 ? kOk : kVerification;
    }
    if (o.decay > 0) {
        // beta grid geometric in n|beta| over [1e-2, 1e2].
        const double n = std::pow(P, 6.0);
        std::vector<double> betas(static_cast<std::size_t>(o.decay));
        std::vector<cplx> vals(betas.size());
        for (std::size_t i = 0; i < betas.size(); ++i) {
            const double t = betas.size() == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(betas.size() - 1);
            betas[i] = std::pow(10.0, -2.0 + 4.0 * t) / n;
        }
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(betas.size()); ++i) {
            vals[static_cast<std::size_t>(i)] = osc_integral_v(betas[static_cast<std::size_t>(i)], P, OscMethod::kernel1d, oo);
        }
        auto& os = out.stream();
        os << artifact_header(cfg) << '\n' << "beta\tre_v\tim_v\tenvelope\n" << std::setprecision(12);
        for (std::size_t i = 0; i < betas.size(); ++i) {
            const double env = P * P * P / (1.0 + n * std::abs(betas[i]));
            os << betas[i] << '\t' << vals[i].real() << '\t' << vals[i].imag() << '\t' << env << '\n';
        }
        return kOk;
    }

    const WeightTable ta = build_weight_table(prm, Role::a);
    const WeightTable tb = build_weight_table(prm, Role::b);
    const std::vector<u64> primes = prime_window(prm, o.primes);

    if (o.sweep > 0) {
        const double n = o.n_real.value_or(std::pow(P, 6.0));
        const ArcDissection d = major_arcs(prm, n);
        const auto m = static_cast<std::size_t>(o.sweep);
        std::vector<cplx> hs(m), Ws(m);
        std::vector<ArcHit> hits(m);
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
            const double alpha = static_cast<double>(i) / static_cast<double>(m);
            hs[static_cast<std::size_t>(i)] = eval_h(alpha, ta);
            Ws[static_cast<std::size_t>(i)] = eval_W(alpha, tb, primes, true);
            hits[static_cast<std::size_t>(i)] = classify(alpha, d);
        }
        auto& os = out.stream();
        os << artifact_header(cfg) << '\n' << "alpha\tre_h\tim_h\tre_W\tim_W\tclass\tq\n" << std::setprecision(12);
        for (std::size_t i = 0; i < m; ++i) {
            os << static_cast<double>(i) / static_cast<double>(m) << '\t' << hs[i].real() << '\t' << hs[i].imag()
               << '\t' << Ws[i].real() << '\t' << Ws[i].imag() << '\t' << (hits[i].major ? "major" : "minor") << '\t'
               << (hits[i].major ? hits[i].q : 0) << '\n';
        }
        return kOk;
    }
    if (o.rn_exact) {
        if (!o.n_lo) throw ContractError("--rn-exact needs --n-lo (and optionally --n-hi) or --toy");
        const u64 lo = *o.n_lo, hi = o.n_hi.value_or(lo);
        const auto R = exact_R_range(lo, hi, ta, tb, primes);
        ordered_json j;
        j["P"] = prm.P;
        ordered_json rows = ordered_json::array();
        for (u64 k = 0; k < R.size(); ++k) {
            if (R[k] != 0 || R.size() <= 1000) rows.push_back({{"n", lo + k}, {"R", to_string(R[k])}});
        }
        j["R"] = rows;
        if (o.dft) {
            const DftCounts d = exact_R_dft(ta, tb, primes);
            u64 mismatches = 0;
            for (u64 k = 0; k < R.size(); ++k) {
                const u64 n = lo + k;
                const u64 dv = n < d.grid ? d.R[n] : 0;
                mismatches += static_cast<u64>(R[k]) != dv;
            }
            j["dft_grid"] = d.grid;
            j["dft_mismatches"] = mismatches;
            if (mismatches) {
                stamp(j, cfg);
                out.stream() << j.dump(2) << '\n';
                return kVerification;
            }
        }
        stamp(j, cfg);
        out.stream() << j.dump(2) << '\n';
        return kOk;
    }
    if (o.main_term) {
        if (!o.n_lo || !o.n_hi) throw ContractError("--main-term needs --n-lo and --n-hi");
        JOptions jo;
        jo.seed = o.seed;
        jo.samples = o.samples;
        jo.restricted = o.restricted;
        jo.rel_tol = 1e-4;
        const MainTermReport r = main_term_report(*o.n_lo, *o.n_hi, o.n_samples, o.Q, prm, ta, tb, primes, jo);
        std::ostringstream s;
        write_report_json(s, r);
        ordered_json j = ordered_json::parse(s.str());
        stamp(j, cfg);
        out.stream() << j.dump(2) << '\n';
        return kOk;
    }
    throw ContractError("arcs: nothing to do (see --help)");
}

// --- census -------------------------------------------------------------------------------------

struct CensusOpts {
    std::optional<u64> N;
    bool witnesses = false;
    bool family = false;
    int jmax = 3;
    std::optional<double> upsilon;
    std::string elist;
    std::string witness_out;
    std::string out;
};

int run_census_cmd(const CensusOpts& o, const RunConfig& cfg) {
    Output out{o.out, {}};
    int code = kOk;
    if (o.family && !o.N) {
        const FamilyReport rep = verify_obstruction_family(o.jmax);
        ordered_json j;
        ordered_json members = ordered_json::array();
        for (const auto& m : rep.members) {
            members.push_back({{"j", m.j},
                               {"exponent", m.exponent},
                               {"n", m.n},
                               {"descent_ok", m.descent_ok},
                               {"mod9_ok", m.mod9_ok}});
        }
        j["family"] = members;
        j["mod8_forces_even"] = rep.mod8_forces_even;
        j["all_obstructed"] = rep.all_obstructed;
        stamp(j, cfg);
        out.stream() << j.dump(2) << '\n';
        return rep.all_obstructed ? kOk : kVerification;
    }
    if (o.upsilon && !o.N) throw ContractError("--upsilon needs --N");
    if (!o.N) throw ContractError("census: --N is required");

    const Census census(*o.N);
    std::ostringstream s;
    write_summary_json(s, census.summary(), cfg.hash());
    ordered_json j = ordered_json::parse(s.str());
    j["config"] = cfg.to_json();
    if (o.family) {
        const FamilyReport rep = verify_obstruction_family(o.jmax, &census);
        ordered_json members = ordered_json::array();
        for (const auto& m : rep.members) {
            ordered_json e{{"j", m.j}, {"n", m.n}, {"descent_ok", m.descent_ok}, {"mod9_ok", m.mod9_ok}};
            if (m.census_checked) e["census_agrees"] = m.census_agrees;
            members.push_back(e);
        }
        j["family"] = members;
        j["family_count"] = family_count(*o.N);
        j["family_count_formula"] = family_count_formula(*o.N);
        if (!rep.all_obstructed) code = kVerification;
    }
    if (o.upsilon) {
        const UpsilonFilter f = filter_A_upsilon(*o.N, *o.upsilon);
        j["A_upsilon"] = {{"upsilon", f.upsilon}, {"threshold", f.threshold}, {"min_gamma", f.min_gamma},
                          {"count", f.count},     {"bound", f.bound},         {"bound_holds", f.bound_holds},
                          {"log", "natural"}};
        if (!f.bound_holds) code = kVerification;
    }
    out.stream() << j.dump(2) << '\n';

    if (!o.elist.empty()) {
        std::ofstream os(o.elist);
        if (!os) throw Error("cannot open " + o.elist);
        os << artifact_header(cfg) << '\n';
        for (u64 n : census.summary().E_list) os << n << '\n';
    }
    if (o.witnesses) {
        std::vector<u64> ns;
        for (u64 n = 1; n <= *o.N; ++n) {
            if (census.representable(n)) ns.push_back(n);
            if (ns.size() == kCensusListCap) break;
        }
        if (o.witness_out.empty()) {
            std::cout << artifact_header(cfg) << '\n';
            write_witness_csv(std::cout, census, ns);
        } else {
            std::ofstream os(o.witness_out);
            if (!os) throw Error("cannot open " + o.witness_out);
            os << artifact_header(cfg) << '\n';
            write_witness_csv(os, census, ns);
        }
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cubesq: sums of four squares of sums of three cubes"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    std::string config_path;
    app.add_option("--threads", threads, "Cap on worker threads (default: all cores)");
    app.add_option("--config", config_path, "JSON file whose keys mirror the long flags");

    EnumerateOpts eo;
    auto* en = app.add_subcommand("enumerate", "Smooth sets, cube-sum sieves and weight tables");
    en->add_option("--csums", eo.csums, "Sieve sums of three positive cubes up to X");
    en->add_flag("--counts", eo.counts, "Store r3(n) with the sieve");
    en->add_option("--smooth", eo.smooth, "Enumerate R-smooth numbers up to Y");
    en->add_option("--bound", eo.bound, "Smoothness bound R for --smooth");
    en->add_option("--weights", eo.weights, "Weight table a or b");
    en->add_option("--N", eo.N, "Target size N");
    en->add_option("--P", eo.P, "Scale P (instead of N)");
    en->add_option("--eta", eo.eta, "Smoothness exponent eta");
    en->add_option("--R", eo.R, "Override the smoothness bound R");
    en->add_option("--format", eo.format, "csv or bin");
    en->add_option("--out", eo.out, "Output path (default stdout for csv)");

    LocalOpts lo;
    auto* lc = app.add_subcommand("local", "Exponential sums and local densities");
    lc->add_flag("--verify-paper-sets", lo.verify_paper_sets, "Regression gate for A, B, A+B mod 27");
    lc->add_option("--sigma-p", lo.sigma_p, "Euler factor estimate at prime p");
    lc->add_option("--n", lo.n, "Target residue n");
    lc->add_option("--hmax", lo.hmax, "Deepest level for --sigma-p");
    lc->add_option("--tol", lo.tol, "Convergence tolerance for --sigma-p");
    lc->add_option("--S", lo.S_table, "Table of S(q, a) for all a");
    lc->add_option("--series", lo.series_Q, "Truncated singular series up to Q at --n");
    lc->add_option("--hensel", lo.hensel, "Hensel certificate at prime p for --n");
    lc->add_option("--two-adic", lo.two_adic, "2-adic profile of n");
    lc->add_option("--level", lo.h, "Level 2^h for --two-adic");
    lc->add_option("--w2-max", lo.w2_max, "Tabulate w2 up to q");
    lc->add_flag("--check-majorant", lo.check_majorant, "Fail with exit 3 unless w2(q) <= q^{-1/6}");
    lc->add_option("--out", lo.out, "Output path (default stdout)");

    ArcsOpts ao;
    auto* ar = app.add_subcommand("arcs", "Generating functions, arcs and integrals");
    ar->add_option("--N", ao.N, "Target size N");
    ar->add_option("--P", ao.P, "Scale P (default 8)");
    ar->add_option("--eta", ao.eta, "Smoothness exponent eta");
    ar->add_option("--R", ao.R, "Override the smoothness bound R");
    ar->add_option("--primes", ao.primes, "Explicit prime list for W");
    ar->add_flag("--rn-exact", ao.rn_exact, "Exact R(n) by integer convolution");
    ar->add_flag("--toy", ao.toy, "Use the single-configuration toy tables");
    ar->add_flag("--dft", ao.dft, "Cross-check R(n) against the DFT grid");
    ar->add_flag("--v-at-zero", ao.v_at_zero, "Check v(0) = P^3/2 by both methods");
    ar->add_option("--classify", ao.classify_alpha, "Classify alpha in [0, 1)");
    ar->add_option("--X", ao.X, "Arc cutoff X for --classify");
    ar->add_option("--n", ao.n_real, "n scaling the arc widths");
    ar->add_option("--n-lo", ao.n_lo, "Window start");
    ar->add_option("--n-hi", ao.n_hi, "Window end");
    ar->add_option("--sweep", ao.sweep, "alpha-grid TSV with this many points");
    ar->add_option("--decay", ao.decay, "v(beta) decay TSV with this many points");
    ar->add_option("--tol", ao.tol, "Relative quadrature tolerance");
    ar->add_flag("--main-term", ao.main_term, "MainTermReport over [--n-lo, --n-hi]");
    ar->add_option("--n-samples", ao.n_samples, "Sampled n in the window");
    ar->add_option("--Q", ao.Q, "Singular series truncation");
    ar->add_option("--seed", ao.seed, "Monte Carlo seed");
    ar->add_option("--samples", ao.samples, "Monte Carlo samples per J(n)");
    ar->add_flag("--restricted", ao.restricted, "Restricted J(n) sampler");
    ar->add_option("--out", ao.out, "Output path (default stdout)");

    CensusOpts co;
    auto* ce = app.add_subcommand("census", "Exceptional set census");
    ce->add_option("--N", co.N, "Census range [1, N]");
    ce->add_flag("--witnesses", co.witnesses, "Emit witnesses as CSV n,c1,c2,c3,c4");
    ce->add_option("--witness-out", co.witness_out, "Witness CSV path (default stdout)");
    ce->add_flag("--family", co.family, "Verify the family 2^{6+12j}");
    ce->add_option("--jmax", co.jmax, "Largest j for --family");
    ce->add_option("--upsilon", co.upsilon, "A_upsilon filter exponent");
    ce->add_option("--elist", co.elist, "Write E(N) members, one per line");
    ce->add_option("--out", co.out, "Summary JSON path (default stdout)");

    try {
        // A --config file contributes its keys as flags placed before the
        // command-line ones, so explicit flags win.
        std::vector<std::string> args(argv + 1, argv + argc);
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "--config") {
                std::ifstream is(args[i + 1]);
                if (!is) throw ContractError("cannot open config " + args[i + 1]);
                nlohmann::json cj;
                try {
                    is >> cj;
                } catch (const nlohmann::json::exception& e) {
                    throw ContractError(std::string("config: ") + e.what());
                }
                std::vector<std::string> extra = config_to_args(cj);
                std::size_t sub = 0;
                while (sub < args.size() && args[sub] != "enumerate" && args[sub] != "local" && args[sub] != "arcs" &&
                       args[sub] != "census")
                    ++sub;
                if (sub == args.size()) {
                    if (!cj.contains("subcommand")) throw ContractError("config: no subcommand given");
                    args.push_back(cj["subcommand"].get<std::string>());
                    sub = args.size() - 1;
                }
                args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub) + 1, extra.begin(), extra.end());
                break;
            }
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadConfig;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadConfig;
    }

    try {
        if (threads > 0) set_max_threads(threads);
        if (en->parsed()) return run_enumerate(eo, collect_config(en));
        if (lc->parsed()) return run_local(lo, collect_config(lc));
        if (ar->parsed()) return run_arcs(ao, collect_config(ar));
        if (ce->parsed()) return run_census_cmd(co, collect_config(ce));
    } catch (const CapacityError& e) {
        std::cerr << "capacity: " << e.what() << '\n';
        return kCapacity;
    } catch (const VerificationError& e) {
        std::cerr << "verification failed: " << e.what() << '\n';
        return kVerification;
    } catch (const ContractError& e) {
        std::cerr << "bad configuration: " << e.what() << '\n';
        return kBadConfig;
    } catch (const DegenerateError& e) {
        std::cerr << "bad configuration: " << e.what() << '\n';
        return kBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
