// icregion: classify interference patterns, build capacity-region polytopes,
// and cross-verify them against the successive-decoding achievability region.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "icregion/icregion.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSemantic = 2;

using namespace icregion;

std::vector<int> parse_user_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        out.push_back(std::stoi(tok) - 1);  // CLI is 1-based
    }
    return out;
}

// "--fixed R3=0.5,R4=1" (1-based user indices, 'R' optional).
std::vector<std::pair<int, double>> parse_fixed(const std::string& s) {
    std::vector<std::pair<int, double>> out;
    if (s.empty()) return out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw Error("bad --fixed entry \"" + tok + "\"");
        std::string name = tok.substr(0, eq);
        if (!name.empty() && (name[0] == 'R' || name[0] == 'r')) name = name.substr(1);
        out.emplace_back(std::stoi(name) - 1, std::stod(tok.substr(eq + 1)));
    }
    return out;
}

std::string format_sig(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw Error("cannot write " + out_path);
        out << text;
    }
}

struct LoadedInstance {
    Channel channel;
    ProductDistribution dist;  // DMIC only
    bool is_gaussian = false;
};

LoadedInstance load_instance(const std::string& path, const std::string& dist_path) {
    LoadedInstance li{load_channel(path), {}, false};
    li.is_gaussian = std::holds_alternative<GaussianIC>(li.channel);
    if (!li.is_gaussian) {
        const auto& ch = std::get<Dmic>(li.channel);
        if (!dist_path.empty()) {
            li.dist = load_distribution(dist_path);
            ensure_valid(li.dist, ch);
        } else {
            li.dist.q_weights = {1.0};
            std::vector<std::vector<double>> pmfs;
            for (int s : ch.input_sizes) pmfs.emplace_back(s, 1.0 / s);
            li.dist.pmfs.push_back(std::move(pmfs));
        }
    } else if (!dist_path.empty()) {
        throw Error("--dist only applies to DMIC instances");
    }
    return li;
}

// Pattern selection: classification result for Gaussian instances, the
// cyclic pattern for DMICs (whose conditions sampling cannot certify).
struct PatternChoice {
    InterferencePattern pattern;
    bool conditions_pass = false;
    Classification cls;  // Gaussian only
};

PatternChoice choose_pattern(const LoadedInstance& li, bool force) {
    PatternChoice pc;
    if (li.is_gaussian) {
        const auto& ic = std::get<GaussianIC>(li.channel);
        pc.cls = classify_gaussian(ic);
        pc.conditions_pass = pc.cls.ok;
        if (pc.cls.ok) {
            pc.pattern = pc.cls.pattern;
        } else if (force) {
            pc.pattern = cyclic_pattern(ic.k);
        } else {
            throw ConditionError(
                "instance does not satisfy the mixed strong / very-strong conditions "
                "(use --force to build the inner region for the cyclic pattern)");
        }
    } else {
        pc.pattern = cyclic_pattern(std::get<Dmic>(li.channel).k);
    }
    return pc;
}

ojson pattern_to_json(const InterferencePattern& pat) {
    return ojson{{"strong", pat.strong}, {"very_strong", pat.very_strong}};
}

int cmd_check(const std::string& path, bool as_json) {
    const Channel channel = load_channel(path);
    if (!std::holds_alternative<GaussianIC>(channel))
        throw Error("check requires a Gaussian instance; use verify for DMICs");
    const auto& ic = std::get<GaussianIC>(channel);
    const Classification cls = classify_gaussian(ic);

    if (as_json) {
        ojson j;
        j["ok"] = cls.ok;
        j["case"] = cls.case_label;
        if (cls.ok) {
            j["pattern"] = pattern_to_json(cls.pattern);
            ojson conds = ojson::array();
            for (const auto& item : check_conditions(ic, cls.pattern).items)
                conds.push_back({{"receiver", item.receiver},
                                 {"user", item.user},
                                 {"kind", to_string(item.kind)},
                                 {"margin", item.margin},
                                 {"vacuous", item.vacuous}});
            j["conditions"] = std::move(conds);
        } else {
            ojson rx = ojson::array();
            for (int r : cls.uncoverable_receivers) rx.push_back(r);
            j["uncoverable_receivers"] = std::move(rx);
        }
        std::cout << j.dump(2) << "\n";
        return cls.ok ? kExitOk : kExitSemantic;
    }

    if (!cls.ok) {
        std::cout << "classification: FAILED; receivers without a valid assignment:";
        for (int j : cls.uncoverable_receivers) std::cout << " " << (j + 1);
        std::cout << "\n";
        return kExitSemantic;
    }
    std::cout << "classification: pattern found";
    if (!cls.case_label.empty()) std::cout << " (" << cls.case_label << ")";
    std::cout << "\n";
    for (const auto& item : check_conditions(ic, cls.pattern).items) {
        std::cout << "  receiver " << (item.receiver + 1) << ": user " << (item.user + 1) << " "
                  << to_string(item.kind) << ", margin " << item.margin
                  << (item.vacuous ? " (vacuous: zero power)" : "") << "\n";
    }
    return kExitOk;
}

int cmd_region(const std::string& path, const std::string& dist_path, const std::string& format,
               const std::string& out_path, bool force) {
    const LoadedInstance li = load_instance(path, dist_path);
    const PatternChoice pc = choose_pattern(li, force);

    RatePolytope poly;
    if (li.is_gaussian)
        poly = capacity_polytope(std::get<GaussianIC>(li.channel), pc.pattern, force);
    else
        poly = capacity_polytope(std::get<Dmic>(li.channel), li.dist, pc.pattern);

    std::ostringstream os;
    if (format == "json") {
        os << to_json(poly, true).dump(2) << "\n";
    } else if (format == "vertices") {
        for (const auto& v : vertices(poly)) {
            for (std::size_t i = 0; i < v.rates.size(); ++i)
                os << (i ? " " : "") << format_sig(v.rates[i]);
            os << "\n";
        }
    } else if (format == "hrep") {
        for (const auto& h : poly.halfspaces) {
            for (std::size_t i = 0; i < h.users.size(); ++i)
                os << (i ? " + " : "") << "R" << (h.users[i] + 1);
            os << " <= " << format_sig(h.bound) << "  [";
            for (std::size_t i = 0; i < h.sources.size(); ++i)
                os << (i ? ", " : "") << h.sources[i].label;
            os << "]\n";
        }
    } else {
        throw Error("unknown --format " + format);
    }
    emit(os.str(), out_path);
    return kExitOk;
}

int cmd_slice(const std::string& path, const std::string& dist_path, const std::string& users_arg,
              const std::string& fixed_arg, int grid, const std::string& out_path, bool force) {
    const LoadedInstance li = load_instance(path, dist_path);
    const PatternChoice pc = choose_pattern(li, force);

    RatePolytope poly;
    if (li.is_gaussian)
        poly = capacity_polytope(std::get<GaussianIC>(li.channel), pc.pattern, force);
    else
        poly = capacity_polytope(std::get<Dmic>(li.channel), li.dist, pc.pattern);

    const auto users = parse_user_list(users_arg);
    if (users.size() != 2) throw Error("--users needs exactly two user indices, e.g. 1,2");
    std::vector<double> fixed(poly.dim, 0.0);
    for (const auto& [u, v] : parse_fixed(fixed_arg)) {
        if (u < 0 || u >= poly.dim) throw Error("--fixed user index out of range");
        fixed[u] = v;
    }

    const Slice2D s = slice2d(poly, users[0], users[1], fixed, grid);
    std::ostringstream os;
    os << "R_" << (users[0] + 1) << ",R_" << (users[1] + 1) << "\n";
    for (const auto& [x, y] : s.grid) os << format_sig(x) << "," << format_sig(y) << "\n";
    emit(os.str(), out_path);
    return kExitOk;
}

int cmd_mi(const std::string& path, const std::string& dist_path, const std::string& senders_arg,
           int receiver_1based, const std::string& given_arg, long long mc_samples,
           std::uint64_t seed, bool as_json) {
    const LoadedInstance li = load_instance(path, dist_path);
    MiQuery q;
    q.senders = parse_user_list(senders_arg);
    q.receiver = receiver_1based - 1;
    if (!given_arg.empty()) q.given = parse_user_list(given_arg);

    double value = 0.0;
    std::optional<McEstimate> mc;
    if (li.is_gaussian) {
        const auto& ic = std::get<GaussianIC>(li.channel);
        value = gaussian_mi(ic, q);
        if (mc_samples > 0) mc = mc_gaussian_mi(ic, q, mc_samples, seed);
    } else {
        value = dmic_mi(std::get<Dmic>(li.channel), li.dist, q);
        if (mc_samples > 0) throw Error("--mc only applies to Gaussian instances");
    }

    if (as_json) {
        ojson j;
        j["bits"] = value;
        if (mc) {
            j["mc_estimate"] = mc->estimate;
            j["mc_stderr"] = mc->stderr_;
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << value << "\n";
        if (mc) std::cout << "mc: " << mc->estimate << " +- " << mc->stderr_ << " (stderr)\n";
    }
    return kExitOk;
}

int cmd_random(int k, std::uint64_t seed, const std::string& out_path) {
    const GeneratedInstance gi = random_conforming_instance(k, seed);
    const std::string text = to_json(gi).dump(2) + "\n";
    emit(text, out_path);
    if (gi.powers_rescaled)
        std::cerr << "note: powers rescaled by " << gi.power_scale
                  << " to make the very-strong system feasible\n";
    return kExitOk;
}

void print_report(const std::string& heading, const VerifyReport& rep) {
    if (!heading.empty()) std::cout << heading << "\n";
    for (const auto& c : rep.checks) {
        std::cout << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": " << c.details
                  << " (max deviation " << c.max_deviation << ")\n";
    }
}

ojson report_to_json(const VerifyReport& rep) {
    ojson checks = ojson::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"max_deviation", c.max_deviation},
                          {"details", c.details}});
    return ojson{{"pass", rep.pass()}, {"checks", std::move(checks)}};
}

int cmd_verify(const std::string& path, const std::string& dist_path,
               const std::vector<std::string>& random_args, long long samples,
               std::uint64_t seed, double tol, bool force, bool as_json) {
    VerifyOptions opts;
    opts.mc_samples = samples;
    opts.seed = seed;
    opts.tol = tol;
    opts.force = force;

    bool all_pass = true;
    ojson instances = ojson::array();

    if (!random_args.empty()) {
        if (random_args.size() != 3) throw Error("--random needs three values: k seed n");
        const int k = std::stoi(random_args[0]);
        const std::uint64_t base_seed = std::stoull(random_args[1]);
        const int n = std::stoi(random_args[2]);
        for (int t = 0; t < n; ++t) {
            const auto gi = random_conforming_instance(k, base_seed + t);
            const auto rep = verify_gaussian(gi.ic, opts);
            all_pass = all_pass && rep.pass();
            if (as_json) {
                ojson e = report_to_json(rep);
                e["seed"] = base_seed + t;
                instances.push_back(std::move(e));
            } else {
                print_report("instance seed " + std::to_string(base_seed + t) + ":", rep);
            }
        }
    } else {
        const LoadedInstance li = load_instance(path, dist_path);
        VerifyReport rep;
        if (li.is_gaussian) {
            rep = verify_gaussian(std::get<GaussianIC>(li.channel), opts);
        } else {
            const auto& ch = std::get<Dmic>(li.channel);
            rep = verify_dmic(ch, li.dist, cyclic_pattern(ch.k), opts);
        }
        all_pass = rep.pass();
        if (as_json) {
            instances.push_back(report_to_json(rep));
        } else {
            print_report("", rep);
        }
    }

    if (as_json) {
        std::cout << ojson{{"pass", all_pass}, {"instances", std::move(instances)}}.dump(2)
                  << "\n";
    } else {
        std::cout << (all_pass ? "verify: PASS" : "verify: FAIL") << "\n";
    }
    return all_pass ? kExitOk : kExitSemantic;
}

}  // namespace

int main(int argc, char** argv) {
    // Internal computations are single-threaded; the thread cap is accepted
    // for compatibility and never affects results.
    if (const char* env = std::getenv("ICREGION_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || v < 1)
            std::cerr << "warning: ignoring invalid ICREGION_THREADS=" << env << "\n";
    }

    CLI::App app{"capacity regions of K-user interference channels under mixed "
                 "strong / very-strong interference"};
    app.require_subcommand(1);

    std::string input, dist_path, out_path, format = "hrep", users_arg, fixed_arg,
                senders_arg, given_arg;
    bool as_json = false, force = false, mc_flag = false;
    int grid = 64, receiver = 1, rand_k = 3;
    long long samples = 200000, mi_mc_samples = 0;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    std::vector<std::string> random_args;

    auto* check = app.add_subcommand("check", "classify an instance and check the conditions");
    check->add_option("input", input, "channel JSON file")->required();
    check->add_flag("--json", as_json, "machine-readable output");

    auto* region = app.add_subcommand("region", "emit the capacity-region polytope");
    region->add_option("input", input, "channel JSON file")->required();
    region->add_option("--format", format, "hrep | vertices | json")->capture_default_str();
    region->add_option("--out", out_path, "output file (default stdout)");
    region->add_option("--dist", dist_path, "input distribution JSON (DMIC)");
    region->add_flag("--force", force, "build the inner region even if the conditions fail");

    auto* slice = app.add_subcommand("slice", "2D slice of the region as CSV");
    slice->add_option("input", input, "channel JSON file")->required();
    slice->add_option("--users", users_arg, "pair of 1-based user indices, e.g. 1,2")->required();
    slice->add_option("--fixed", fixed_arg, "fixed rates, e.g. R3=0.5");
    slice->add_option("--grid", grid, "grid sample count")->capture_default_str();
    slice->add_option("--out", out_path, "output CSV file (default stdout)");
    slice->add_option("--dist", dist_path, "input distribution JSON (DMIC)");
    slice->add_flag("--force", force, "slice the inner region even if the conditions fail");

    auto* verify = app.add_subcommand("verify", "run the full cross-verification suite");
    verify->add_option("input", input, "channel JSON file");
    verify->add_option("--random", random_args, "generate instances: k seed n")->expected(3);
    verify->add_option("--dist", dist_path, "input distribution JSON (DMIC)");
    verify->add_option("--samples", samples, "Monte Carlo samples per MI term")
        ->capture_default_str();
    verify->add_option("--seed", seed, "seed for sampled checks")->capture_default_str();
    verify->add_option("--tol", tol, "geometric tolerance")->capture_default_str();
    verify->add_flag("--force", force, "probe a non-conforming instance");
    verify->add_flag("--json", as_json, "machine-readable output");

    auto* mi = app.add_subcommand("mi", "evaluate one mutual-information term");
    mi->add_option("input", input, "channel JSON file")->required();
    mi->add_option("--dist", dist_path, "input distribution JSON (DMIC)");
    mi->add_option("--senders", senders_arg, "1-based sender set, e.g. 1,2")->required();
    mi->add_option("--receiver", receiver, "1-based receiver index")->required();
    mi->add_option("--given", given_arg, "1-based conditioned set");
    mi->add_option("--mc", mi_mc_samples, "also run the Monte Carlo oracle with this many samples");
    mi->add_option("--seed", seed, "Monte Carlo seed")->capture_default_str();
    mi->add_flag("--json", as_json, "machine-readable output");

    auto* random = app.add_subcommand("random", "write a seeded conforming instance");
    random->add_option("--k", rand_k, "user count (>= 3)")->required();
    random->add_option("--seed", seed, "generator seed")->required();
    random->add_option("--out", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    (void)mc_flag;

    try {
        if (check->parsed()) return cmd_check(input, as_json);
        if (region->parsed()) return cmd_region(input, dist_path, format, out_path, force);
        if (slice->parsed())
            return cmd_slice(input, dist_path, users_arg, fixed_arg, grid, out_path, force);
        if (verify->parsed())
            return cmd_verify(input, dist_path, random_args, samples, seed, tol, force, as_json);
        if (mi->parsed())
            return cmd_mi(input, dist_path, senders_arg, receiver, given_arg, mi_mc_samples, seed,
                          as_json);
        if (random->parsed()) return cmd_random(rand_k, seed, out_path);
    } catch (const ConditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSemantic;
    } catch (const EmptySliceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSemantic;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
