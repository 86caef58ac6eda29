#include "rbm/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rbm/error.hpp"
#include "rbm/fredholm.hpp"
#include "rbm/hitting.hpp"
#include "rbm/initial_data.hpp"
#include "rbm/kernel.hpp"
#include "rbm/parallel.hpp"
#include "rbm/scaling.hpp"
#include "rbm/simulate.hpp"
#include "rbm/validate.hpp"
#include "rbm/version.hpp"

namespace rbm {

namespace {

using json = nlohmann::ordered_json;

struct RunConfig {
    std::string command;
    double t = 1.0;
    std::string indices, a, levels, init_csv, wedges;
    int length = 0;
    int quad_order = 40;
    double pad = 10.0;
    double target = 1e-6;
    int max_refinements = 3;
    std::string representation = "hitting";
    std::int64_t paths = 100000;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    std::string scheme = "bridge";
    std::string output = "json";
    unsigned threads = 0;
    double eta = 0.0;
    int n_max = 0;
    int samples = 101;
    std::string suite = "all";
    std::string x = "0";
    std::string eps = "0.2,0.1,0.05";
    std::string sizes = "2,4";
};

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw ArgumentError("empty entry in list '" + s + "'");
        out.push_back(item.substr(b, e - b + 1));
    }
    if (out.empty()) throw ArgumentError("empty list");
    return out;
}

double to_double(const std::string& s, bool allow_inf = false) {
    std::string low = s;
    std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
    if (low == "inf" || low == "+inf" || low == "infinity") {
        if (!allow_inf) throw ArgumentError("infinite value not allowed here: '" + s + "'");
        return INFINITY;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ArgumentError("not a number: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ArgumentError("not a finite number: '" + s + "'");
    return v;
}

std::vector<double> doubles(const std::string& s, bool allow_inf = false) {
    std::vector<double> out;
    for (const auto& item : split(s)) out.push_back(to_double(item, allow_inf));
    return out;
}

std::vector<int> ints(const std::string& s) {
    std::vector<int> out;
    for (const auto& item : split(s)) {
        const double v = to_double(item);
        if (v != std::floor(v) || std::abs(v) > 1e9) throw ArgumentError("not an integer: '" + item + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

json levels_json(const InitialCondition& ic) {
    return json{{"infinite_prefix", ic.infinite_prefix()}, {"finite_levels", ic.finite_levels()}};
}

struct ResolvedIc {
    InitialCondition ic;
    json description;
};

// exactly one of --levels, --init-csv, --wedges
ResolvedIc resolve_ic(const RunConfig& c, int needed) {
    const int sources = !c.levels.empty() + !c.init_csv.empty() + !c.wedges.empty();
    if (sources != 1) throw ArgumentError("give exactly one of --levels, --init-csv, --wedges");
    if (!c.levels.empty()) {
        InitialCondition ic = InitialCondition::from_positions(doubles(c.levels, true));
        json d{{"source", "levels"}};
        d.update(levels_json(ic));
        return {ic, d};
    }
    if (!c.init_csv.empty()) {
        InitialCondition ic = read_initial_csv_file(c.init_csv);
        json d{{"source", "csv"}, {"path", c.init_csv}};
        d.update(levels_json(ic));
        return {ic, d};
    }
    const auto at = c.wedges.find('@');
    if (at == std::string::npos) throw ArgumentError("--wedges needs the form a1,a2,...@eps");
    const std::vector<double> pos = doubles(c.wedges.substr(0, at));
    const double eps = to_double(c.wedges.substr(at + 1));
    const int length = c.length > 0 ? c.length : needed;
    InitialCondition ic = narrow_wedge_approx(pos, eps, length);
    json d{{"source", "wedges"}, {"wedges", pos}, {"eps", eps}, {"length", length}};
    d.update(levels_json(ic));
    return {ic, d};
}

Representation parse_representation(const std::string& s) {
    if (s == "hitting") return Representation::hitting;
    if (s == "biorth") return Representation::biorth;
    if (s == "operator") return Representation::operator_step;
    throw ArgumentError("unknown representation '" + s + "' (hitting, biorth, operator)");
}

DetOptions det_options(const RunConfig& c) {
    if (c.quad_order < 2) throw ArgumentError("--quad-order must be >= 2");
    if (!(c.pad > 2.0)) throw ArgumentError("--pad must be > 2");
    if (!(c.target > 0.0)) throw ArgumentError("--target must be > 0");
    if (c.max_refinements < 0) throw ArgumentError("--max-refinements must be >= 0");
    return DetOptions{c.quad_order, c.pad, c.target, c.max_refinements};
}

json det_config(const RunConfig& c) {
    return json{{"quad_order", c.quad_order}, {"pad", c.pad}, {"target", c.target}, {"max_refinements", c.max_refinements}};
}

void check_output(const RunConfig& c) {
    if (c.output != "json" && c.output != "csv") throw ArgumentError("--output must be json or csv");
}

void emit(std::ostream& out, const RunConfig& c, json config, json result) {
    json report;
    report["schema"] = kReportSchema;
    report["version"] = kVersion;
    report["command"] = c.command;
    config["threads"] = c.threads;
    config["output"] = c.output;
    report["config"] = std::move(config);
    report["result"] = std::move(result);
    out << report.dump(2) << "\n";
}

// shortest round-trip representation
std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

int cmd_prob(const RunConfig& c, std::ostream& out) {
    const std::vector<int> idx = ints(c.indices);
    const std::vector<double> a = doubles(c.a);
    if (idx.size() != a.size()) throw ArgumentError("--indices and --a must have the same length");
    ResolvedIc r = resolve_ic(c, *std::max_element(idx.begin(), idx.end()));
    KernelSpec spec{c.t, idx, r.ic, parse_representation(c.representation), true, {}};
    spec.options.threads = c.threads;
    const DetResult d = rbm_probability(spec, a, det_options(c));
    if (c.output == "csv") {
        out << "probability,error_estimate,order_used,truncation_length\n"
            << fmt(d.value) << "," << fmt(d.error_estimate) << "," << d.order_used << "," << fmt(d.pad_used) << "\n";
        return kExitOk;
    }
    json config{{"t", c.t}, {"indices", idx}, {"a", a}, {"initial_data", r.description}, {"representation", c.representation}};
    config.update(det_config(c));
    emit(out, c, config,
         json{{"probability", d.value}, {"error_estimate", d.error_estimate}, {"order_used", d.order_used},
              {"truncation_length", d.pad_used}});
    return kExitOk;
}

McScheme parse_scheme(const std::string& s) {
    if (s == "bridge") return McScheme::bridge;
    if (s == "euler") return McScheme::euler;
    throw ArgumentError("unknown scheme '" + s + "' (bridge, euler)");
}

int cmd_mc(const RunConfig& c, std::ostream& out) {
    const std::vector<int> idx = ints(c.indices);
    const std::vector<double> a = doubles(c.a);
    if (idx.size() != a.size()) throw ArgumentError("--indices and --a must have the same length");
    ResolvedIc r = resolve_ic(c, *std::max_element(idx.begin(), idx.end()));
    const McResult m = mc_distribution(r.ic, c.t, idx, a, c.paths, c.dt, c.seed, parse_scheme(c.scheme), c.threads);
    if (c.output == "csv") {
        out << "estimate,stderr,paths,dt,seed\n"
            << fmt(m.estimate) << "," << fmt(m.stderr_) << "," << m.paths << "," << fmt(m.dt) << "," << m.seed << "\n";
        return kExitOk;
    }
    json config{{"t", c.t},         {"indices", idx},  {"a", a},           {"initial_data", r.description},
                {"paths", c.paths}, {"dt", c.dt},      {"seed", c.seed},   {"scheme", c.scheme},
                {"seed_derivation", "path p uses mt19937_64(mix_seed(seed, p))"}};
    emit(out, c, config,
         json{{"estimate", m.estimate}, {"stderr", m.stderr_}, {"paths", m.paths}, {"dt_used", m.dt}});
    return kExitOk;
}

int cmd_hitting(const RunConfig& c, std::ostream& out) {
    ResolvedIc r = resolve_ic(c, std::max(c.n_max, 1));
    const int n_max = c.n_max > 0 ? c.n_max : r.ic.size();
    if (c.samples < 2) throw ArgumentError("--samples must be >= 2");
    const HittingLaw law = hitting_law_exact(blocks(r.ic), c.eta, n_max, ExactMode::sweep, c.samples);
    if (c.output == "csv") {
        write_law_csv(out, law, c.samples);
        return kExitOk;
    }
    json comps = json::array();
    for (const auto& k : law.components)
        comps.push_back(json{{"ell", k.ell}, {"lo", k.lo}, {"hi", k.hi}, {"mass", k.mass}});
    json config{{"eta", c.eta}, {"n_max", n_max}, {"initial_data", r.description}, {"samples", c.samples}};
    emit(out, c, config,
         json{{"atom", law.atom}, {"total_mass", law.total_mass()}, {"components", comps}});
    return kExitOk;
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
    const std::vector<SuiteResult> rs = validate_suite(c.suite, c.seed);
    bool ok = true;
    for (const auto& r : rs) ok = ok && r.passed;
    if (c.output == "csv") {
        out << "suite,max_error,tolerance,cases,passed\n";
        for (const auto& r : rs)
            out << r.name << "," << fmt(r.max_error) << "," << fmt(r.tolerance) << "," << r.cases << "," << (r.passed ? 1 : 0)
                << "\n";
    } else {
        json suites = json::array();
        for (const auto& r : rs)
            suites.push_back(json{{"suite", r.name},
                                  {"max_error", r.max_error},
                                  {"tolerance", r.tolerance},
                                  {"cases", r.cases},
                                  {"passed", r.passed},
                                  {"detail", r.detail}});
        emit(out, c, json{{"suite", c.suite}, {"seed", c.seed}}, json{{"suites", suites}, {"all_passed", ok}});
    }
    return ok ? kExitOk : kExitNumerical;
}

int cmd_scaling(const RunConfig& c, std::ostream& out) {
    if (c.wedges.empty()) throw ArgumentError("scaling needs --wedges a1,a2,...");
    const std::string w = c.wedges.substr(0, c.wedges.find('@'));
    const std::vector<double> pos = doubles(w), xs = doubles(c.x), A = doubles(c.a), eps = doubles(c.eps);
    const std::vector<StudyRow> rows = convergence_study(pos, c.t, xs, A, eps, det_options(c), c.threads);
    if (c.output == "csv") {
        out << "eps,prob_rbm,prob_fp,abs_err,det_err_rbm,det_err_fp\n";
        for (const auto& r : rows) {
            if (!r.feasible) {
                out << fmt(r.eps) << ",,,,,\n";
                continue;
            }
            out << fmt(r.eps) << "," << fmt(r.prob_rbm) << "," << fmt(r.prob_fp) << "," << fmt(r.abs_err) << ","
                << fmt(r.det_err_rbm) << "," << fmt(r.det_err_fp) << "\n";
        }
        return kExitOk;
    }
    json table = json::array();
    for (const auto& r : rows) {
        json row{{"eps", r.eps}, {"feasible", r.feasible}};
        if (r.feasible) {
            row["n"] = r.n;
            row["x_eff"] = r.x_eff;
            row["prob_rbm"] = r.prob_rbm;
            row["prob_fp"] = r.prob_fp;
            row["abs_err"] = r.abs_err;
            row["det_err_rbm"] = r.det_err_rbm;
            row["det_err_fp"] = r.det_err_fp;
        } else {
            row["note"] = r.note;
        }
        table.push_back(row);
    }
    json config{{"t", c.t}, {"wedges", pos}, {"x", xs}, {"a", A}, {"eps", eps}};
    config.update(det_config(c));
    emit(out, c, config, json{{"rows", table}});
    return kExitOk;
}

int cmd_gue(const RunConfig& c, std::ostream& out) {
    const std::vector<int> sizes = ints(c.sizes);
    const std::vector<double> a = c.a.empty() ? std::vector<double>{-2, -1, 0, 1, 2} : doubles(c.a);
    if (c.paths < 1) throw ArgumentError("--paths must be >= 1");
    json rows = json::array();
    std::ostringstream csv;
    csv << "n,a,prob_det,prob_gue,stderr,z\n";
    bool within = true;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        const int n = sizes[k];
        if (n < 1) throw ArgumentError("--sizes entries must be >= 1");
        std::vector<double> lam = gue_edge_sample(n, c.paths, mix_seed(c.seed, static_cast<std::uint64_t>(n)), c.threads);
        KernelSpec spec{c.t, {n}, InitialCondition::from_positions(std::vector<double>(n, 0.0)), Representation::hitting,
                        true, {}};
        spec.options.threads = c.threads;
        for (double thr : a) {
            const DetResult d = rbm_probability(spec, {thr}, det_options(c));
            double hits = 0.0;
            for (double v : lam) hits += v <= -thr / std::sqrt(c.t) ? 1.0 : 0.0;
            const double p = hits / static_cast<double>(lam.size());
            // binomial spread under the determinant value, so an empty tail still gets a finite z
            const double pd = std::clamp(d.value, 0.0, 1.0);
            const double se = std::sqrt(pd * (1.0 - pd) / static_cast<double>(lam.size()));
            const double z = se > 0.0 ? (p - pd) / se : (std::abs(d.value - p) < 1e-12 ? 0.0 : INFINITY);
            within = within && std::abs(z) <= 3.0;
            rows.push_back(json{{"n", n},
                                {"a", thr},
                                {"prob_det", d.value},
                                {"det_error", d.error_estimate},
                                {"prob_gue", p},
                                {"stderr", se},
                                {"z", std::isfinite(z) ? json(z) : json(nullptr)}});
            csv << n << "," << fmt(thr) << "," << fmt(d.value) << "," << fmt(p) << "," << fmt(se) << "," << fmt(z) << "\n";
        }
    }
    if (c.output == "csv") {
        out << csv.str();
        return kExitOk;
    }
    json config{{"t", c.t}, {"sizes", sizes}, {"a", a}, {"samples", c.paths}, {"seed", c.seed},
                {"seed_derivation", "size n samples matrix s from mt19937_64(mix_seed(mix_seed(seed, n), s))"}};
    config.update(det_config(c));
    emit(out, c, config, json{{"rows", rows}, {"all_within_3sigma", within}});
    return kExitOk;
}

bool has_flag(const std::vector<std::string>& args, const std::string& key) {
    const std::string flag = "--" + key;
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

// key=value lines; command-line flags win
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::optional<std::string> path;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config") {
            if (k + 1 >= args.size()) throw ArgumentError("--config needs a path");
            path = args[k + 1];
            args.erase(args.begin() + static_cast<long>(k), args.begin() + static_cast<long>(k) + 2);
            break;
        }
        if (args[k].rfind("--config=", 0) == 0) {
            path = args[k].substr(9);
            args.erase(args.begin() + static_cast<long>(k));
            break;
        }
    }
    if (!path) return args;
    std::ifstream in(*path);
    if (!in) throw IoError("cannot open config file '" + *path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("config line " + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto l = s.find_first_not_of(" \t\r"), r = s.find_last_not_of(" \t\r");
            return l == std::string::npos ? std::string() : s.substr(l, r - l + 1);
        };
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw ArgumentError("config line " + std::to_string(lineno) + ": empty key");
        if (!has_flag(args, key)) {
            args.push_back("--" + key);
            args.push_back(value);
        }
    }
    return args;
}

}  // namespace

int run_command(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Reflected Brownian motions: determinants, simulation and KPZ scaling"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    auto common = [&](CLI::App* s) {
        s->add_option("--t", c.t, "time (macroscopic time for scaling)");
        s->add_option("--output", c.output, "json or csv");
        s->add_option("--threads", c.threads, "worker cap (0 = all cores)");
        s->add_option("--seed", c.seed, "random seed");
    };
    auto ic_flags = [&](CLI::App* s) {
        s->add_option("--levels", c.levels, "comma separated X0(1),X0(2),...; a leading run may be inf");
        s->add_option("--init-csv", c.init_csv, "CSV file index,position");
        s->add_option("--wedges", c.wedges, "narrow wedges a1,a2,...@eps");
        s->add_option("--length", c.length, "particle count for --wedges (default: largest index)");
    };
    auto det_flags = [&](CLI::App* s) {
        s->add_option("--quad-order", c.quad_order, "Gauss-Legendre nodes per line");
        s->add_option("--pad", c.pad, "truncation length in natural units");
        s->add_option("--target", c.target, "determinant error target");
        s->add_option("--max-refinements", c.max_refinements, "refinement rounds");
    };

    CLI::App* prob = app.add_subcommand("prob", "P(X_t(n_j) >= a_j) by the Fredholm determinant");
    common(prob);
    ic_flags(prob);
    det_flags(prob);
    prob->add_option("--indices", c.indices, "n_1,n_2,...")->required();
    prob->add_option("--a", c.a, "a_1,a_2,...")->required();
    prob->add_option("--representation", c.representation, "hitting, biorth or operator");

    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo estimate of the same probability");
    common(mc);
    ic_flags(mc);
    mc->add_option("--indices", c.indices, "n_1,n_2,...")->required();
    mc->add_option("--a", c.a, "a_1,a_2,...")->required();
    mc->add_option("--paths", c.paths, "number of paths");
    mc->add_option("--dt", c.dt, "time step");
    mc->add_option("--scheme", c.scheme, "bridge or euler");

    CLI::App* hit = app.add_subcommand("hitting", "law of the epigraph hitting time (CSV dump)");
    common(hit);
    ic_flags(hit);
    hit->add_option("--eta", c.eta, "walk start B_0");
    hit->add_option("--n", c.n_max, "horizon (default: number of particles)");
    hit->add_option("--samples", c.samples, "density samples per component");

    CLI::App* val = app.add_subcommand("validate", "randomized cross-checks");
    common(val);
    val->add_option("--suite", c.suite, "gram, representation, duality, contour, g0n or all");

    CLI::App* sc = app.add_subcommand("scaling", "RBM determinant against the KPZ fixed point along eps");
    common(sc);
    det_flags(sc);
    sc->add_option("--wedges", c.wedges, "wedge positions a1 > a2 > ... (<= 0)")->required();
    sc->add_option("--x", c.x, "evaluation points, decreasing");
    sc->add_option("--a", c.a, "thresholds for h(t, x_j) <= a_j")->required();
    sc->add_option("--eps", c.eps, "eps values");

    CLI::App* gue = app.add_subcommand("gue", "packed determinant against GUE largest eigenvalues");
    common(gue);
    det_flags(gue);
    gue->add_option("--sizes", c.sizes, "matrix sizes n");
    gue->add_option("--a", c.a, "thresholds");
    gue->add_option("--paths", c.paths, "number of matrices per size");

    try {
        std::vector<std::string> args = merge_config(raw);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitArgument;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        return kExitArgument;
    }

    try {
        check_output(c);
        if (!(c.t > 0.0)) throw ArgumentError("--t must be > 0");
        std::ostringstream buf;
        int code = kExitOk;
        if (prob->parsed()) c.command = "prob", code = cmd_prob(c, buf);
        else if (mc->parsed()) c.command = "mc", code = cmd_mc(c, buf);
        else if (hit->parsed()) c.command = "hitting", code = cmd_hitting(c, buf);
        else if (val->parsed()) c.command = "validate", code = cmd_validate(c, buf);
        else if (sc->parsed()) c.command = "scaling", code = cmd_scaling(c, buf);
        else if (gue->parsed()) c.command = "gue", code = cmd_gue(c, buf);
        out << buf.str();
        return code;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        return kExitArgument;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const OverflowError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace rbm
