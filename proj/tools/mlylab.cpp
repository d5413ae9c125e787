// mlylab: command-line front end for traces, classifications, manifold
// ledgers and weighted-shift checks.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mly/cesaro/trace.hpp"
#include "mly/classify/classify.hpp"
#include "mly/core/error.hpp"
#include "mly/manifold/manifold.hpp"
#include "mly/schedules/examples.hpp"
#include "mly/shiftlab/shiftlab.hpp"

using nlohmann::ordered_json;
using namespace mly;
namespace sch = mly::schedules;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitOverflow = 3;
constexpr int kExitExhausted = 4;

struct RunConfig {
    std::string command;
    std::string example = "factorial";
    int depth = 0;  // schedule depth, or the number of levels for manifold; 0 until resolved
    std::string schedule;
    std::string weights;
    std::vector<std::string> x;
    std::vector<std::string> y;
    std::string horizon = "0";
    std::string checkpoints = "default";
    double eps = 0.05;
    double delta = 1.0;
    double mpeak = 10.0;
    int kgrowth = 4;
    std::uint64_t seed = 0;
    std::string k = "1";
    std::string grid = "32";
    std::size_t combos = 50;
    std::string out;

    // the output path is left out so that copies written elsewhere stay identical
    ordered_json to_json() const {
        ordered_json j;
        j["command"] = command;
        if (schedule.empty()) {
            j["example"] = example;
        } else {
            j["schedule"] = schedule;
        }
        if (!weights.empty()) j["weights"] = weights;
        j["depth"] = depth;
        j["x"] = x;
        j["y"] = y;
        j["horizon"] = horizon;
        j["checkpoints"] = checkpoints;
        j["eps"] = eps;
        j["delta"] = delta;
        j["mpeak"] = mpeak;
        j["kgrowth"] = kgrowth;
        j["k"] = k;
        j["grid"] = grid;
        j["combos"] = combos;
        j["seed"] = seed;
        return j;
    }
};

int default_depth(const std::string& example) {
    if (example == "factorial") return 12;
    if (example == "cubic") return 10;
    if (example == "cubic-shift") return sch::kMaxCubicDepth;
    return 0;
}

OperatorSequenceSpec make_spec(const RunConfig& cfg, int depth) {
    if (!cfg.schedule.empty()) {
        std::ifstream in(cfg.schedule);
        if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read schedule file " + cfg.schedule);
        std::stringstream text;
        text << in.rdbuf();
        return OperatorSequenceSpec::scalar_blocks(Space::real_line(), sch::load_schedule_json(text.str()),
                                                   "custom(" + cfg.schedule + ")");
    }
    const std::string& e = cfg.example;
    if (e == "factorial") return sch::factorial_example(depth);
    if (e == "cubic") return sch::cubic_example(depth);
    if (e == "power2") return sch::power2_spike_example();
    if (e == "const2") return sch::constant_example(Rational(2));
    if (e == "shift1") return sch::constant_shift(1.0);
    if (e == "cubic-shift") return sch::cubic_weighted_shift(depth);
    if (e == "alternating") return sch::alternating_shift_scaling();
    throw Error(ErrorCode::InvalidArgument, "unknown example '" + e + "'");
}

std::vector<double> parse_numbers(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        try {
            out.push_back(std::stod(part));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "bad number '" + part + "'");
        }
    }
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty coefficient list");
    return out;
}

/// "const:c", "poly:a0,a1,..." or the weights of a shift example.
WeightSequence make_weights(const RunConfig& cfg, const OperatorSequenceSpec* spec) {
    if (cfg.weights.rfind("const:", 0) == 0) return WeightSequence::constant(parse_numbers(cfg.weights.substr(6)).at(0));
    if (cfg.weights.rfind("poly:", 0) == 0) return WeightSequence::polynomial(parse_numbers(cfg.weights.substr(5)));
    if (!cfg.weights.empty()) throw Error(ErrorCode::InvalidArgument, "weights look like const:c or poly:a0,a1,...");
    if (spec == nullptr || spec->shift_weights() == nullptr) {
        throw Error(ErrorCode::InvalidArgument, "example '" + cfg.example + "' is not a weighted shift");
    }
    return *spec->shift_weights();
}

cesaro::CheckpointRule make_rule(const std::string& text) {
    if (text == "default") return cesaro::CheckpointRule::standard();
    if (text == "all") return cesaro::CheckpointRule::all();
    if (text == "blocks") return cesaro::CheckpointRule::block_boundaries();
    if (text.rfind("geo:", 0) == 0) return cesaro::CheckpointRule::geometric(parse_numbers(text.substr(4)).at(0));
    if (text.rfind("list:", 0) == 0) {
        std::vector<Index> pts;
        std::stringstream in(text.substr(5));
        std::string part;
        while (std::getline(in, part, ',')) pts.push_back(parse_index(part));
        return cesaro::CheckpointRule::explicit_points(std::move(pts));
    }
    throw Error(ErrorCode::InvalidArgument, "checkpoints: default, all, blocks, geo:r or list:n1,n2,...");
}

classify::Thresholds make_thresholds(const RunConfig& cfg) {
    classify::Thresholds t;
    t.eps_dip = cfg.eps;
    t.delta = cfg.delta;
    t.m_peak = cfg.mpeak;
    t.k_growth = cfg.kgrowth;
    t.horizon = parse_index(cfg.horizon);
    t.validate();
    return t;
}

std::vector<Vector> parse_vectors(const Space& space, const std::vector<std::string>& literals) {
    std::vector<Vector> out;
    for (const auto& s : literals) out.push_back(Vector::parse(space, s));
    return out;
}

Vector single_vector(const Space& space, const std::vector<std::string>& literals, const char* flag) {
    if (literals.size() != 1) throw Error(ErrorCode::InvalidArgument, std::string("exactly one ") + flag + " is required");
    return Vector::parse(space, literals.front());
}

ordered_json envelope(const RunConfig& cfg, const std::string& spec_id) {
    ordered_json j;
    j["tool"] = "mlylab";
    j["version"] = MLY_VERSION;
    j["config"] = cfg.to_json();
    j["spec"] = spec_id;
    return j;
}

ordered_json vector_json(const Vector& v) {
    ordered_json out = ordered_json::array();
    for (const auto& e : v.entries()) out.push_back({mly::to_string(e.index), e.value});
    return out;
}

// -- subcommands: each returns the data text and an exit code ---------------

struct Output {
    std::string text;
    int code = 0;
};

Output cmd_trace(const RunConfig& cfg) {
    const auto spec = make_spec(cfg, cfg.depth);
    const Vector x = single_vector(spec.space(), cfg.x.empty() ? std::vector<std::string>{"1"} : cfg.x, "--x");
    classify::Thresholds t;
    t.horizon = parse_index(cfg.horizon);
    const Index horizon = t.resolve_horizon(spec);
    const auto trace = cesaro::compute_trace(spec, x, horizon, make_rule(cfg.checkpoints));
    std::ostringstream out;
    cesaro::write_csv(trace, out,
                      {"tool=mlylab", std::string("version=") + MLY_VERSION, "config=" + cfg.to_json().dump(),
                       "spec=" + spec.id(), "vector=" + x.to_string(), "resolved_horizon=" + mly::to_string(horizon),
                       std::string("exact=") + (trace.exact ? "true" : "false")});
    return {out.str(), 0};
}

Output cmd_classify(const RunConfig& cfg, const std::string& sub) {
    const auto spec = make_spec(cfg, cfg.depth);
    const auto t = make_thresholds(cfg);
    ordered_json doc = envelope(cfg, spec.id());
    doc["resolved_horizon"] = mly::to_string(t.resolve_horizon(spec));
    auto samples = [&] { return cfg.x.empty() ? classify::default_samples(spec) : parse_vectors(spec.space(), cfg.x); };
    auto finish = [&](classify::Report r) {
        r.seed = cfg.seed;
        doc["report"] = r.to_json();
    };

    if (sub == "pair") {
        finish(classify::classify_pair(spec, single_vector(spec.space(), cfg.x, "--x"),
                                       single_vector(spec.space(), cfg.y, "--y"), t));
    } else if (sub == "vector") {
        finish(classify::detect_irregular_vector(spec, single_vector(spec.space(), cfg.x, "--x"), t));
    } else if (sub == "dichotomy") {
        finish(classify::dichotomy_report(spec, samples(), t));
    } else if (sub == "criterion") {
        finish(classify::mly_criterion_check(spec, samples(), t, cfg.seed));
    } else if (sub == "acb") {
        const auto s = samples();
        const auto est = classify::estimate_acb_constant(spec, s, t.resolve_horizon(spec));
        doc["acb"] = {{"c_hat", est.c_hat}, {"sample", s.at(est.sample).to_string()}, {"n", mly::to_string(est.n)}};
    } else if (sub == "submult") {
        const auto s = samples();
        const auto r = classify::check_submultiplicative(spec, s, classify::index_grid(parse_index(cfg.grid)));
        ordered_json j;
        j["grid"] = cfg.grid;
        j["checked"] = r.checked;
        j["skipped"] = r.skipped;
        j["c_min"] = r.c_min ? ordered_json(*r.c_min) : ordered_json(nullptr);
        if (r.violation) {
            j["violation"] = {{"sample", s.at(r.violation->sample).to_string()},
                              {"i", mly::to_string(r.violation->i)},
                              {"m", mly::to_string(r.violation->m)},
                              {"lhs", r.violation->lhs}};
        } else {
            j["violation"] = nullptr;
        }
        doc["submult"] = j;
    } else if (sub == "commute") {
        const Vector x = single_vector(spec.space(), cfg.x, "--x");
        const Index horizon = t.horizon ? t.horizon : Index{10'000};
        const auto p = classify::check_almost_commuting(spec, x, parse_index(cfg.k), horizon);
        ordered_json pts = ordered_json::array();
        for (const auto& [i, v] : p.points) pts.push_back({mly::to_string(i), v});
        doc["commute"] = {{"k", cfg.k}, {"horizon", mly::to_string(horizon)}, {"tail_max", p.tail_max},
                          {"persists", p.persists}, {"tol", p.tol}, {"points", pts}};
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown classify subcommand " + sub);
    }
    return {doc.dump(2) + "\n", 0};
}

Output cmd_manifold(const RunConfig& cfg) {
    if (cfg.depth < 1) throw Error(ErrorCode::InvalidArgument, "--depth must be at least 1");
    const int schedule_depth = default_depth(cfg.example);
    const auto spec = make_spec(cfg, schedule_depth);
    const auto t = make_thresholds(cfg);
    const auto anchors = parse_vectors(spec.space(), cfg.x.empty() ? std::vector<std::string>{"e2", "e3", "e4"} : cfg.x);
    manifold::Budgets budgets;
    budgets.horizon = t.horizon;
    const auto ledger = manifold::build_irregular_manifold(spec, anchors, cfg.depth, t, budgets, cfg.seed);
    ordered_json doc = envelope(cfg, spec.id());
    doc["ledger"] = ledger.to_json();
    if (ledger.complete()) {
        doc["span"] = manifold::verify_span_irregular(spec, ledger, cfg.combos, cfg.seed).to_json();
        return {doc.dump(2) + "\n", 0};
    }
    doc["span"] = nullptr;
    return {doc.dump(2) + "\n", kExitExhausted};
}

Output cmd_shift(const RunConfig& cfg, const std::string& sub) {
    std::optional<OperatorSequenceSpec> example;
    if (cfg.weights.empty()) example = make_spec(cfg, cfg.depth);
    const WeightSequence w = make_weights(cfg, example ? &*example : nullptr);
    const auto spec = OperatorSequenceSpec::shift_powers(w, "shift(" + w.describe() + ")");
    classify::Thresholds t;
    t.horizon = parse_index(cfg.horizon);
    const Index horizon = t.resolve_horizon(spec);
    ordered_json doc = envelope(cfg, spec.id());
    doc["resolved_horizon"] = mly::to_string(horizon);

    if (sub == "lambda") {
        const auto c = shiftlab::lambda_criterion(w, horizon, cfg.mpeak);
        const auto profile = shiftlab::lambda_profile(w, horizon, make_rule(cfg.checkpoints));
        ordered_json pts = ordered_json::array();
        for (const auto& p : profile.points) pts.push_back({mly::to_string(p.n), p.S, p.L});
        doc["lambda"] = {{"M", cfg.mpeak},
                         {"max_L", c.max_L},
                         {"witness", mly::to_string(c.witness)},
                         {"verdict", shiftlab::to_string(c.verdict)},
                         {"points", pts}};
    } else if (sub == "verify") {
        const Vector x = single_vector(Space::ell_one(), cfg.x, "--x");
        const auto r = shiftlab::verify_bounded_implies_vanishing(w, x, cfg.eps, horizon);
        doc["vanishing"] = {{"x", vector_json(x)},
                            {"C", r.C},
                            {"eps", r.eps},
                            {"bound", r.bound},
                            {"n0_tail", mly::to_string(r.n0_tail)},
                            {"n1_average", mly::to_string(r.n1_average)},
                            {"checked", r.checked},
                            {"max_after", r.max_after},
                            {"holds", r.holds},
                            {"split_bound_ok", r.split_bound_ok}};
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown shift subcommand " + sub);
    }
    return {doc.dump(2) + "\n", 0};
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::Overflow:
        case ErrorCode::IndexOverflow: return kExitOverflow;
        case ErrorCode::SearchExhausted: return kExitExhausted;
        default: return kExitConfig;
    }
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

void write_log(const RunConfig& cfg, int code, const std::string& message) {
    if (cfg.out.empty()) return;
    std::ofstream log(cfg.out + ".log", std::ios::app);
    log << timestamp() << " mlylab " << MLY_VERSION << ' ' << cfg.to_json().dump() << " exit=" << code;
    if (!message.empty()) log << " message=" << message;
    log << '\n';
}

int emit(const RunConfig& cfg, const Output& result) {
    if (cfg.out.empty()) {
        std::cout << result.text;
    } else {
        std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
        if (!file) {
            std::cerr << "mlylab: cannot write " << cfg.out << '\n';
            return kExitConfig;
        }
        file << result.text;
    }
    return result.code;
}

void add_common(CLI::App* app, RunConfig& cfg) {
    app->add_option("--example", cfg.example, "factorial, cubic, power2, const2, shift1, cubic-shift, alternating")
        ->capture_default_str();
    app->add_option("--schedule", cfg.schedule, "JSON block schedule (real line), overrides --example");
    app->add_option("--x", cfg.x, "vector literal: 1.5 on the line, e5 or 2:1.5,7:-0.25 in l1 (repeatable)");
    app->add_option("--horizon", cfg.horizon, "last index n; 0 picks the spec's range")->capture_default_str();
    app->add_option("--eps", cfg.eps, "dip threshold")->capture_default_str();
    app->add_option("--delta", cfg.delta, "Li-Yorke separation")->capture_default_str();
    app->add_option("--mpeak", cfg.mpeak, "peak threshold")->capture_default_str();
    app->add_option("--kgrowth", cfg.kgrowth, "criterion growth levels")->capture_default_str();
    app->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    app->add_option("--out", cfg.out, "output file (default stdout); a .log sidecar is appended next to it");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mlylab: Cesaro averages, mean Li-Yorke classification and irregular manifolds"};
    app.set_version_flag("--version", MLY_VERSION);
    app.require_subcommand(1);
    RunConfig cfg;

    auto* trace = app.add_subcommand("trace", "CSV trace of A_n(x)");
    add_common(trace, cfg);
    trace->add_option("--depth", cfg.depth, "schedule depth (0: example default)");
    trace->add_option("--checkpoints", cfg.checkpoints, "default, all, blocks, geo:r, list:n1,n2")->capture_default_str();

    auto* classify = app.add_subcommand("classify", "JSON classification reports");
    classify->require_subcommand(1);
    const std::vector<std::string> classify_subs = {"pair", "vector", "dichotomy", "acb", "submult", "commute", "criterion"};
    for (const auto& name : classify_subs) {
        auto* sub = classify->add_subcommand(name);
        add_common(sub, cfg);
        sub->add_option("--depth", cfg.depth, "schedule depth (0: example default)");
        if (name == "pair") sub->add_option("--y", cfg.y, "second vector")->required();
        if (name == "pair" || name == "vector" || name == "commute") sub->get_option("--x")->required();
        if (name == "commute") sub->add_option("--k", cfg.k, "fixed index k")->capture_default_str();
        if (name == "submult") sub->add_option("--grid", cfg.grid, "checks all 1 <= i, m <= grid")->capture_default_str();
    }

    auto* manifold = app.add_subcommand("manifold", "irregular manifold ledger and span check");
    add_common(manifold, cfg);
    manifold->add_option("--depth", cfg.depth, "number of levels D >= 1 (default 3)");
    manifold->add_option("--combos", cfg.combos, "random span combinations")->capture_default_str();

    auto* shift = app.add_subcommand("shift", "weighted backward shift checks");
    shift->require_subcommand(1);
    for (const std::string name : {"lambda", "verify"}) {
        auto* sub = shift->add_subcommand(name);
        add_common(sub, cfg);
        sub->add_option("--weights", cfg.weights, "const:c or poly:a0,a1,... (overrides --example)");
        if (name == "lambda") sub->add_option("--checkpoints", cfg.checkpoints, "profile checkpoints");
        if (name == "verify") sub->get_option("--x")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    Output result;
    try {
        if ((trace->parsed() || classify->parsed()) && cfg.depth == 0) cfg.depth = default_depth(cfg.example);
        if (trace->parsed()) {
            cfg.command = "trace";
            result = cmd_trace(cfg);
        } else if (classify->parsed()) {
            const std::string sub = classify->get_subcommands().front()->get_name();
            cfg.command = "classify " + sub;
            result = cmd_classify(cfg, sub);
        } else if (manifold->parsed()) {
            cfg.command = "manifold";
            // level thresholds M_m = M m need small M to be reachable near the anchors
            if (manifold->count("--mpeak") == 0) cfg.mpeak = 0.5;
            if (manifold->count("--delta") == 0) cfg.delta = 0.5;
            if (manifold->count("--example") == 0) cfg.example = "cubic-shift";
            if (manifold->count("--depth") == 0) cfg.depth = 3;
            result = cmd_manifold(cfg);
        } else {
            const std::string sub = shift->get_subcommands().front()->get_name();
            cfg.command = "shift " + sub;
            if (shift->get_subcommands().front()->count("--example") == 0) cfg.example = "cubic-shift";
            if (cfg.depth == 0) cfg.depth = default_depth(cfg.example);
            result = cmd_shift(cfg, sub);
        }
    } catch (const Error& e) {
        std::cerr << "mlylab: " << e.what() << '\n';
        const int code = exit_code_for(e.code());
        write_log(cfg, code, e.what());
        return code;
    } catch (const std::exception& e) {
        std::cerr << "mlylab: " << e.what() << '\n';
        write_log(cfg, 1, e.what());
        return 1;
    }
    const int code = emit(cfg, result);
    write_log(cfg, code, code == kExitExhausted ? "search exhausted, partial ledger written" : "");
    return code;
}
