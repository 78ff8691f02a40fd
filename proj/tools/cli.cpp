// Copyright 2026 The gilbert-hsd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hsd/analysis.hpp"
#include "hsd/gilbert.hpp"
#include "hsd/io.hpp"
#include "hsd/states.hpp"
#include "hsd/symmetry.hpp"

namespace hsd::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Bad flags, unknown names, malformed grammar: exit code 2.
class UsageError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kDefaultStall = 1000000;
constexpr double kSymmetryTolerance = 1e-10;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, sep)) parts.push_back(item);
    return parts;
}

template <typename T>
T parse_number(const std::string& text, const char* what) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw UsageError(std::string("malformed ") + what + " '" + text + "'");
    }
    return value;
}

Dims parse_dims(const std::string& text) {
    Dims dims;
    for (const auto& part : split(text, ',')) dims.push_back(parse_number<int>(part, "dimension"));
    if (dims.empty()) throw UsageError("--dims needs at least one dimension");
    return dims;
}

bool looks_like_path(const std::string& spec) {
    return spec.find('/') != std::string::npos || spec.ends_with(".json") || fs::exists(spec);
}

// Named state, or a state file when the argument looks like a path.
DensityMatrix load_state(const std::string& spec) {
    if (looks_like_path(spec)) return to_density(read_state_file(spec));
    if (!is_named_state(spec)) throw UsageError("unknown state name '" + spec + "'");
    try {
        return named_state(spec);
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
}

SymmetryGenerator parse_generator(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError("symmetry '" + text + "' lacks a kind prefix");
    const std::string kind = text.substr(0, colon);
    const auto items = split(text.substr(colon + 1), ',');
    if (items.empty()) throw UsageError("symmetry '" + text + "' has no arguments");
    if (kind == "perm") {
        PartyPermutation perm;
        for (const auto& item : items) perm.order.push_back(parse_number<std::size_t>(item, "party index"));
        return perm;
    }
    if (kind == "local") {
        LocalUnitary local;
        for (const auto& path : items) {
            const StateFile file = read_state_file(path);
            if (file.dims.size() != 1) {
                throw ValidationError("local unitary file " + path + " must describe one party");
            }
            local.factors.push_back(file.matrix);
        }
        return local;
    }
    throw UsageError("unknown symmetry kind '" + kind + "'");
}

json halt_to_json(const HaltCriteria& halt) {
    json out = json::object();
    if (halt.max_successes) out["max_successes"] = *halt.max_successes;
    if (halt.max_trials) out["max_trials"] = *halt.max_trials;
    if (halt.target_d2) out["target_d2"] = *halt.target_d2;
    if (halt.stall_trials) out["stall_trials"] = *halt.stall_trials;
    return out;
}

void emit(const json& doc, const std::string& path, std::ostream& out) {
    const std::string text = doc.dump() + "\n";
    if (!path.empty()) write_text_file(path, text);
    out << text;
}

struct RunArgs {
    std::string state;
    std::string dims;
    std::uint64_t halt_cs = 0;
    std::uint64_t halt_ct = 0;
    double halt_d2 = 0.0;
    std::uint64_t stall = 0;
    std::uint64_t seed = 0;
    std::string init = "maxmix";
    std::vector<std::string> sym;
    bool real_only = false;
    bool box_muller = false;
    std::string trace;
    std::string meta;
    std::string out_rho1;
    unsigned threads = 1;
};

int cmd_run(const RunArgs& args, const CLI::App& cmd, std::ostream& out) {
    const DensityMatrix rho0 = load_state(args.state);
    if (!args.dims.empty() && parse_dims(args.dims) != rho0.dims()) {
        throw DimensionError("--dims does not match the dimensions of the state");
    }

    std::optional<DensityMatrix> init;
    if (args.init != "maxmix") init = load_state(args.init);

    std::optional<SymmetryGroup> group;
    if (!args.sym.empty()) {
        std::vector<SymmetryGenerator> gens;
        for (const auto& s : args.sym) gens.push_back(parse_generator(s));
        group = closure(gens, rho0.dims());
        if (invariance_check(rho0, *group) > kSymmetryTolerance) {
            throw ValidationError("--sym generators are not symmetries of the state");
        }
    }

    HaltCriteria halt;
    if (cmd.count("--halt-cs")) halt.max_successes = args.halt_cs;
    if (cmd.count("--halt-ct")) halt.max_trials = args.halt_ct;
    if (cmd.count("--halt-d2")) halt.target_d2 = args.halt_d2;
    if (cmd.count("--stall")) halt.stall_trials = args.stall;
    if (!halt.max_successes && !halt.max_trials && !halt.target_d2 && !halt.stall_trials) {
        halt.stall_trials = kDefaultStall;
    }

    SamplerConfig sampler;
    sampler.seed = args.seed;
    sampler.mode = args.real_only ? SamplingMode::real : SamplingMode::complex;
    sampler.source = args.box_muller ? GaussianSource::box_muller : GaussianSource::gaussian;

    RunOptions options;
    options.threads = args.threads;
    const std::size_t group_order = group ? group->order() : 1;
    const RunResult result = run(rho0, std::move(init), std::move(group), halt, sampler, options);

    if (!args.trace.empty()) write_trace_csv(fs::path(args.trace), result.trace);
    if (!args.out_rho1.empty()) {
        StateFile file = make_state_file(result.state.rho1(), "rho1");
        file.metadata = {{"target", args.state}, {"c_s", result.state.successes()},
                         {"c_t", result.state.trials()}, {"d2", result.state.d2()}};
        write_state_file(args.out_rho1, file);
    }

    json meta;
    meta["state"] = args.state;
    meta["dims"] = rho0.dims();
    meta["seed"] = args.seed;
    meta["halt"] = halt_to_json(halt);
    meta["final_d2"] = result.state.d2();
    meta["c_t"] = result.state.trials();
    meta["c_s"] = result.state.successes();
    meta["wall_seconds"] = result.wall_seconds;
    meta["mode"] = args.real_only ? "real" : "complex";
    meta["threads"] = args.threads;
    meta["symmetry_order"] = group_order;
    emit(meta, args.meta, out);
    return kOk;
}

struct FitArgs {
    std::string trace;
    std::size_t stride = kDefaultStride;
    std::string out;
};

int cmd_fit(const FitArgs& args, std::ostream& out) {
    const Trace trace = read_trace_csv(fs::path(args.trace));
    const ExtrapolationFit fit = fit_extrapolation(trace, args.stride);
    const PowerFit power = fit_power(trace);
    json report;
    report["a"] = fit.a;
    report["b"] = fit.b;
    report["r"] = fit.r;
    report["stride"] = fit.stride;
    report["points"] = fit.points;
    report["f"] = power.f;
    report["r2"] = power.r2;
    emit(report, args.out, out);
    return kOk;
}

struct WitnessArgs {
    std::string rho0;
    std::string rho1;
    int restarts = kDefaultRestarts;
    std::uint64_t seed = 0;
    std::string out;
    std::string op;
};

int cmd_witness(const WitnessArgs& args, std::ostream& out) {
    const DensityMatrix rho0 = load_state(args.rho0);
    const DensityMatrix rho1 = load_state(args.rho1);
    if (rho0.dims() != rho1.dims()) throw DimensionError("rho0 and rho1 dimensions differ");
    StateSampler sampler(SamplerConfig{SamplingMode::complex, args.seed, GaussianSource::gaussian});
    const Witness w = build_witness(rho0, rho1, args.restarts, sampler);
    if (!args.op.empty()) write_state_file(args.op, make_operator_file(w.op, w.dims, "witness"));
    json report;
    report["lambda"] = w.lambda;
    report["value_rho0"] = w.value_rho0;
    report["entangled"] = w.entangled();
    report["margin"] = w.margin();
    emit(report, args.out, out);
    return kOk;
}

struct StateArgs {
    std::string name;
    std::string out;
};

int cmd_state(const StateArgs& args, std::ostream& out) {
    if (!is_named_state(args.name)) throw UsageError("unknown state name '" + args.name + "'");
    DensityMatrix rho = [&] {
        try {
            return named_state(args.name);
        } catch (const ParameterError& e) {
            throw UsageError(e.what());
        }
    }();
    const std::string text = dump_state_file(make_state_file(rho, args.name));
    if (args.out.empty()) {
        out << text;
    } else {
        write_text_file(args.out, text);
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hilbert-Schmidt distance to the separable set via the simplified Gilbert algorithm",
                 "hsd"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Iterate the Gilbert algorithm on a target state");
    run_cmd->add_option("--state", run_args.state, "Named state or state file")->required();
    run_cmd->add_option("--dims", run_args.dims, "Expected subsystem dimensions, e.g. 2,2");
    run_cmd->add_option("--halt-cs", run_args.halt_cs, "Stop after this many corrections");
    run_cmd->add_option("--halt-ct", run_args.halt_ct, "Stop after this many trials");
    run_cmd->add_option("--halt-d2", run_args.halt_d2, "Stop once d2 falls to this value");
    run_cmd->add_option("--stall", run_args.stall, "Stop after this many trials without a correction");
    run_cmd->add_option("--seed", run_args.seed, "Random seed");
    run_cmd->add_option("--init", run_args.init, "Initial separable state: maxmix, named state or file");
    run_cmd->add_option("--sym", run_args.sym, "Symmetry generator perm:i,j,... or local:f1,f2,...");
    run_cmd->add_flag("--real-only", run_args.real_only, "Draw real trial states only");
    run_cmd->add_flag("--box-muller", run_args.box_muller, "Build normal deviates from uniform pairs");
    run_cmd->add_option("--trace", run_args.trace, "Trace CSV output path");
    run_cmd->add_option("--meta", run_args.meta, "Run metadata JSON output path");
    run_cmd->add_option("--out-rho1", run_args.out_rho1, "Write the final iterate as a state file");
    run_cmd->add_option("--threads", run_args.threads, "Speculative trial workers (1 = reproducible)")
        ->check(CLI::Range(1u, 1024u));

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Extrapolate the distance limit from a trace");
    fit_cmd->add_option("--trace", fit_args.trace, "Trace CSV")->required();
    fit_cmd->add_option("--stride", fit_args.stride, "Use records with c_s divisible by this")
        ->check(CLI::PositiveNumber);
    fit_cmd->add_option("--out", fit_args.out, "Report JSON output path");

    WitnessArgs witness_args;
    auto* witness_cmd = app.add_subcommand("witness", "Build an entanglement witness from rho0 and rho1");
    witness_cmd->add_option("--rho0", witness_args.rho0, "Target: named state or file")->required();
    witness_cmd->add_option("--rho1", witness_args.rho1, "Separable approximation: named state or file")
        ->required();
    witness_cmd->add_option("--restarts", witness_args.restarts, "Random restarts of the ascent")
        ->check(CLI::PositiveNumber);
    witness_cmd->add_option("--seed", witness_args.seed, "Random seed");
    witness_cmd->add_option("--out", witness_args.out, "Report JSON output path");
    witness_cmd->add_option("--operator", witness_args.op, "Write W as an operator state file");

    StateArgs state_args;
    auto* state_cmd = app.add_subcommand("state", "Write a named reference state");
    state_cmd->add_option("name", state_args.name, "State name")->required();
    state_cmd->add_option("--out", state_args.out, "Output path (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*run_cmd) return cmd_run(run_args, *run_cmd, out);
        if (*fit_cmd) return cmd_fit(fit_args, out);
        if (*witness_cmd) return cmd_witness(witness_args, out);
        if (*state_cmd) return cmd_state(state_args, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUnexpected;
    }
    return kUsage;
}

}  // namespace hsd::cli
