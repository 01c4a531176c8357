#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "osgilab/dsl.hpp"
#include "osgilab/explore.hpp"
#include "osgilab/invariant.hpp"
#include "osgilab/model.hpp"
#include "osgilab/protocol.hpp"
#include "osgilab/semantics.hpp"

namespace osgilab::cli {
namespace {

constexpr int kOk = 0;
constexpr int kFinding = 1;
constexpr int kUsage = 2;

struct UsageError {
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError{"cannot open " + path};
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void report(std::ostream& err, const std::string& path,
            const std::vector<Diagnostic>& diagnostics) {
    for (const auto& d : diagnostics) err << path << ": " << to_string(d) << "\n";
}

SystemDef load_model(const std::string& path, std::ostream& err) {
    auto result = parse_model(read_file(path));
    report(err, path, result.diagnostics);
    if (!result.ok()) throw UsageError{path + ": model rejected"};
    return std::move(*result.value);
}

ProtoSpec load_protocol(const std::string& path, std::ostream& err) {
    auto result = parse_protocol(read_file(path));
    report(err, path, result.diagnostics);
    if (!result.ok()) throw UsageError{path + ": protocol rejected"};
    return std::move(*result.value);
}

std::vector<Event> load_trace(const std::string& path, std::ostream& err) {
    auto result = parse_trace(read_file(path));
    report(err, path, result.diagnostics);
    if (!result.ok()) throw UsageError{path + ": trace rejected"};
    return std::move(*result.value);
}

/// Renders one witness path, replaying it so each step is described in the
/// configuration it fires from.
std::vector<std::string> render_path(const SystemDef& def,
                                     const std::vector<TransitionInstance>& path) {
    std::vector<std::string> lines;
    RuntimeConfig cfg = initial_state(def);
    for (const auto& t : path) {
        lines.push_back(describe(def, cfg, t));
        cfg = apply(def, cfg, t).config;
    }
    return lines;
}

std::string terminal_phrase(const ReachabilityReport& report) {
    std::size_t quiescent = 0, deadlocked = 0;
    for (const auto& t : report.terminals)
        (t.classification.state == RunState::Quiescent ? quiescent : deadlocked) += 1;
    std::ostringstream os;
    os << report.terminals.size() << (report.terminals.size() == 1 ? " terminal" : " terminals");
    if (report.terminals.size() == 1)
        os << " (" << (quiescent ? "quiescent" : "deadlocked") << ")";
    else if (!report.terminals.empty())
        os << " (" << quiescent << " quiescent, " << deadlocked << " deadlocked)";
    os << ", " << deadlocked << (deadlocked == 1 ? " deadlock" : " deadlocks");
    return os.str();
}

int cmd_validate(const std::string& model_path, std::ostream& out, std::ostream& err) {
    SystemDef def = load_model(model_path, err);
    out << "ok: model " << def.name << " is well formed\n";
    return kOk;
}

int cmd_explore(const std::string& model_path, const Bounds& bounds, bool as_json,
                std::ostream& out, std::ostream& err) {
    SystemDef def = load_model(model_path, err);
    ReachabilityReport rep = explore(def, bounds);
    if (as_json) {
        nlohmann::json doc;
        doc["states"] = rep.states_visited;
        doc["transitions"] = rep.transitions_taken;
        doc["truncated"] = rep.truncated;
        doc["terminals"] = nlohmann::json::array();
        for (const auto& t : rep.terminals) {
            nlohmann::json entry;
            entry["kind"] =
                t.classification.state == RunState::Quiescent ? "quiescent" : "deadlocked";
            entry["stuck"] = t.classification.stuck;
            doc["terminals"].push_back(std::move(entry));
        }
        doc["deadlocks"] = nlohmann::json::array();
        for (const auto& w : rep.deadlock_witnesses) {
            nlohmann::json entry;
            entry["length"] = w.path.size();
            entry["path"] = render_path(def, w.path);
            doc["deadlocks"].push_back(std::move(entry));
        }
        out << doc.dump(2) << "\n";
    } else {
        out << rep.states_visited << " states, " << rep.transitions_taken << " transitions\n";
        out << terminal_phrase(rep) << "\n";
        if (rep.truncated) out << "warning: exploration truncated by bounds\n";
        for (const auto& w : rep.deadlock_witnesses) {
            out << "deadlock witness (" << w.path.size() << " steps):\n";
            for (const auto& line : render_path(def, w.path)) out << "  " << line << "\n";
            out << render_config(w.config);
        }
    }
    return rep.deadlock_witnesses.empty() ? kOk : kFinding;
}

int cmd_simulate(const std::string& model_path, std::uint64_t seed, std::size_t steps,
                 std::ostream& out, std::ostream& err) {
    SystemDef def = load_model(model_path, err);
    std::vector<SimulationStep> run = simulate(def, seed, steps);
    RuntimeConfig cfg = initial_state(def);
    for (std::size_t i = 0; i < run.size(); ++i) {
        out << (i + 1) << ". " << describe(def, cfg, run[i].transition);
        if (!run[i].events.empty()) {
            out << " | events:";
            for (const auto& e : run[i].events) out << " " << to_string(e);
        }
        out << "\n";
        cfg = apply(def, cfg, run[i].transition).config;
    }
    Classification cls = classify(def, cfg);
    switch (cls.state) {
        case RunState::Running:
            out << "stopped after " << run.size() << " steps (still running)\n";
            break;
        case RunState::Quiescent:
            out << "quiescent after " << run.size() << " steps\n";
            break;
        case RunState::Deadlocked:
            out << "deadlocked after " << run.size() << " steps (stuck:";
            for (InstanceId id : cls.stuck) out << " " << id;
            out << ")\n";
            break;
    }
    return kOk;
}

int cmd_step(const std::string& model_path, std::istream& in, std::ostream& out,
             std::ostream& err) {
    SystemDef def = load_model(model_path, err);
    StepSession session(def);
    auto show = [&]() {
        out << render_config(session.current());
        auto options = session.options();
        if (options.empty()) {
            Classification cls = session.classification();
            out << (cls.state == RunState::Quiescent ? "quiescent" : "deadlocked")
                << ", no transitions enabled\n";
            return;
        }
        for (std::size_t i = 0; i < options.size(); ++i)
            out << "  [" << i << "] " << describe(def, session.current(), options[i]) << "\n";
    };
    out << "commands: NUMBER apply, u undo, l list, q quit\n";
    show();
    std::string word;
    while (out << "> " << std::flush, in >> word) {
        if (word == "q" || word == "quit") break;
        if (word == "u" || word == "undo") {
            if (!session.undo()) out << "already at the initial configuration\n";
            show();
            continue;
        }
        if (word == "l" || word == "list") {
            show();
            continue;
        }
        try {
            std::size_t index = std::stoul(word);
            if (!session.apply_option(index)) {
                out << "no option " << index << "\n";
                continue;
            }
            show();
        } catch (const std::exception&) {
            out << "unknown command '" << word << "'\n";
        }
    }
    out << "\n";
    return kOk;
}

int cmd_monitor(const std::string& spec_path, const std::string& trace_path, std::ostream& out,
                std::ostream& err) {
    ProtoSpec spec = load_protocol(spec_path, err);
    std::vector<Event> trace = load_trace(trace_path, err);
    if (spec.variable)
        throw UsageError{spec_path + ": parameterized protocol; instantiate it first"};
    MonitorResult mr = monitor(spec, trace);
    out << "initially accepting: " << (mr.initially_accepting ? "yes" : "no") << "\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const char* verdict = mr.verdicts[i] == Verdict::Ok          ? "ok"
                              : mr.verdicts[i] == Verdict::Accepting ? "accepting"
                                                                     : "VIOLATION";
        out << "  " << (i + 1) << ". " << to_string(trace[i]) << " -> " << verdict << "\n";
    }
    if (mr.violated()) {
        out << "violation: trace leaves the protocol\n";
        return kFinding;
    }
    out << (mr.final_accepting() ? "final: accepting\n" : "final: incomplete (not accepting)\n");
    return kOk;
}

int cmd_instantiate(const std::string& spec_path, const std::vector<Name>& values,
                    const std::string& style, std::ostream& out, std::ostream& err) {
    ProtoSpec spec = load_protocol(spec_path, err);
    InstantiationStyle st;
    if (style == "replicate")
        st = InstantiationStyle::Replicate;
    else if (style == "collapse")
        st = InstantiationStyle::Collapse;
    else
        throw UsageError{"--style must be replicate or collapse"};
    try {
        out << print_protocol(instantiate(spec, values, st));
    } catch (const std::invalid_argument& e) {
        throw UsageError{e.what()};
    }
    return kOk;
}

int cmd_include(const std::string& a_path, const std::string& b_path, std::ostream& out,
                std::ostream& err) {
    ProtoSpec a = load_protocol(a_path, err);
    ProtoSpec b = load_protocol(b_path, err);
    InclusionResult r;
    try {
        r = included(a, b);
    } catch (const std::invalid_argument& e) {
        throw UsageError{e.what()};
    }
    if (r.included) {
        out << "included: every trace of " << a.name << " is allowed by " << b.name << "\n";
        return kOk;
    }
    out << "not included; shortest counterexample:\n";
    for (const auto& e : r.counterexample) out << "  " << to_string(e) << "\n";
    return kFinding;
}

int cmd_deadlock(const std::vector<std::string>& client_paths,
                 const std::vector<std::string>& resource_args,
                 const std::vector<std::string>& bind_args, std::ostream& out,
                 std::ostream& err) {
    std::vector<std::pair<Name, ProtoAutomaton>> clients;
    std::vector<std::pair<Name, ResourceDecl>> resources;
    Binding binding;
    try {
        for (const auto& path : client_paths) {
            ProtoSpec spec = load_protocol(path, err);
            clients.emplace_back(spec.name, compile(spec));
        }
        for (const auto& arg : resource_args) {
            auto eq = arg.find('=');
            if (eq == std::string::npos)
                throw UsageError{"--resource expects NAME=SPECFILE, got " + arg};
            ProtoSpec spec = load_protocol(arg.substr(eq + 1), err);
            resources.emplace_back(arg.substr(0, eq), make_resource(spec));
        }
        for (const auto& arg : bind_args) {
            auto eq = arg.find('=');
            auto colon = arg.find(':', eq == std::string::npos ? 0 : eq);
            if (eq == std::string::npos || colon == std::string::npos)
                throw UsageError{"--bind expects OUTLABEL=RESOURCE:INCLABEL, got " + arg};
            binding[arg.substr(0, eq)] =
                BindingEntry{arg.substr(eq + 1, colon - eq - 1), arg.substr(colon + 1),
                             std::nullopt};
        }
        ComposeResult r = compose_deadlock(clients, resources, binding);
        if (!r.deadlock) {
            out << "no deadlock (" << r.product_states << " product states)\n";
            return kOk;
        }
        out << "deadlock after " << r.witness.size() << " steps (" << r.product_states
            << " product states)\nwitness:\n";
        for (std::size_t i = 0; i < r.witness.size(); ++i) {
            const auto& s = r.witness[i];
            out << "  " << (i + 1) << ". " << s.client << ": " << to_string(s.client_event)
                << " -> " << s.resource << " " << to_string(s.resource_event) << "\n";
        }
        out << "blocked state:\n" << r.blocked_description;
        return kFinding;
    } catch (const std::invalid_argument& e) {
        throw UsageError{e.what()};
    }
}

int cmd_invariant(const std::string& model_path, const std::string& formula_text,
                  bool preservation, std::ostream& out, std::ostream& err) {
    SystemDef def = load_model(model_path, err);
    auto parsed = parse_invariant(formula_text);
    report(err, "formula", parsed.diagnostics);
    if (!parsed.ok()) throw UsageError{"formula rejected"};
    auto vdiags = validate_formula(*parsed.value, def);
    report(err, "formula", vdiags);
    if (has_errors(vdiags)) throw UsageError{"formula does not match the model"};
    const Formula& f = *parsed.value;
    Bounds bounds = Bounds::defaults();

    if (preservation) {
        PreservationCheck chk = check_structural_preservation(def, f, bounds);
        if (chk.status == CheckStatus::Holds) {
            out << "preserved across " << chk.transitions_checked << " structural transitions\n";
            return kOk;
        }
        if (chk.status == CheckStatus::Inconclusive) {
            out << "inconclusive: exploration truncated by bounds\n";
            return kFinding;
        }
        out << "broken: " << chk.breaks.size() << " structural transition(s) lose the formula\n";
        for (const auto& brk : chk.breaks) {
            out << "  after: " << describe(def, brk.before, brk.via) << "\n";
            out << render_config(brk.before);
        }
        return kFinding;
    }

    ReachabilityCheck chk = check_reachable(def, f, bounds);
    if (chk.status == CheckStatus::Holds) {
        out << "holds over " << chk.states_checked << " reachable states\n";
        return kOk;
    }
    if (chk.status == CheckStatus::Inconclusive) {
        out << "inconclusive: exploration truncated by bounds\n";
        return kFinding;
    }
    out << "violated after " << chk.counterexample.size() << " steps:\n";
    for (const auto& line : render_path(def, chk.counterexample)) out << "  " << line << "\n";
    out << render_config(chk.violating);
    return kFinding;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
    CLI::App app{"workbench for component-system models: explore their semantics, "
                 "monitor protocols, and check invariants"};
    app.require_subcommand(1);

    std::string model_path, spec_path, trace_path, a_path, b_path, formula_text;
    std::string style = "replicate";
    std::vector<std::string> client_paths, resource_args, bind_args, values;
    std::uint64_t seed = 0;
    std::size_t steps = 100;
    std::optional<std::size_t> max_depth, max_states;
    bool as_json = false, preservation = false;

    auto* validate_cmd = app.add_subcommand("validate", "check a model file");
    validate_cmd->add_option("model", model_path, "model file")->required();

    auto* explore_cmd = app.add_subcommand("explore", "enumerate all reachable configurations");
    explore_cmd->add_option("model", model_path, "model file")->required();
    explore_cmd->add_option("--max-depth", max_depth, "depth bound");
    explore_cmd->add_option("--max-states", max_states, "state bound");
    explore_cmd->add_flag("--json", as_json, "machine-readable report");

    auto* simulate_cmd = app.add_subcommand("simulate", "run one random execution");
    simulate_cmd->add_option("model", model_path, "model file")->required();
    simulate_cmd->add_option("--seed", seed, "random seed")->required();
    simulate_cmd->add_option("--steps", steps, "maximum steps");

    auto* step_cmd = app.add_subcommand("step", "interactively drive one execution");
    step_cmd->add_option("model", model_path, "model file")->required();

    auto* monitor_cmd = app.add_subcommand("monitor", "replay a trace against a protocol");
    monitor_cmd->add_option("spec", spec_path, "protocol file")->required();
    monitor_cmd->add_option("trace", trace_path, "trace file")->required();

    auto* protocol_cmd = app.add_subcommand("protocol", "protocol-level analyses");
    protocol_cmd->require_subcommand(1);
    auto* inst_cmd = protocol_cmd->add_subcommand("instantiate", "substitute parameter values");
    inst_cmd->add_option("spec", spec_path, "protocol file")->required();
    inst_cmd->add_option("--values", values, "comma-separated values")
        ->required()
        ->delimiter(',');
    inst_cmd->add_option("--style", style, "replicate|collapse")->required();
    auto* include_cmd = protocol_cmd->add_subcommand("include", "language inclusion A <= B");
    include_cmd->add_option("a", a_path, "protocol file A")->required();
    include_cmd->add_option("b", b_path, "protocol file B")->required();
    auto* deadlock_cmd =
        protocol_cmd->add_subcommand("deadlock", "compose clients with resources");
    deadlock_cmd->add_option("--client", client_paths, "client protocol file")->required();
    deadlock_cmd->add_option("--resource", resource_args, "NAME=SPECFILE")->required();
    deadlock_cmd->add_option("--bind", bind_args, "OUTLABEL=RESOURCE:INCLABEL");

    auto* invariant_cmd = app.add_subcommand("invariant", "invariant checks");
    invariant_cmd->require_subcommand(1);
    auto* check_cmd = invariant_cmd->add_subcommand("check", "check over reachable states");
    check_cmd->add_option("model", model_path, "model file")->required();
    check_cmd->add_option("formula", formula_text, "invariant formula text")->required();
    check_cmd->add_flag("--preservation", preservation,
                        "check preservation across structural steps instead");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        Bounds bounds = Bounds::defaults();
        if (max_depth) bounds.max_depth = *max_depth;
        if (max_states) bounds.max_states = *max_states;
        if (validate_cmd->parsed()) return cmd_validate(model_path, out, err);
        if (explore_cmd->parsed()) return cmd_explore(model_path, bounds, as_json, out, err);
        if (simulate_cmd->parsed()) return cmd_simulate(model_path, seed, steps, out, err);
        if (step_cmd->parsed()) return cmd_step(model_path, in, out, err);
        if (monitor_cmd->parsed()) return cmd_monitor(spec_path, trace_path, out, err);
        if (inst_cmd->parsed()) return cmd_instantiate(spec_path, values, style, out, err);
        if (include_cmd->parsed()) return cmd_include(a_path, b_path, out, err);
        if (deadlock_cmd->parsed())
            return cmd_deadlock(client_paths, resource_args, bind_args, out, err);
        if (check_cmd->parsed())
            return cmd_invariant(model_path, formula_text, preservation, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.message << "\n";
        return kUsage;
    }
    err << "error: no subcommand selected\n";
    return kUsage;
}

}  // namespace osgilab::cli
