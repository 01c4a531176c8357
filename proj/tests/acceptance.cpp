// Acceptance gate: one line per criterion, PASS/FAIL; exit code is the
// number of failures. Each criterion cross-checks the library against an
// independent oracle or a frozen expected outcome on the shipped examples.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "osgilab/dsl.hpp"
#include "osgilab/explore.hpp"
#include "osgilab/invariant.hpp"
#include "osgilab/model.hpp"
#include "osgilab/protocol.hpp"
#include "osgilab/semantics.hpp"
#include "support/config_gen.hpp"
#include "support/fixtures.hpp"
#include "support/naive_explore.hpp"
#include "support/product_oracle.hpp"
#include "support/regex_oracle.hpp"

using namespace osgilab;
using testsupport::DerivativeMatcher;
using testsupport::fixture_path;
using testsupport::load_model;
using testsupport::load_protocol;

namespace {

int failures = 0;

void criterion(int number, const std::string& what, const std::function<bool()>& check) {
    bool ok = false;
    std::string note;
    try {
        ok = check();
    } catch (const std::exception& e) {
        note = std::string(" (exception: ") + e.what() + ")";
    }
    std::cout << (ok ? "PASS" : "FAIL") << " " << number << ": " << what << note << "\n";
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_cli(const std::vector<std::string>& args) {
    std::istringstream in;
    std::ostringstream out, err;
    return cli::run(args, in, out, err);
}

Binding file_binding() {
    Binding b;
    for (const char* label : {"Lock", "Read", "Write", "Unlock"}) {
        b[std::string(label) + "F1"] = BindingEntry{"F1", label, std::nullopt};
        b[std::string(label) + "F2"] = BindingEntry{"F2", label, std::nullopt};
    }
    return b;
}

std::vector<Event> random_trace(std::mt19937_64& rng, const std::vector<Event>& pool) {
    std::vector<Event> t;
    std::size_t len = rng() % 9;
    for (std::size_t i = 0; i < len; ++i) t.push_back(pool[rng() % pool.size()]);
    return t;
}

// --- criteria ---------------------------------------------------------------

bool startup_exploration() {
    auto t0 = std::chrono::steady_clock::now();
    SystemDef def = load_model("startup.osgi");
    ReachabilityReport rep = explore(def, Bounds::unbounded());
    bool ok = !rep.truncated;
    ok = ok && rep.terminals.size() == 1;
    if (ok) {
        const Terminal& t = rep.terminals[0];
        ok = ok && t.classification.state == RunState::Quiescent;
        ok = ok && t.config.statuses.empty();
        ok = ok && !t.config.object_present("servicebundle", "service1");
    }
    testsupport::NaiveReachable naive = testsupport::naive_reachable(def);
    ok = ok && rep.states_visited == naive.representatives.size();
    ok = ok && rep.transitions_taken == naive.transitions;
    ok = ok && run_cli({"explore", fixture_path("startup.osgi")}) == 0;
    return ok && seconds_since(t0) < 1.0;
}

bool lock_order_deadlock() {
    auto t0 = std::chrono::steady_clock::now();
    Binding binding = file_binding();
    ResourceDecl file_res = make_resource(load_protocol("file_resource.proto"));
    std::vector<std::pair<Name, ResourceDecl>> resources = {{"F1", file_res}, {"F2", file_res}};
    ProtoAutomaton a1 = compile(load_protocol("action1.proto"));
    ProtoAutomaton a2 = compile(load_protocol("action2.proto"));
    ProtoAutomaton a2c = compile(load_protocol("action2_consistent.proto"));

    std::vector<std::pair<Name, ProtoAutomaton>> opposed = {{"action1", a1}, {"action2", a2}};
    ComposeResult hazard = compose_deadlock(opposed, resources, binding);
    testsupport::ProductOracleResult hazard_oracle =
        testsupport::product_oracle(opposed, resources, binding);
    bool ok = hazard.deadlock && hazard_oracle.deadlock;
    ok = ok && hazard.product_states == hazard_oracle.states;
    ok = ok && hazard.product_states <= 100;
    // in the witness state each client holds exactly the lock the other needs
    ok = ok && hazard.blocked_description.find("F1 held by action1") != std::string::npos;
    ok = ok && hazard.blocked_description.find("F2 held by action2") != std::string::npos;

    std::vector<std::pair<Name, ProtoAutomaton>> aligned = {{"action1", a1}, {"action2", a2c}};
    ComposeResult clean = compose_deadlock(aligned, resources, binding);
    testsupport::ProductOracleResult clean_oracle =
        testsupport::product_oracle(aligned, resources, binding);
    ok = ok && !clean.deadlock && !clean_oracle.deadlock;
    ok = ok && clean.product_states == clean_oracle.states;

    std::vector<std::string> cmd = {"protocol", "deadlock",
                                    "--client", fixture_path("action1.proto"),
                                    "--resource", "F1=" + fixture_path("file_resource.proto"),
                                    "--resource", "F2=" + fixture_path("file_resource.proto")};
    for (const auto& [label, entry] : binding)
        cmd.insert(cmd.end(), {"--bind", label + "=" + entry.resource + ":" + entry.inc_label});
    std::vector<std::string> opposed_cmd = cmd, aligned_cmd = cmd;
    opposed_cmd.insert(opposed_cmd.end(), {"--client", fixture_path("action2.proto")});
    aligned_cmd.insert(aligned_cmd.end(),
                       {"--client", fixture_path("action2_consistent.proto")});
    ok = ok && run_cli(opposed_cmd) == 1;
    ok = ok && run_cli(aligned_cmd) == 0;
    return ok && seconds_since(t0) < 1.0;
}

bool monitor_verdicts() {
    ProtoSpec file = load_protocol("file.proto");
    DerivativeMatcher file_oracle(file.expression());

    // hand-constructed traces; the monitor's final verdict must match the
    // derivative matcher on all of them
    const std::vector<std::vector<Event>> hand = {
        {},
        {inc("Lock")},
        {inc("Lock"), inc("Unlock")},
        {inc("Lock"), inc("Read"), inc("Unlock")},
        {inc("Lock"), inc("Write"), inc("Write"), inc("Unlock")},
        {inc("Lock"), inc("Read"), inc("Write"), inc("Unlock"), inc("Lock"), inc("Unlock")},
        {inc("Read")},
        {inc("Read"), inc("Lock")},
        {inc("Unlock")},
        {inc("Lock"), inc("Lock")},
        {inc("Lock"), inc("Read"), inc("Write")},
        {out("Lock"), inc("Unlock")},
    };
    bool ok = hand.size() >= 10;
    for (const auto& t : hand)
        ok = ok && monitor(file, t).final_accepting() == file_oracle.matches(t);

    // the two distinguished runs behave as documented
    MonitorResult session = monitor(
        file, {inc("Lock"), inc("Read"), inc("Write"), inc("Unlock"), inc("Lock"),
               inc("Unlock")});
    ok = ok && !session.violated() && session.final_accepting();
    MonitorResult read_first = monitor(file, {inc("Read"), inc("Lock")});
    ok = ok && read_first.violated() && read_first.verdicts[0] == Verdict::Violation;

    // deterministic membership agrees with the matcher on random traces
    for (const char* name : {"file.proto", "action1.proto", "action2.proto",
                             "action2_consistent.proto", "client_bad_inc.proto"}) {
        ProtoSpec spec = load_protocol(name);
        DerivativeMatcher oracle(spec.expression());
        DfaRunner runner(compile(spec));
        std::vector<Event> pool = alphabet(spec.expression());
        pool.push_back(Event{spec.direction, "Foreign", std::nullopt});
        Event flipped = pool[0];
        flipped.dir = flipped.dir == Direction::Inc ? Direction::Out : Direction::Inc;
        pool.push_back(flipped);
        std::mt19937_64 rng(2024);
        for (int i = 0; i < 1000; ++i) {
            std::vector<Event> t = random_trace(rng, pool);
            if (runner.accepts(t) != oracle.matches(t)) return false;
        }
    }
    return ok;
}

bool client_compatibility() {
    Binding binding = file_binding();
    ProtoAutomaton client = compile(load_protocol("action1.proto"));
    ProtoAutomaton file = compile(load_protocol("file.proto"));
    bool ok = true;
    for (const char* resource : {"F1", "F2"})
        ok = ok && included(project_automaton(client, binding, resource), file).included;

    ProtoSpec bad = load_protocol("client_bad_inc.proto");
    ProtoSpec file_spec = load_protocol("file.proto");
    InclusionResult r = included(bad, file_spec);
    ok = ok && !r.included;
    // the counterexample is real (in the faulty language, outside the good
    // one) and minimal: the only shorter trace is empty and not a witness
    DerivativeMatcher bad_oracle(bad.expression());
    DerivativeMatcher file_oracle(file_spec.expression());
    ok = ok && bad_oracle.matches(r.counterexample);
    ok = ok && !file_oracle.matches(r.counterexample);
    ok = ok && r.counterexample.size() == 1;
    ok = ok && !bad_oracle.matches({});
    return ok;
}

bool instantiation_styles() {
    ProtoSpec param = load_protocol("file_param.proto");
    ProtoSpec replicated = instantiate(param, {"f_0", "f_1"}, InstantiationStyle::Replicate);
    ProtoSpec collapsed = instantiate(param, {"f_0", "f_1"}, InstantiationStyle::Collapse);
    bool ok = included(replicated, collapsed).included;

    std::vector<Event> crossed = {Event{param.direction, "Lock", "f_0"},
                                  Event{param.direction, "Unlock", "f_1"}};
    ok = ok && monitor(collapsed, crossed).final_accepting();
    ok = ok && !monitor(replicated, crossed).final_accepting();
    return ok;
}

bool canonical_forms() {
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 1000; ++i) {
        RuntimeConfig cfg = testsupport::random_config(rng);
        RuntimeConfig canon = canonicalize(cfg);
        if (canonicalize(testsupport::permute_ids(cfg, rng)) != canon) return false;
        if (canonicalize(canon) != canon) return false;
    }
    return true;
}

bool invariant_layer() {
    SystemDef startup = load_model("startup.osgi");
    Formula service_lifecycle = Formula::implication(
        Formula::method_active("initialize", "service1", "servicebundle"),
        Formula::object_present("service1", "servicebundle"));
    bool ok = check_reachable(startup, service_lifecycle, Bounds::unbounded()).status ==
              CheckStatus::Holds;

    SystemDef churn = load_model("env_remove.osgi");
    PreservationCheck chk = check_structural_preservation(
        churn, Formula::bundle_present("auxbundle"), Bounds::unbounded());
    ok = ok && chk.status == CheckStatus::Violated;
    ok = ok && !chk.breaks.empty();
    for (const auto& brk : chk.breaks)
        ok = ok &&
             brk.via == TransitionInstance::environment(Action::remove_bundle("auxbundle"));
    return ok;
}

bool removal_deadlock() {
    SystemDef def = load_model("remove_hazard.osgi");
    ReachabilityReport rep = explore(def, Bounds::unbounded());
    bool ok = false;
    for (const auto& t : rep.terminals)
        if (t.classification.state == RunState::Deadlocked) ok = true;
    ok = ok && !rep.deadlock_witnesses.empty();
    if (!ok) return false;

    const DeadlockWitness& w = rep.deadlock_witnesses[0];
    RuntimeConfig cfg = initial_state(def);
    for (const auto& step : w.path) cfg = apply(def, cfg, step).config;  // throws if not enabled
    ok = ok && classify(def, cfg).state == RunState::Deadlocked;
    ok = ok && canonicalize(cfg) == w.config;
    return ok;
}

}  // namespace

int main() {
    criterion(1, "startup model explores to one quiescent terminal, matching brute force",
              startup_exploration);
    criterion(2, "opposite lock orders deadlock, aligned orders do not, matching the oracle",
              lock_order_deadlock);
    criterion(3, "monitor and membership agree with an independent derivative matcher",
              monitor_verdicts);
    criterion(4, "projected client fits the file protocol; faulty client yields a minimal "
                 "counterexample",
              client_compatibility);
    criterion(5, "per-value instantiation is stricter than the collapsed form",
              instantiation_styles);
    criterion(6, "canonical forms are id-permutation invariant and idempotent",
              canonical_forms);
    criterion(7, "invariant holds over reachable states; preservation flags bundle removal",
              invariant_layer);
    criterion(8, "awaiting a method of a removed bundle deadlocks with a replayable witness",
              removal_deadlock);
    return failures;
}
