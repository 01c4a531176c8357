#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "osgilab/event.hpp"
#include "osgilab/model.hpp"

namespace osgilab {

/// Event regular expression: epsilon, single event, concatenation,
/// alternation, iteration.
struct ProtoExpr {
    enum class Kind { Epsilon, Atom, Concat, Alt, Star };

    Kind kind = Kind::Epsilon;
    Event event;                      // Atom
    std::vector<ProtoExpr> children;  // Concat/Alt: 2, Star: 1

    static ProtoExpr epsilon() { return {}; }
    static ProtoExpr atom(Event e) {
        ProtoExpr x;
        x.kind = Kind::Atom;
        x.event = std::move(e);
        return x;
    }
    static ProtoExpr concat(ProtoExpr a, ProtoExpr b) {
        ProtoExpr x;
        x.kind = Kind::Concat;
        x.children = {std::move(a), std::move(b)};
        return x;
    }
    static ProtoExpr alt(ProtoExpr a, ProtoExpr b) {
        ProtoExpr x;
        x.kind = Kind::Alt;
        x.children = {std::move(a), std::move(b)};
        return x;
    }
    static ProtoExpr star(ProtoExpr a) {
        ProtoExpr x;
        x.kind = Kind::Star;
        x.children = {std::move(a)};
        return x;
    }

    bool operator==(const ProtoExpr&) const = default;
};

/// Automaton location, optionally parameterized (e.g. locked<F>).
struct AutLocation {
    Name base;
    std::optional<Name> param;

    auto operator<=>(const AutLocation&) const = default;
};

std::string to_string(const AutLocation& l);

/// A transition; a missing event is a silent move (produced by expression
/// translation, removed by determinization).
struct AutTransition {
    AutLocation source;
    std::optional<Event> event;
    AutLocation target;

    auto operator<=>(const AutTransition&) const = default;
};

struct ProtoAutomaton {
    std::vector<AutLocation> locations;
    AutLocation initial;
    std::set<AutLocation> accepting;
    std::vector<AutTransition> transitions;

    bool operator==(const ProtoAutomaton&) const = default;
};

/// Events appearing on transitions (silent moves excluded), sorted.
std::vector<Event> alphabet(const ProtoAutomaton& a);
std::vector<Event> alphabet(const ProtoExpr& e);

/// A parsed protocol specification: an expression or an automaton, written
/// in one direction, optionally parameterized by a single variable, and
/// optionally carrying resource clauses (acquire/release/exclusive).
struct ProtoSpec {
    Name name;
    Direction direction = Direction::Inc;
    std::optional<Name> variable;
    std::variant<ProtoExpr, ProtoAutomaton> body;
    std::set<Name> acquire_labels;  // resource clauses; empty means defaults
    std::set<Name> release_labels;
    bool exclusive = false;

    bool is_expression() const { return std::holds_alternative<ProtoExpr>(body); }
    const ProtoExpr& expression() const { return std::get<ProtoExpr>(body); }
    const ProtoAutomaton& automaton() const { return std::get<ProtoAutomaton>(body); }

    bool operator==(const ProtoSpec&) const = default;
};

/// Standard compositional translation; the result is nondeterministic with
/// silent moves and accepts exactly the expression's language.
ProtoAutomaton to_nfa(const ProtoExpr& e);

/// Subset construction: language-equivalent, deterministic and complete over
/// the input's alphabet (a non-accepting sink absorbs missing moves).
ProtoAutomaton determinize(const ProtoAutomaton& a);

/// The spec's body as an automaton. Throws std::invalid_argument when the
/// spec still carries an uninstantiated parameter.
ProtoAutomaton compile(const ProtoSpec& spec);

/// Deterministic membership runner; determinizes once at construction and
/// keeps the partial transition table (no sink).
class DfaRunner {
  public:
    explicit DfaRunner(const ProtoAutomaton& a);

    const AutLocation& initial() const { return initial_; }
    bool is_accepting(const AutLocation& l) const { return accepting_.count(l) != 0; }
    /// One deterministic step; nullopt when the spec admits no such event here.
    std::optional<AutLocation> step(const AutLocation& from, const Event& e) const;
    bool accepts(const std::vector<Event>& trace) const;

  private:
    AutLocation initial_;
    std::set<AutLocation> accepting_;
    std::map<AutLocation, std::map<Event, AutLocation>> delta_;
};

enum class Verdict { Ok, Accepting, Violation };

struct MonitorResult {
    std::vector<Verdict> verdicts;  // one per trace event
    bool initially_accepting = false;

    bool violated() const {
        return !verdicts.empty() && verdicts.back() == Verdict::Violation;
    }
    /// Whole trace in the spec's language.
    bool final_accepting() const {
        return verdicts.empty() ? initially_accepting : verdicts.back() == Verdict::Accepting;
    }
};

/// Stepwise verdicts: Accepting in an accepting state, Ok otherwise,
/// Violation from the first event the spec admits no transition for
/// (violations are terminal).
MonitorResult monitor(const ProtoSpec& spec, const std::vector<Event>& trace);
MonitorResult monitor(const ProtoAutomaton& a, const std::vector<Event>& trace);

enum class InstantiationStyle { Replicate, Collapse };

/// Substitutes concrete values for the spec's parameter. Replicate gives
/// every value its own copy of the parameterized locations/subterm (values
/// stay paired within a copy); Collapse keeps the parameterized locations
/// single and widens each parameterized event to an alternation over all
/// values. Throws std::invalid_argument for a spec without a parameter or
/// for empty/duplicate value lists.
ProtoSpec instantiate(const ProtoSpec& spec, const std::vector<Name>& values,
                      InstantiationStyle style);

struct InclusionResult {
    bool included = true;
    std::vector<Event> counterexample;  // shortest trace in L(a) \ L(b)
};

/// Language inclusion L(a) <= L(b) over the union alphabet; events absent
/// from b's alphabet lead to its sink.
InclusionResult included(const ProtoAutomaton& a, const ProtoAutomaton& b);
InclusionResult included(const ProtoSpec& a, const ProtoSpec& b);

/// How a client's outgoing labels map onto resource instances.
struct BindingEntry {
    Name resource;
    Name inc_label;
    std::optional<Name> param;

    auto operator<=>(const BindingEntry&) const = default;
};
using Binding = std::map<Name, BindingEntry>;  // client OUT label -> target

/// Order-preserving rewrite of a client trace onto one resource's incoming
/// alphabet; events bound to other resources are dropped.
std::vector<Event> project(const std::vector<Event>& trace, const Binding& binding,
                           const Name& resource);

/// Same rewrite applied to a client automaton: transitions bound elsewhere
/// become silent moves, so the result's language is the projected trace set.
ProtoAutomaton project_automaton(const ProtoAutomaton& client, const Binding& binding,
                                 const Name& resource);

/// A resource protocol over incoming events plus the lock discipline: which
/// labels acquire and release, and whether at most one client may hold it.
struct ResourceDecl {
    ProtoAutomaton automaton;
    std::set<Name> acquire_labels;
    std::set<Name> release_labels;
    bool exclusive = false;
};

/// Resource view of a parsed spec; acquire/release default to Lock/Unlock
/// when the spec declares none.
ResourceDecl make_resource(const ProtoSpec& spec);

struct RendezvousStep {
    Name client;
    Event client_event;
    Name resource;
    Event resource_event;
};

struct ComposeResult {
    bool deadlock = false;
    std::vector<RendezvousStep> witness;  // shortest path into the blocked state
    std::string blocked_description;
    std::size_t product_states = 0;
};

/// Interleaving product of the clients, each OUT event synchronizing with
/// its bound resource's INC transition. An exclusive resource admits only
/// its holder between acquire and release. Deadlock: a reachable state with
/// no enabled rendezvous where some client is not in an accepting location.
/// Throws std::invalid_argument for client events without a binding.
ComposeResult compose_deadlock(const std::vector<std::pair<Name, ProtoAutomaton>>& clients,
                               const std::vector<std::pair<Name, ResourceDecl>>& resources,
                               const Binding& binding);

}  // namespace osgilab
