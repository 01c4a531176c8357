#include "osgilab/protocol.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace osgilab {
namespace {

void collect_alphabet(const ProtoExpr& e, std::set<Event>& out) {
    if (e.kind == ProtoExpr::Kind::Atom) out.insert(e.event);
    for (const auto& c : e.children) collect_alphabet(c, out);
}

}  // namespace

std::string to_string(const AutLocation& l) {
    if (!l.param) return l.base;
    return l.base + "<" + *l.param + ">";
}

std::vector<Event> alphabet(const ProtoAutomaton& a) {
    std::set<Event> s;
    for (const auto& t : a.transitions)
        if (t.event) s.insert(*t.event);
    return {s.begin(), s.end()};
}

std::vector<Event> alphabet(const ProtoExpr& e) {
    std::set<Event> s;
    collect_alphabet(e, s);
    return {s.begin(), s.end()};
}

// ---------------------------------------------------------------------------
// Expression -> nondeterministic automaton (fresh entry/exit pair per subterm,
// silent moves wiring them together).

namespace {

struct NfaBuilder {
    ProtoAutomaton a;
    std::size_t counter = 0;

    AutLocation fresh() {
        AutLocation l{"n" + std::to_string(counter++), std::nullopt};
        a.locations.push_back(l);
        return l;
    }
    void silent(const AutLocation& s, const AutLocation& t) {
        a.transitions.push_back({s, std::nullopt, t});
    }
    void labelled(const AutLocation& s, const Event& e, const AutLocation& t) {
        a.transitions.push_back({s, e, t});
    }

    std::pair<AutLocation, AutLocation> build(const ProtoExpr& e) {
        switch (e.kind) {
            case ProtoExpr::Kind::Epsilon: {
                auto s = fresh(), t = fresh();
                silent(s, t);
                return {s, t};
            }
            case ProtoExpr::Kind::Atom: {
                auto s = fresh(), t = fresh();
                labelled(s, e.event, t);
                return {s, t};
            }
            case ProtoExpr::Kind::Concat: {
                auto [s1, t1] = build(e.children[0]);
                auto [s2, t2] = build(e.children[1]);
                silent(t1, s2);
                return {s1, t2};
            }
            case ProtoExpr::Kind::Alt: {
                auto s = fresh(), t = fresh();
                auto [s1, t1] = build(e.children[0]);
                auto [s2, t2] = build(e.children[1]);
                silent(s, s1);
                silent(s, s2);
                silent(t1, t);
                silent(t2, t);
                return {s, t};
            }
            case ProtoExpr::Kind::Star: {
                auto s = fresh(), t = fresh();
                auto [s1, t1] = build(e.children[0]);
                silent(s, s1);
                silent(s, t);
                silent(t1, s1);
                silent(t1, t);
                return {s, t};
            }
        }
        throw std::logic_error("unreachable expression kind");
    }
};

}  // namespace

ProtoAutomaton to_nfa(const ProtoExpr& e) {
    NfaBuilder b;
    auto [s, t] = b.build(e);
    b.a.initial = s;
    b.a.accepting = {t};
    return b.a;
}

// ---------------------------------------------------------------------------
// Subset construction.

namespace {

using LocSet = std::set<AutLocation>;

struct MoveTables {
    std::map<AutLocation, std::vector<AutLocation>> silent;
    std::map<std::pair<AutLocation, Event>, std::vector<AutLocation>> labelled;
};

MoveTables index_moves(const ProtoAutomaton& a) {
    MoveTables t;
    for (const auto& tr : a.transitions) {
        if (tr.event)
            t.labelled[{tr.source, *tr.event}].push_back(tr.target);
        else
            t.silent[tr.source].push_back(tr.target);
    }
    return t;
}

LocSet closure(const MoveTables& t, LocSet s) {
    std::deque<AutLocation> work(s.begin(), s.end());
    while (!work.empty()) {
        AutLocation l = work.front();
        work.pop_front();
        auto it = t.silent.find(l);
        if (it == t.silent.end()) continue;
        for (const auto& next : it->second)
            if (s.insert(next).second) work.push_back(next);
    }
    return s;
}

/// Deterministic automaton over exactly `sigma`; with `complete` a
/// non-accepting sink absorbs every move the input lacks.
ProtoAutomaton determinize_over(const ProtoAutomaton& a, const std::vector<Event>& sigma,
                                bool complete) {
    MoveTables tables = index_moves(a);
    std::map<LocSet, std::size_t> index;
    std::vector<LocSet> subsets;
    std::deque<std::size_t> work;

    auto intern = [&](LocSet s) {
        auto [it, fresh] = index.try_emplace(std::move(s), subsets.size());
        if (fresh) {
            subsets.push_back(it->first);
            work.push_back(it->second);
        }
        return it->second;
    };

    ProtoAutomaton out;
    intern(closure(tables, {a.initial}));
    auto name_of = [](std::size_t i) { return AutLocation{"d" + std::to_string(i), std::nullopt}; };

    bool need_sink = false;
    AutLocation sink{"sink", std::nullopt};
    while (!work.empty()) {
        std::size_t i = work.front();
        work.pop_front();
        LocSet current = subsets[i];
        for (const auto& ev : sigma) {
            LocSet moved;
            for (const auto& l : current) {
                auto it = tables.labelled.find({l, ev});
                if (it == tables.labelled.end()) continue;
                moved.insert(it->second.begin(), it->second.end());
            }
            if (moved.empty()) {
                if (complete) {
                    need_sink = true;
                    out.transitions.push_back({name_of(i), ev, sink});
                }
                continue;
            }
            std::size_t j = intern(closure(tables, std::move(moved)));
            out.transitions.push_back({name_of(i), ev, name_of(j)});
        }
    }

    for (std::size_t i = 0; i < subsets.size(); ++i) {
        out.locations.push_back(name_of(i));
        bool acc = std::any_of(subsets[i].begin(), subsets[i].end(),
                               [&](const AutLocation& l) { return a.accepting.count(l) != 0; });
        if (acc) out.accepting.insert(name_of(i));
    }
    if (need_sink) {
        out.locations.push_back(sink);
        for (const auto& ev : sigma) out.transitions.push_back({sink, ev, sink});
    }
    out.initial = name_of(0);
    return out;
}

}  // namespace

ProtoAutomaton determinize(const ProtoAutomaton& a) {
    return determinize_over(a, alphabet(a), /*complete=*/true);
}

ProtoAutomaton compile(const ProtoSpec& spec) {
    if (spec.variable)
        throw std::invalid_argument("protocol " + spec.name + " still has parameter <" +
                                    *spec.variable + ">; instantiate it first");
    if (spec.is_expression()) return to_nfa(spec.expression());
    return spec.automaton();
}

// ---------------------------------------------------------------------------
// Membership and monitoring.

DfaRunner::DfaRunner(const ProtoAutomaton& a) {
    ProtoAutomaton dfa = determinize_over(a, alphabet(a), /*complete=*/false);
    initial_ = dfa.initial;
    accepting_ = dfa.accepting;
    for (const auto& t : dfa.transitions) delta_[t.source][*t.event] = t.target;
}

std::optional<AutLocation> DfaRunner::step(const AutLocation& from, const Event& e) const {
    auto row = delta_.find(from);
    if (row == delta_.end()) return std::nullopt;
    auto cell = row->second.find(e);
    if (cell == row->second.end()) return std::nullopt;
    return cell->second;
}

bool DfaRunner::accepts(const std::vector<Event>& trace) const {
    AutLocation cur = initial_;
    for (const auto& ev : trace) {
        auto next = step(cur, ev);
        if (!next) return false;
        cur = *next;
    }
    return is_accepting(cur);
}

MonitorResult monitor(const ProtoAutomaton& a, const std::vector<Event>& trace) {
    DfaRunner runner(a);
    MonitorResult result;
    result.initially_accepting = runner.is_accepting(runner.initial());
    AutLocation cur = runner.initial();
    bool violated = false;
    for (const auto& ev : trace) {
        if (!violated) {
            auto next = runner.step(cur, ev);
            if (!next)
                violated = true;
            else
                cur = *next;
        }
        if (violated)
            result.verdicts.push_back(Verdict::Violation);
        else
            result.verdicts.push_back(runner.is_accepting(cur) ? Verdict::Accepting : Verdict::Ok);
    }
    return result;
}

MonitorResult monitor(const ProtoSpec& spec, const std::vector<Event>& trace) {
    return monitor(compile(spec), trace);
}

// ---------------------------------------------------------------------------
// Parameter instantiation.

namespace {

std::size_t count_var(const ProtoExpr& e, const Name& var) {
    if (e.kind == ProtoExpr::Kind::Atom) return e.event.param == var ? 1 : 0;
    std::size_t n = 0;
    for (const auto& c : e.children) n += count_var(c, var);
    return n;
}

ProtoExpr subst_expr(ProtoExpr e, const Name& var, const Name& value) {
    if (e.kind == ProtoExpr::Kind::Atom) {
        if (e.event.param == var) e.event.param = value;
        return e;
    }
    for (auto& c : e.children) c = subst_expr(std::move(c), var, value);
    return e;
}

ProtoExpr alt_over(const ProtoExpr& e, const Name& var, const std::vector<Name>& values) {
    ProtoExpr out = subst_expr(e, var, values.front());
    for (std::size_t i = 1; i < values.size(); ++i)
        out = ProtoExpr::alt(std::move(out), subst_expr(e, var, values[i]));
    return out;
}

/// Descends to the smallest subterm containing every occurrence of the
/// variable and replaces it by one alternative per value.
ProtoExpr replicate_expr(const ProtoExpr& e, const Name& var, const std::vector<Name>& values) {
    std::size_t total = count_var(e, var);
    if (total == 0) return e;
    for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (count_var(e.children[i], var) == total) {
            ProtoExpr out = e;
            out.children[i] = replicate_expr(e.children[i], var, values);
            return out;
        }
    }
    return alt_over(e, var, values);
}

/// Replaces each parameterized atom by an alternation over all values.
ProtoExpr collapse_expr(const ProtoExpr& e, const Name& var, const std::vector<Name>& values) {
    if (e.kind == ProtoExpr::Kind::Atom) {
        if (e.event.param != var) return e;
        return alt_over(e, var, values);
    }
    ProtoExpr out = e;
    for (auto& c : out.children) c = collapse_expr(c, var, values);
    return out;
}

AutLocation subst_loc(AutLocation l, const Name& var, const Name& value) {
    if (l.param == var) l.param = value;
    return l;
}

Event subst_event(Event e, const Name& var, const Name& value) {
    if (e.param == var) e.param = value;
    return e;
}

AutLocation strip_loc(AutLocation l, const Name& var) {
    if (l.param == var) l.param.reset();
    return l;
}

ProtoAutomaton replicate_automaton(const ProtoAutomaton& a, const Name& var,
                                   const std::vector<Name>& values) {
    if (a.initial.param == var)
        throw std::invalid_argument("cannot replicate a parameterized initial location");
    ProtoAutomaton out;
    out.initial = a.initial;
    for (const auto& l : a.locations) {
        if (l.param == var)
            for (const auto& v : values) out.locations.push_back(subst_loc(l, var, v));
        else
            out.locations.push_back(l);
    }
    for (const auto& l : a.accepting) {
        if (l.param == var)
            for (const auto& v : values) out.accepting.insert(subst_loc(l, var, v));
        else
            out.accepting.insert(l);
    }
    for (const auto& t : a.transitions) {
        bool mentions = t.source.param == var || t.target.param == var ||
                        (t.event && t.event->param == var);
        if (!mentions) {
            out.transitions.push_back(t);
            continue;
        }
        for (const auto& v : values) {
            AutTransition c{subst_loc(t.source, var, v),
                            t.event ? std::optional<Event>(subst_event(*t.event, var, v))
                                    : std::nullopt,
                            subst_loc(t.target, var, v)};
            out.transitions.push_back(std::move(c));
        }
    }
    return out;
}

ProtoAutomaton collapse_automaton(const ProtoAutomaton& a, const Name& var,
                                  const std::vector<Name>& values) {
    ProtoAutomaton out;
    out.initial = strip_loc(a.initial, var);
    for (const auto& l : a.locations) {
        AutLocation s = strip_loc(l, var);
        if (std::find(out.locations.begin(), out.locations.end(), s) == out.locations.end())
            out.locations.push_back(s);
    }
    for (const auto& l : a.accepting) out.accepting.insert(strip_loc(l, var));
    for (const auto& t : a.transitions) {
        AutLocation src = strip_loc(t.source, var);
        AutLocation dst = strip_loc(t.target, var);
        std::vector<AutTransition> expanded;
        if (t.event && t.event->param == var) {
            for (const auto& v : values)
                expanded.push_back({src, subst_event(*t.event, var, v), dst});
        } else {
            expanded.push_back({src, t.event, dst});
        }
        for (auto& c : expanded)
            if (std::find(out.transitions.begin(), out.transitions.end(), c) ==
                out.transitions.end())
                out.transitions.push_back(std::move(c));
    }
    return out;
}

}  // namespace

ProtoSpec instantiate(const ProtoSpec& spec, const std::vector<Name>& values,
                      InstantiationStyle style) {
    if (!spec.variable)
        throw std::invalid_argument("protocol " + spec.name + " has no parameter to instantiate");
    if (values.empty()) throw std::invalid_argument("instantiation needs at least one value");
    std::set<Name> seen(values.begin(), values.end());
    if (seen.size() != values.size())
        throw std::invalid_argument("instantiation values must be distinct");

    const Name& var = *spec.variable;
    ProtoSpec out = spec;
    out.variable.reset();
    if (spec.is_expression()) {
        const ProtoExpr& e = spec.expression();
        out.body = style == InstantiationStyle::Replicate ? replicate_expr(e, var, values)
                                                          : collapse_expr(e, var, values);
    } else {
        const ProtoAutomaton& a = spec.automaton();
        out.body = style == InstantiationStyle::Replicate ? replicate_automaton(a, var, values)
                                                          : collapse_automaton(a, var, values);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Language inclusion.

namespace {

struct IndexedDfa {
    std::vector<AutLocation> locs;
    std::size_t initial = 0;
    std::vector<char> accepting;
    std::map<std::pair<std::size_t, Event>, std::size_t> delta;
};

IndexedDfa index_dfa(const ProtoAutomaton& dfa) {
    IndexedDfa d;
    std::map<AutLocation, std::size_t> idx;
    d.locs = dfa.locations;
    for (std::size_t i = 0; i < d.locs.size(); ++i) idx[d.locs[i]] = i;
    d.initial = idx.at(dfa.initial);
    d.accepting.assign(d.locs.size(), 0);
    for (const auto& l : dfa.accepting) d.accepting[idx.at(l)] = 1;
    for (const auto& t : dfa.transitions) d.delta[{idx.at(t.source), *t.event}] = idx.at(t.target);
    return d;
}

}  // namespace

InclusionResult included(const ProtoAutomaton& a, const ProtoAutomaton& b) {
    std::set<Event> sigma_set;
    for (const auto& e : alphabet(a)) sigma_set.insert(e);
    for (const auto& e : alphabet(b)) sigma_set.insert(e);
    std::vector<Event> sigma(sigma_set.begin(), sigma_set.end());

    IndexedDfa da = index_dfa(determinize_over(a, sigma, true));
    IndexedDfa db = index_dfa(determinize_over(b, sigma, true));

    struct Node {
        std::size_t sa, sb;
        std::ptrdiff_t parent;
        Event via;
    };
    std::vector<Node> nodes;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
    std::deque<std::size_t> work;
    nodes.push_back({da.initial, db.initial, -1, {}});
    seen[{da.initial, db.initial}] = 0;
    work.push_back(0);

    while (!work.empty()) {
        std::size_t i = work.front();
        work.pop_front();
        auto [sa, sb] = std::pair{nodes[i].sa, nodes[i].sb};
        if (da.accepting[sa] && !db.accepting[sb]) {
            InclusionResult r;
            r.included = false;
            for (std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i); nodes[j].parent >= 0;
                 j = nodes[j].parent)
                r.counterexample.push_back(nodes[j].via);
            std::reverse(r.counterexample.begin(), r.counterexample.end());
            return r;
        }
        for (const auto& ev : sigma) {
            std::size_t ta = da.delta.at({sa, ev});
            std::size_t tb = db.delta.at({sb, ev});
            auto [it, fresh] = seen.try_emplace({ta, tb}, nodes.size());
            if (!fresh) continue;
            nodes.push_back({ta, tb, static_cast<std::ptrdiff_t>(i), ev});
            work.push_back(it->second);
        }
    }
    return {};
}

InclusionResult included(const ProtoSpec& a, const ProtoSpec& b) {
    return included(compile(a), compile(b));
}

// ---------------------------------------------------------------------------
// Projection onto a resource.

std::vector<Event> project(const std::vector<Event>& trace, const Binding& binding,
                           const Name& resource) {
    std::vector<Event> out;
    for (const auto& ev : trace) {
        if (ev.dir != Direction::Out) continue;
        auto it = binding.find(ev.label);
        if (it == binding.end() || it->second.resource != resource) continue;
        out.push_back(Event{Direction::Inc, it->second.inc_label, it->second.param});
    }
    return out;
}

ProtoAutomaton project_automaton(const ProtoAutomaton& client, const Binding& binding,
                                 const Name& resource) {
    ProtoAutomaton out = client;
    for (auto& t : out.transitions) {
        if (!t.event) continue;
        auto it = binding.find(t.event->label);
        if (t.event->dir == Direction::Out && it != binding.end() &&
            it->second.resource == resource)
            t.event = Event{Direction::Inc, it->second.inc_label, it->second.param};
        else
            t.event.reset();
    }
    return out;
}

ResourceDecl make_resource(const ProtoSpec& spec) {
    ResourceDecl r;
    r.automaton = compile(spec);
    r.acquire_labels = spec.acquire_labels;
    r.release_labels = spec.release_labels;
    r.exclusive = spec.exclusive;
    if (r.acquire_labels.empty() && r.release_labels.empty()) {
        r.acquire_labels = {"Lock"};
        r.release_labels = {"Unlock"};
    }
    return r;
}

// ---------------------------------------------------------------------------
// Rendezvous composition and deadlock search.

ComposeResult compose_deadlock(const std::vector<std::pair<Name, ProtoAutomaton>>& clients,
                               const std::vector<std::pair<Name, ResourceDecl>>& resources,
                               const Binding& binding) {
    std::map<Name, std::size_t> resource_index;
    for (std::size_t i = 0; i < resources.size(); ++i) resource_index[resources[i].first] = i;

    std::vector<IndexedDfa> cdfa, rdfa;
    for (const auto& [name, a] : clients) {
        for (const auto& ev : alphabet(a)) {
            if (ev.dir != Direction::Out)
                throw std::invalid_argument("client " + name + " event " + to_string(ev) +
                                            " is not outgoing");
            auto it = binding.find(ev.label);
            if (it == binding.end())
                throw std::invalid_argument("client " + name + " event " + to_string(ev) +
                                            " has no binding");
            if (!resource_index.count(it->second.resource))
                throw std::invalid_argument("binding for " + ev.label +
                                            " names unknown resource " + it->second.resource);
        }
        cdfa.push_back(index_dfa(determinize_over(a, alphabet(a), false)));
    }
    for (const auto& [name, r] : resources)
        rdfa.push_back(index_dfa(determinize_over(r.automaton, alphabet(r.automaton), false)));

    struct State {
        std::vector<std::size_t> client;
        std::vector<std::size_t> resource;
        std::vector<std::ptrdiff_t> holder;  // -1: free; only exclusive resources change

        auto operator<=>(const State&) const = default;
    };
    struct Move {
        std::size_t client_idx;
        Event client_event;
        Event resource_event;
        State next;
    };

    State start;
    for (const auto& d : cdfa) start.client.push_back(d.initial);
    for (const auto& d : rdfa) start.resource.push_back(d.initial);
    start.holder.assign(resources.size(), -1);

    auto moves_from = [&](const State& s) {
        std::vector<Move> out;
        for (std::size_t ci = 0; ci < clients.size(); ++ci) {
            auto lo = cdfa[ci].delta.lower_bound({s.client[ci], Event{}});
            for (auto it = lo; it != cdfa[ci].delta.end() && it->first.first == s.client[ci]; ++it) {
                const Event& ev = it->first.second;
                const BindingEntry& be = binding.at(ev.label);
                std::size_t ri = resource_index.at(be.resource);
                Event rev{Direction::Inc, be.inc_label, be.param};
                auto rt = rdfa[ri].delta.find({s.resource[ri], rev});
                if (rt == rdfa[ri].delta.end()) continue;
                if (resources[ri].second.exclusive && s.holder[ri] >= 0 &&
                    s.holder[ri] != static_cast<std::ptrdiff_t>(ci))
                    continue;
                State next = s;
                next.client[ci] = it->second;
                next.resource[ri] = rt->second;
                if (resources[ri].second.exclusive) {
                    if (resources[ri].second.acquire_labels.count(be.inc_label))
                        next.holder[ri] = static_cast<std::ptrdiff_t>(ci);
                    if (resources[ri].second.release_labels.count(be.inc_label))
                        next.holder[ri] = -1;
                }
                out.push_back({ci, ev, rev, std::move(next)});
            }
        }
        return out;
    };

    auto describe_blocked = [&](const State& s) {
        std::ostringstream os;
        for (std::size_t ci = 0; ci < clients.size(); ++ci) {
            if (cdfa[ci].accepting[s.client[ci]]) continue;
            os << "client " << clients[ci].first << " at "
               << to_string(cdfa[ci].locs[s.client[ci]]) << ":";
            auto lo = cdfa[ci].delta.lower_bound({s.client[ci], Event{}});
            bool any = false;
            for (auto it = lo; it != cdfa[ci].delta.end() && it->first.first == s.client[ci]; ++it) {
                const Event& ev = it->first.second;
                const BindingEntry& be = binding.at(ev.label);
                std::size_t ri = resource_index.at(be.resource);
                Event rev{Direction::Inc, be.inc_label, be.param};
                os << (any ? ";" : "") << " " << to_string(ev) << " blocked (";
                if (resources[ri].second.exclusive && s.holder[ri] >= 0 &&
                    s.holder[ri] != static_cast<std::ptrdiff_t>(ci))
                    os << be.resource << " held by " << clients[s.holder[ri]].first;
                else
                    os << be.resource << " refuses " << to_string(rev);
                os << ")";
                any = true;
            }
            if (!any) os << " no pending moves";
            os << "\n";
        }
        return os.str();
    };

    struct Node {
        State state;
        std::ptrdiff_t parent;
        RendezvousStep via;
    };
    std::vector<Node> nodes;
    std::map<State, std::size_t> seen;
    std::deque<std::size_t> work;
    nodes.push_back({start, -1, {}});
    seen[start] = 0;
    work.push_back(0);

    ComposeResult result;
    bool found = false;
    while (!work.empty()) {
        std::size_t i = work.front();
        work.pop_front();
        State s = nodes[i].state;
        auto moves = moves_from(s);
        if (moves.empty() && !found) {
            bool all_done = true;
            for (std::size_t ci = 0; ci < clients.size(); ++ci)
                if (!cdfa[ci].accepting[s.client[ci]]) all_done = false;
            if (!all_done) {
                found = true;
                result.deadlock = true;
                result.blocked_description = describe_blocked(s);
                for (std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i); nodes[j].parent >= 0;
                     j = nodes[j].parent)
                    result.witness.push_back(nodes[j].via);
                std::reverse(result.witness.begin(), result.witness.end());
            }
        }
        for (auto& m : moves) {
            auto [it, fresh] = seen.try_emplace(m.next, nodes.size());
            if (!fresh) continue;
            nodes.push_back({std::move(m.next), static_cast<std::ptrdiff_t>(i),
                             RendezvousStep{clients[m.client_idx].first, m.client_event,
                                            binding.at(m.client_event.label).resource,
                                            m.resource_event}});
            work.push_back(it->second);
        }
    }
    result.product_states = nodes.size();
    return result;
}

}  // namespace osgilab
