#include "osgilab/semantics.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace osgilab {

std::string to_string(const Event& e) {
    std::string s = (e.dir == Direction::Inc) ? "INC:" : "OUT:";
    s += e.label;
    if (e.param) {
        s += "(" + *e.param + ")";
    }
    return s;
}

std::string to_string(const Action& a) {
    switch (a.kind) {
        case ActionKind::Call:
            return "call " + a.method + "." + a.object + "@" + a.bundle;
        case ActionKind::AddBundle:
            return "add " + a.bundle;
        case ActionKind::RemoveBundle:
            return "remove " + a.bundle;
        case ActionKind::CreateObject:
            return "create " + a.object + "@" + a.bundle;
        case ActionKind::DeleteObject:
            return "delete " + a.object + "@" + a.bundle;
    }
    return {};
}

namespace {

struct PresenceMap {
    std::set<Name> bundles;
    std::set<std::pair<Name, Name>> objects;

    static PresenceMap of(const RuntimeConfig& cfg) {
        return {cfg.present_bundles, cfg.present_objects};
    }

    void add_bundle(const SystemDef& def, const Name& b) {
        bundles.insert(b);
        const BundleDef* bd = def.find_bundle(b);
        for (const auto& o : bd->objects) {
            if (o.initially_present) objects.insert({b, o.name});
        }
    }

    void remove_bundle(const Name& b) {
        bundles.erase(b);
        for (auto it = objects.begin(); it != objects.end();) {
            it = (it->first == b) ? objects.erase(it) : std::next(it);
        }
    }
};

// Left-to-right dry run of an action list against an evolving presence map.
// Mirrors exactly what apply() later performs; an edge is enabled iff the
// whole list goes through.
bool dry_run(const SystemDef& def, PresenceMap& p, const std::vector<Action>& actions) {
    for (const auto& a : actions) {
        switch (a.kind) {
            case ActionKind::Call:
                if (!p.bundles.count(a.bundle) || !p.objects.count({a.bundle, a.object})) {
                    return false;
                }
                break;
            case ActionKind::AddBundle:
                if (p.bundles.count(a.bundle)) return false;
                p.add_bundle(def, a.bundle);
                break;
            case ActionKind::RemoveBundle:
                if (!p.bundles.count(a.bundle)) return false;
                p.remove_bundle(a.bundle);
                break;
            case ActionKind::CreateObject:
                if (!p.bundles.count(a.bundle)) return false;
                if (p.objects.count({a.bundle, a.object})) return false;
                p.objects.insert({a.bundle, a.object});
                break;
            case ActionKind::DeleteObject:
                if (!p.objects.count({a.bundle, a.object})) return false;
                p.objects.erase({a.bundle, a.object});
                break;
        }
    }
    return true;
}

const MethodDef& method_of(const SystemDef& def, const MethodStatus& s) {
    const MethodDef* m = def.find_method(s.bundle, s.object, s.method);
    if (m == nullptr) {
        throw std::logic_error("status references undeclared method '" + s.method + "'");
    }
    return *m;
}

bool environment_enabled(const RuntimeConfig& cfg, const Action& a) {
    if (a.kind == ActionKind::AddBundle) return !cfg.bundle_present(a.bundle);
    if (a.kind == ActionKind::RemoveBundle) return cfg.bundle_present(a.bundle);
    return false;
}

void insert_entry(MethodStatus& s, CallStateEntry entry) {
    auto pos = std::lower_bound(
        s.call_state.begin(), s.call_state.end(), entry,
        [](const CallStateEntry& a, const CallStateEntry& b) { return a.callee < b.callee; });
    s.call_state.insert(pos, std::move(entry));
}

void insert_status(RuntimeConfig& cfg, MethodStatus s) {
    auto pos = std::lower_bound(cfg.statuses.begin(), cfg.statuses.end(), s,
                                [](const MethodStatus& a, const MethodStatus& b) {
                                    return a.id < b.id;
                                });
    cfg.statuses.insert(pos, std::move(s));
}

void kill_statuses_of_bundle(RuntimeConfig& cfg, const Name& b) {
    std::erase_if(cfg.statuses, [&](const MethodStatus& s) { return s.bundle == b; });
}

void kill_statuses_of_object(RuntimeConfig& cfg, const Name& b, const Name& o) {
    std::erase_if(cfg.statuses,
                  [&](const MethodStatus& s) { return s.bundle == b && s.object == o; });
}

Event event_for(const Action& a) {
    switch (a.kind) {
        case ActionKind::Call:
            return out(a.method, a.object);
        case ActionKind::AddBundle:
            return out("add", a.bundle);
        case ActionKind::RemoveBundle:
            return out("remove", a.bundle);
        case ActionKind::CreateObject:
            return out("create", a.object);
        case ActionKind::DeleteObject:
            return out("delete", a.object);
    }
    return {};
}

// Presence changes plus status bookkeeping shared by method-performed and
// environment structural actions. Removal kills the affected statuses, which
// may include the status firing the edge.
void perform_structural(const SystemDef& def, RuntimeConfig& cfg, const Action& a) {
    switch (a.kind) {
        case ActionKind::AddBundle: {
            const BundleDef* bd = def.find_bundle(a.bundle);
            cfg.present_bundles.insert(a.bundle);
            for (const auto& o : bd->objects) {
                if (o.initially_present) cfg.present_objects.insert({a.bundle, o.name});
            }
            // Activation spawns the activator's start, awaited by nobody.
            const ObjectDef* act = bd->find_object(bd->activator);
            const MethodDef* start = act->find_method("start");
            InstanceId id = cfg.next_id++;
            insert_status(cfg, MethodStatus{start->name, act->name, bd->name, start->initial, id, {}});
            break;
        }
        case ActionKind::RemoveBundle: {
            cfg.present_bundles.erase(a.bundle);
            for (auto it = cfg.present_objects.begin(); it != cfg.present_objects.end();) {
                it = (it->first == a.bundle) ? cfg.present_objects.erase(it) : std::next(it);
            }
            kill_statuses_of_bundle(cfg, a.bundle);
            break;
        }
        case ActionKind::CreateObject:
            cfg.present_objects.insert({a.bundle, a.object});
            break;
        case ActionKind::DeleteObject:
            cfg.present_objects.erase({a.bundle, a.object});
            kill_statuses_of_object(cfg, a.bundle, a.object);
            break;
        case ActionKind::Call:
            break;
    }
}

}  // namespace

std::vector<TransitionInstance> enabled(const SystemDef& def, const RuntimeConfig& cfg) {
    std::vector<TransitionInstance> out;

    // Statuses are sorted by id, which fixes the canonical order.
    for (const auto& s : cfg.statuses) {
        if (!s.call_state.empty()) continue;  // blocked on pending callees
        const MethodDef& m = method_of(def, s);
        for (std::size_t i : m.edges_from(s.location)) {
            PresenceMap p = PresenceMap::of(cfg);
            if (dry_run(def, p, m.edges[i].actions)) {
                out.push_back(TransitionInstance::fire(s.id, i));
            }
        }
    }
    for (const auto& s : cfg.statuses) {
        if (!s.call_state.empty()) continue;
        const MethodDef& m = method_of(def, s);
        if (m.edges_from(s.location).empty()) {
            out.push_back(TransitionInstance::ret(s.id));
        }
    }
    for (const auto& a : def.environment) {
        if (environment_enabled(cfg, a)) {
            out.push_back(TransitionInstance::environment(a));
        }
    }
    return out;
}

StepResult apply(const SystemDef& def, const RuntimeConfig& cfg, const TransitionInstance& t) {
    auto all = enabled(def, cfg);
    if (std::find(all.begin(), all.end(), t) == all.end()) {
        throw std::invalid_argument("apply: transition is not enabled");
    }

    StepResult result;
    result.config = cfg;
    RuntimeConfig& next = result.config;

    switch (t.kind) {
        case TransitionKind::FireEdge: {
            const MethodStatus* s = next.find_status(t.status);
            const MethodDef& m = method_of(def, *s);
            const Edge& edge = m.edges[t.edge_index];
            next.find_status(t.status)->location = edge.target;
            for (const auto& a : edge.actions) {
                result.events.push_back(event_for(a));
                if (a.kind == ActionKind::Call) {
                    InstanceId callee = next.next_id++;
                    const MethodDef* target = def.find_method(a.bundle, a.object, a.method);
                    // The firing status may have been killed by an earlier
                    // removal in the same list; the call still spawns.
                    if (MethodStatus* firing = next.find_status(t.status)) {
                        insert_entry(*firing, CallStateEntry{a.method, a.object, a.bundle, callee});
                    }
                    insert_status(next, MethodStatus{a.method, a.object, a.bundle,
                                                     target->initial, callee, {}});
                } else {
                    perform_structural(def, next, a);
                }
            }
            break;
        }
        case TransitionKind::Return: {
            const MethodStatus* s = next.find_status(t.status);
            result.events.push_back(out("return", s->method));
            InstanceId id = s->id;
            std::erase_if(next.statuses, [&](const MethodStatus& st) { return st.id == id; });
            // At most one caller holds an entry for this id; spawns from
            // AddBundle and the initial start have none.
            for (auto& st : next.statuses) {
                std::erase_if(st.call_state,
                              [&](const CallStateEntry& e) { return e.callee == id; });
            }
            break;
        }
        case TransitionKind::Environment: {
            result.events.push_back(event_for(t.env_action));
            perform_structural(def, next, t.env_action);
            break;
        }
    }
    return result;
}

Classification classify(const SystemDef& def, const RuntimeConfig& cfg) {
    if (!enabled(def, cfg).empty()) {
        return Classification{RunState::Running, {}};
    }
    if (cfg.statuses.empty()) {
        return Classification{RunState::Quiescent, {}};
    }
    Classification c{RunState::Deadlocked, {}};
    for (const auto& s : cfg.statuses) {
        c.stuck.push_back(s.id);
    }
    return c;
}

std::string describe(const SystemDef& def, const RuntimeConfig& cfg, const TransitionInstance& t) {
    std::ostringstream os;
    switch (t.kind) {
        case TransitionKind::FireEdge: {
            const MethodStatus* s = cfg.find_status(t.status);
            os << "fire #" << t.status;
            if (s != nullptr) {
                const MethodDef& m = method_of(def, *s);
                const Edge& e = m.edges[t.edge_index];
                os << " " << s->method << "." << s->object << "@" << s->bundle << " " << e.source
                   << " -> " << e.target;
                if (!e.actions.empty()) {
                    os << " [";
                    for (std::size_t i = 0; i < e.actions.size(); ++i) {
                        if (i > 0) os << ", ";
                        os << to_string(e.actions[i]);
                    }
                    os << "]";
                }
            }
            break;
        }
        case TransitionKind::Return: {
            const MethodStatus* s = cfg.find_status(t.status);
            os << "return #" << t.status;
            if (s != nullptr) {
                os << " " << s->method << "." << s->object << "@" << s->bundle;
            }
            break;
        }
        case TransitionKind::Environment:
            os << "env " << to_string(t.env_action);
            break;
    }
    return os.str();
}

}  // namespace osgilab
