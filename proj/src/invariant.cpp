#include "osgilab/invariant.hpp"

#include <stdexcept>

namespace osgilab {

Formula Formula::bundle_present(Name b) {
    Formula f;
    f.kind = Kind::BundlePresent;
    f.bundle = std::move(b);
    return f;
}

Formula Formula::object_present(Name o, Name b) {
    Formula f;
    f.kind = Kind::ObjectPresent;
    f.object = std::move(o);
    f.bundle = std::move(b);
    return f;
}

Formula Formula::method_active(Name m, Name o, Name b) {
    Formula f;
    f.kind = Kind::MethodActive;
    f.method = std::move(m);
    f.object = std::move(o);
    f.bundle = std::move(b);
    return f;
}

Formula Formula::at_location(Name m, Name o, Name b, Name l) {
    Formula f;
    f.kind = Kind::AtLocation;
    f.method = std::move(m);
    f.object = std::move(o);
    f.bundle = std::move(b);
    f.location = std::move(l);
    return f;
}

Formula Formula::negation(Formula a) {
    Formula f;
    f.kind = Kind::Not;
    f.children = {std::move(a)};
    return f;
}

Formula Formula::conjunction(Formula a, Formula b) {
    Formula f;
    f.kind = Kind::And;
    f.children = {std::move(a), std::move(b)};
    return f;
}

Formula Formula::disjunction(Formula a, Formula b) {
    Formula f;
    f.kind = Kind::Or;
    f.children = {std::move(a), std::move(b)};
    return f;
}

Formula Formula::implication(Formula a, Formula b) {
    Formula f;
    f.kind = Kind::Implies;
    f.children = {std::move(a), std::move(b)};
    return f;
}

std::vector<Diagnostic> validate_formula(const Formula& f, const SystemDef& def) {
    std::vector<Diagnostic> out;
    auto require_bundle = [&](const Name& b) {
        if (!def.find_bundle(b)) out.push_back(error_in("formula", "unknown bundle " + b));
    };
    auto require_object = [&](const Name& o, const Name& b) {
        require_bundle(b);
        if (def.find_bundle(b) && !def.find_object(b, o))
            out.push_back(error_in("formula", "unknown object " + o + " in bundle " + b));
    };
    switch (f.kind) {
        case Formula::Kind::BundlePresent:
            require_bundle(f.bundle);
            break;
        case Formula::Kind::ObjectPresent:
            require_object(f.object, f.bundle);
            break;
        case Formula::Kind::MethodActive:
        case Formula::Kind::AtLocation: {
            require_object(f.object, f.bundle);
            const MethodDef* m = def.find_method(f.bundle, f.object, f.method);
            if (def.find_object(f.bundle, f.object) && !m)
                out.push_back(error_in("formula", "unknown method " + f.method + " of " +
                                                      f.object + "@" + f.bundle));
            if (f.kind == Formula::Kind::AtLocation && m && !m->has_location(f.location))
                out.push_back(error_in("formula", "unknown location " + f.location +
                                                      " in method " + f.method));
            break;
        }
        default:
            for (const auto& c : f.children) {
                auto sub = validate_formula(c, def);
                out.insert(out.end(), sub.begin(), sub.end());
            }
    }
    return out;
}

bool eval(const Formula& f, const SystemDef& def, const RuntimeConfig& cfg) {
    switch (f.kind) {
        case Formula::Kind::BundlePresent:
            return cfg.bundle_present(f.bundle);
        case Formula::Kind::ObjectPresent:
            return cfg.object_present(f.bundle, f.object);
        case Formula::Kind::MethodActive:
        case Formula::Kind::AtLocation:
            for (const auto& s : cfg.statuses) {
                if (s.method != f.method || s.object != f.object || s.bundle != f.bundle)
                    continue;
                if (f.kind == Formula::Kind::MethodActive || s.location == f.location)
                    return true;
            }
            return false;
        case Formula::Kind::Not:
            return !eval(f.children[0], def, cfg);
        case Formula::Kind::And:
            return eval(f.children[0], def, cfg) && eval(f.children[1], def, cfg);
        case Formula::Kind::Or:
            return eval(f.children[0], def, cfg) || eval(f.children[1], def, cfg);
        case Formula::Kind::Implies:
            return !eval(f.children[0], def, cfg) || eval(f.children[1], def, cfg);
    }
    throw std::logic_error("unreachable formula kind");
}

ReachabilityCheck check_reachable(const SystemDef& def, const Formula& f, const Bounds& bounds) {
    Exploration g = explore_graph(def, bounds);
    ReachabilityCheck result;
    result.states_checked = g.nodes.size();
    // Nodes are in breadth-first order, so the first violation found is at
    // minimal depth.
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (eval(f, def, g.nodes[i].config)) continue;
        result.status = CheckStatus::Violated;
        result.counterexample = g.path_to(i);
        result.violating = g.nodes[i].config;
        return result;
    }
    result.status = g.truncated ? CheckStatus::Inconclusive : CheckStatus::Holds;
    return result;
}

PreservationCheck check_structural_preservation(const SystemDef& def, const Formula& f,
                                                const Bounds& bounds) {
    Exploration g = explore_graph(def, bounds);
    PreservationCheck result;
    for (const auto& e : g.edges) {
        const TransitionInstance& t = e.transition;
        bool structural = false;
        if (t.kind == TransitionKind::Environment) {
            structural = true;
        } else if (t.kind == TransitionKind::FireEdge) {
            const RuntimeConfig& pre = g.nodes[e.source].config;
            const MethodStatus* s = pre.find_status(t.status);
            const MethodDef* m = s ? def.find_method(s->bundle, s->object, s->method) : nullptr;
            if (m && t.edge_index < m->edges.size())
                for (const auto& a : m->edges[t.edge_index].actions)
                    if (a.is_structural()) structural = true;
        }
        if (!structural) continue;
        ++result.transitions_checked;
        const RuntimeConfig& before = g.nodes[e.source].config;
        const RuntimeConfig& after = g.nodes[e.target].config;
        if (eval(f, def, before) && !eval(f, def, after))
            result.breaks.push_back({before, t});
    }
    if (!result.breaks.empty())
        result.status = CheckStatus::Violated;
    else
        result.status = g.truncated ? CheckStatus::Inconclusive : CheckStatus::Holds;
    return result;
}

}  // namespace osgilab
