#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "osgilab/event.hpp"
#include "osgilab/model.hpp"

namespace osgilab {

enum class TransitionKind { FireEdge, Return, Environment };

/// One enabled step of the global transition relation.
struct TransitionInstance {
    TransitionKind kind = TransitionKind::FireEdge;
    InstanceId status = 0;        // FireEdge, Return
    std::size_t edge_index = 0;   // FireEdge: index into the status's method edges
    Action env_action;            // Environment

    static TransitionInstance fire(InstanceId status, std::size_t edge_index) {
        TransitionInstance t;
        t.kind = TransitionKind::FireEdge;
        t.status = status;
        t.edge_index = edge_index;
        return t;
    }
    static TransitionInstance ret(InstanceId status) {
        TransitionInstance t;
        t.kind = TransitionKind::Return;
        t.status = status;
        return t;
    }
    static TransitionInstance environment(Action a) {
        TransitionInstance t;
        t.kind = TransitionKind::Environment;
        t.env_action = std::move(a);
        return t;
    }

    auto operator<=>(const TransitionInstance&) const = default;
};

struct StepResult {
    RuntimeConfig config;
    std::vector<Event> events;  // one per performed action, plus the return
};

enum class RunState { Running, Quiescent, Deadlocked };

struct Classification {
    RunState state = RunState::Quiescent;
    std::vector<InstanceId> stuck;  // all remaining status ids when deadlocked

    bool operator==(const Classification&) const = default;
};

/// Enumerates every enabled transition in canonical order: edge firings by
/// (status id, edge index), then returns by status id, then environment
/// actions in declaration order.
///
/// An edge fires only when the status's call state is empty and a
/// left-to-right dry run of its actions succeeds against the evolving
/// presence map. A status returns only when its call state is empty and its
/// location has no outgoing edges.
std::vector<TransitionInstance> enabled(const SystemDef& def, const RuntimeConfig& cfg);

/// Applies one enabled transition atomically. Calls allocate fresh ids and
/// block the caller; adding a bundle spawns its activator's `start`
/// un-awaited; removing a bundle or deleting an object kills its statuses
/// (callers keep dangling call-state entries). Throws std::invalid_argument
/// if `t` is not enabled in `cfg`.
StepResult apply(const SystemDef& def, const RuntimeConfig& cfg, const TransitionInstance& t);

/// Running while anything is enabled; otherwise Quiescent when no statuses
/// remain and Deadlocked (listing the survivors) when some do.
Classification classify(const SystemDef& def, const RuntimeConfig& cfg);

/// Human-readable one-line description of a transition in the context of the
/// configuration it fires from.
std::string describe(const SystemDef& def, const RuntimeConfig& cfg, const TransitionInstance& t);

std::string to_string(const Action& a);

}  // namespace osgilab
