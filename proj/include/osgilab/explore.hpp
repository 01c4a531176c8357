#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "osgilab/semantics.hpp"

namespace osgilab {

/// Caps for exhaustive exploration. Models with environment actions or
/// recursive calls can have infinite state spaces; at least one finite bound
/// keeps those runs terminating.
struct Bounds {
    std::optional<std::size_t> max_depth;
    std::optional<std::size_t> max_states;

    static Bounds unbounded() { return {}; }
    static Bounds defaults() { return {10000, 1000000}; }
};

/// Relabels instance ids by a deterministic scheme so that configurations
/// equal up to id permutation become identical values: statuses are ordered
/// by (bundle, object, method, location) with ties broken by their position
/// in the caller->callee wait forest, then numbered 0..n-1. Call-state
/// entries are rewritten to match; entries whose callee no longer exists
/// (killed by a removal) are numbered after the live statuses. Idempotent.
RuntimeConfig canonicalize(const RuntimeConfig& cfg);

struct ExplorationNode {
    RuntimeConfig config;                     // plain config, replayable by apply()
    std::optional<std::size_t> parent;        // BFS tree parent
    std::optional<TransitionInstance> via;    // transition from parent
    std::size_t depth = 0;
    bool expanded = false;
};

struct ExplorationEdge {
    std::size_t source = 0;
    TransitionInstance transition;
    std::size_t target = 0;
};

/// Breadth-first reachability graph with the visited set keyed on canonical
/// forms. Node 0 is the initial configuration; edges cover every enabled
/// transition of every expanded node.
struct Exploration {
    std::vector<ExplorationNode> nodes;
    std::vector<ExplorationEdge> edges;
    bool truncated = false;

    /// Transition path from node 0 to the given node along the BFS tree.
    std::vector<TransitionInstance> path_to(std::size_t node) const;
};

Exploration explore_graph(const SystemDef& def, const Bounds& bounds);

struct Terminal {
    RuntimeConfig config;  // canonical form
    Classification classification;
};

struct DeadlockWitness {
    std::vector<TransitionInstance> path;  // replayable from initial_state via apply
    RuntimeConfig config;                  // canonical deadlocked terminal
};

struct ReachabilityReport {
    std::size_t states_visited = 0;
    std::size_t transitions_taken = 0;
    std::vector<Terminal> terminals;
    std::vector<DeadlockWitness> deadlock_witnesses;  // shortest paths, BFS order
    bool truncated = false;
};

ReachabilityReport explore(const SystemDef& def, const Bounds& bounds);

struct SimulationStep {
    TransitionInstance transition;
    std::vector<Event> events;
};

/// Random resolution of the non-determinism: uniformly picks one enabled
/// transition per step until a terminal configuration or `max_steps`.
/// Deterministic for a given seed.
std::vector<SimulationStep> simulate(const SystemDef& def, std::uint64_t seed,
                                     std::size_t max_steps);

/// Manual resolution of the non-determinism, with undo. Backs the
/// interactive `step` command.
class StepSession {
  public:
    explicit StepSession(const SystemDef& def);

    const RuntimeConfig& current() const { return history_.back(); }
    const SystemDef& definition() const { return def_; }
    std::vector<TransitionInstance> options() const;
    Classification classification() const;

    /// Applies option `index` from options(); returns false (state unchanged)
    /// when the index is out of range.
    bool apply_option(std::size_t index);
    /// Returns false when already at the initial configuration.
    bool undo();

  private:
    SystemDef def_;
    std::vector<RuntimeConfig> history_;
};

std::string render_config(const RuntimeConfig& cfg);

}  // namespace osgilab
