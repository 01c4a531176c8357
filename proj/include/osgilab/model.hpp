#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "osgilab/diagnostics.hpp"

namespace osgilab {

using Name = std::string;
using InstanceId = std::uint64_t;

enum class ActionKind { Call, AddBundle, RemoveBundle, CreateObject, DeleteObject };

/// One step effect on an edge: a blocking method call or a structural change
/// to the running system (bundle/object presence).
struct Action {
    ActionKind kind = ActionKind::Call;
    Name method;  // Call only
    Name object;  // Call, CreateObject, DeleteObject
    Name bundle;  // all kinds

    static Action call(Name m, Name o, Name b) {
        return {ActionKind::Call, std::move(m), std::move(o), std::move(b)};
    }
    static Action add_bundle(Name b) { return {ActionKind::AddBundle, {}, {}, std::move(b)}; }
    static Action remove_bundle(Name b) { return {ActionKind::RemoveBundle, {}, {}, std::move(b)}; }
    static Action create_object(Name o, Name b) {
        return {ActionKind::CreateObject, {}, std::move(o), std::move(b)};
    }
    static Action delete_object(Name o, Name b) {
        return {ActionKind::DeleteObject, {}, std::move(o), std::move(b)};
    }

    bool is_structural() const { return kind != ActionKind::Call; }

    auto operator<=>(const Action&) const = default;
};

struct Edge {
    Name source;
    Name target;
    std::vector<Action> actions;  // processed left-to-right; may be empty

    auto operator<=>(const Edge&) const = default;
};

/// A method is a control-flow automaton over named locations.
struct MethodDef {
    Name name;
    std::vector<Name> locations;  // declaration order kept for printing
    Name initial;
    std::vector<Edge> edges;

    bool has_location(const Name& l) const;
    /// Indices into `edges` whose source is `l`, in declaration order.
    std::vector<std::size_t> edges_from(const Name& l) const;

    auto operator<=>(const MethodDef&) const = default;
};

struct ObjectDef {
    Name name;
    std::vector<MethodDef> methods;
    bool initially_present = true;

    const MethodDef* find_method(const Name& m) const;

    auto operator<=>(const ObjectDef&) const = default;
};

struct BundleDef {
    Name name;
    Name activator;  // must name an initially present object with start/stop
    std::vector<ObjectDef> objects;
    bool initially_present = true;

    const ObjectDef* find_object(const Name& o) const;

    auto operator<=>(const BundleDef&) const = default;
};

/// Static description of everything that can ever exist in a run. Structural
/// actions toggle presence of these declarations; they never invent new ones.
struct SystemDef {
    Name name;
    std::vector<BundleDef> bundles;
    Name init_bundle;
    std::vector<Action> environment;  // AddBundle/RemoveBundle that may fire spontaneously

    const BundleDef* find_bundle(const Name& b) const;
    const ObjectDef* find_object(const Name& b, const Name& o) const;
    const MethodDef* find_method(const Name& b, const Name& o, const Name& m) const;

    auto operator<=>(const SystemDef&) const = default;
};

/// A pending callee some active method is blocked on.
struct CallStateEntry {
    Name method;
    Name object;
    Name bundle;
    InstanceId callee = 0;

    auto operator<=>(const CallStateEntry&) const = default;
};

/// One live method instance: where it is and what it waits for.
struct MethodStatus {
    Name method;
    Name object;
    Name bundle;
    Name location;
    InstanceId id = 0;
    std::vector<CallStateEntry> call_state;  // kept sorted by callee id

    auto operator<=>(const MethodStatus&) const = default;
};

struct RuntimeConfig {
    std::set<Name> present_bundles;
    std::set<std::pair<Name, Name>> present_objects;  // (bundle, object)
    std::vector<MethodStatus> statuses;               // kept sorted by id
    InstanceId next_id = 0;

    bool bundle_present(const Name& b) const { return present_bundles.count(b) != 0; }
    bool object_present(const Name& b, const Name& o) const {
        return present_objects.count({b, o}) != 0;
    }
    const MethodStatus* find_status(InstanceId id) const;
    MethodStatus* find_status(InstanceId id);

    auto operator<=>(const RuntimeConfig&) const = default;
};

/// Checks all structural invariants of a definition: identifier shape and
/// uniqueness, location/activator wiring, closed-world references, the
/// same-bundle constraint on create/delete, and environment action kinds.
/// An empty result means the definition is usable by the semantics.
std::vector<Diagnostic> validate(const SystemDef& def);

/// Builds the start configuration: declared presence flags plus a single
/// status for the init bundle's activator `start` method (id 0, empty call
/// state). Throws std::invalid_argument when validate(def) reports errors.
RuntimeConfig initial_state(const SystemDef& def);

bool is_valid_identifier(const Name& n);

}  // namespace osgilab
