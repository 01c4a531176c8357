#pragma once

#include <optional>
#include <string>
#include <vector>

#include "osgilab/diagnostics.hpp"
#include "osgilab/explore.hpp"
#include "osgilab/model.hpp"
#include "osgilab/semantics.hpp"

namespace osgilab {

/// Propositional state predicate. Atoms check presence and activity;
/// MethodActive/AtLocation hold when SOME live instance matches (universal
/// readings are expressible through negation).
struct Formula {
    enum class Kind {
        BundlePresent,   // bundle(b)
        ObjectPresent,   // object(o, b)
        MethodActive,    // active(m, o, b)
        AtLocation,      // at(m, o, b, l)
        Not,
        And,
        Or,
        Implies,
    };

    Kind kind = Kind::BundlePresent;
    Name bundle;    // all atoms
    Name object;    // ObjectPresent/MethodActive/AtLocation
    Name method;    // MethodActive/AtLocation
    Name location;  // AtLocation
    std::vector<Formula> children;  // Not: 1, And/Or/Implies: 2

    static Formula bundle_present(Name b);
    static Formula object_present(Name o, Name b);
    static Formula method_active(Name m, Name o, Name b);
    static Formula at_location(Name m, Name o, Name b, Name l);
    static Formula negation(Formula f);
    static Formula conjunction(Formula a, Formula b);
    static Formula disjunction(Formula a, Formula b);
    static Formula implication(Formula a, Formula b);

    bool is_atom() const { return children.empty(); }
    bool operator==(const Formula&) const = default;
};

/// Closed-world name resolution of every atom against the definitions.
std::vector<Diagnostic> validate_formula(const Formula& f, const SystemDef& def);

/// Pointwise truth in one configuration; pre: validate_formula clean.
bool eval(const Formula& f, const SystemDef& def, const RuntimeConfig& cfg);

enum class CheckStatus { Holds, Violated, Inconclusive };

struct ReachabilityCheck {
    CheckStatus status = CheckStatus::Holds;
    /// Shortest transition path from the initial config to a violating one
    /// (empty when the initial config itself violates).
    std::vector<TransitionInstance> counterexample;
    RuntimeConfig violating;  // meaningful when Violated
    std::size_t states_checked = 0;
};

/// Does the formula hold in every reachable configuration? Holds only when
/// the exploration completed within bounds; a truncated clean run is
/// Inconclusive.
ReachabilityCheck check_reachable(const SystemDef& def, const Formula& f, const Bounds& bounds);

struct PreservationBreak {
    RuntimeConfig before;  // formula true here
    TransitionInstance via;  // structural step after which it is false
};

struct PreservationCheck {
    CheckStatus status = CheckStatus::Holds;  // Holds = preserved
    std::vector<PreservationBreak> breaks;
    std::size_t transitions_checked = 0;
};

/// Across every explored transition that performs a structural action
/// (add/remove bundle, create/delete object, or an environment step):
/// if the formula holds before, it must hold after.
PreservationCheck check_structural_preservation(const SystemDef& def, const Formula& f,
                                                const Bounds& bounds);

}  // namespace osgilab
