#include "osgilab/explore.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

namespace osgilab {

namespace {

std::string state_key(const RuntimeConfig& cfg) {
    std::ostringstream os;
    for (const auto& b : cfg.present_bundles) os << "b:" << b << ";";
    for (const auto& [b, o] : cfg.present_objects) os << "o:" << b << "." << o << ";";
    for (const auto& s : cfg.statuses) {
        os << "s:" << s.method << "." << s.object << "@" << s.bundle << "/" << s.location << "#"
           << s.id << "[";
        for (const auto& e : s.call_state) {
            os << e.method << "." << e.object << "@" << e.bundle << "#" << e.callee << ",";
        }
        os << "];";
    }
    os << "n:" << cfg.next_id;
    return os.str();
}

std::string status_base(const MethodStatus& s) {
    return s.bundle + "|" + s.object + "|" + s.method + "|" + s.location;
}

}  // namespace

RuntimeConfig canonicalize(const RuntimeConfig& cfg) {
    const std::size_t n = cfg.statuses.size();

    std::unordered_map<InstanceId, std::size_t> index_of;
    for (std::size_t i = 0; i < n; ++i) index_of[cfg.statuses[i].id] = i;

    // Wait forest: the caller holding an entry for a live id is its parent.
    std::vector<std::optional<std::size_t>> parent(n);
    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& e : cfg.statuses[i].call_state) {
            auto it = index_of.find(e.callee);
            if (it != index_of.end()) {
                parent[it->second] = i;
                children[i].push_back(it->second);
            }
        }
    }

    // Id-independent subtree signatures; equal signatures mean swappable
    // (automorphic) subtrees, so any stable order among them is canonical.
    std::vector<std::string> sig(n);
    std::function<const std::string&(std::size_t)> signature = [&](std::size_t i) -> const std::string& {
        if (sig[i].empty()) {
            std::vector<std::string> kids;
            for (std::size_t c : children[i]) kids.push_back(signature(c));
            // Dangling entries (callee killed) distinguish a blocked status
            // from an idle one with the same coordinates; "!" cannot collide
            // with child signatures, which start with "(".
            for (const auto& e : cfg.statuses[i].call_state) {
                if (!index_of.count(e.callee)) {
                    kids.push_back("!" + e.method + "." + e.object + "@" + e.bundle);
                }
            }
            std::sort(kids.begin(), kids.end());
            std::string s = "(" + status_base(cfg.statuses[i]);
            for (const auto& k : kids) s += "|" + k;
            s += ")";
            sig[i] = std::move(s);
        }
        return sig[i];
    };
    for (std::size_t i = 0; i < n; ++i) signature(i);

    // Forest positions: roots and sibling groups ordered by signature.
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < n; ++i) {
        if (!parent[i]) roots.push_back(i);
    }
    std::stable_sort(roots.begin(), roots.end(),
                     [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });

    std::vector<std::vector<std::size_t>> position(n);
    std::function<void(std::size_t)> place = [&](std::size_t i) {
        auto kids = children[i];
        std::stable_sort(kids.begin(), kids.end(),
                         [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });
        for (std::size_t rank = 0; rank < kids.size(); ++rank) {
            position[kids[rank]] = position[i];
            position[kids[rank]].push_back(rank);
            place(kids[rank]);
        }
    };
    for (std::size_t r = 0; r < roots.size(); ++r) {
        position[roots[r]] = {r};
        place(roots[r]);
    }

    // Primary order by (bundle, object, method, location); forest position
    // breaks ties between otherwise identical statuses.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        std::string ba = status_base(cfg.statuses[a]);
        std::string bb = status_base(cfg.statuses[b]);
        if (ba != bb) return ba < bb;
        return position[a] < position[b];
    });

    std::unordered_map<InstanceId, InstanceId> relabel;
    for (std::size_t k = 0; k < n; ++k) relabel[cfg.statuses[order[k]].id] = k;

    // Entries whose callee was killed keep no live status; they are numbered
    // after the live ids so next_id stays above everything referenced.
    struct DanglingRef {
        InstanceId owner_new;
        Name method, object, bundle;
        InstanceId old_callee;
    };
    std::vector<DanglingRef> dangling;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& e : cfg.statuses[i].call_state) {
            if (!index_of.count(e.callee)) {
                dangling.push_back(
                    {relabel.at(cfg.statuses[i].id), e.method, e.object, e.bundle, e.callee});
            }
        }
    }
    std::sort(dangling.begin(), dangling.end(), [](const DanglingRef& a, const DanglingRef& b) {
        return std::tie(a.owner_new, a.method, a.object, a.bundle, a.old_callee) <
               std::tie(b.owner_new, b.method, b.object, b.bundle, b.old_callee);
    });
    std::map<std::pair<InstanceId, InstanceId>, InstanceId> dangling_id;  // (owner_new, old) -> new
    for (std::size_t k = 0; k < dangling.size(); ++k) {
        dangling_id[{dangling[k].owner_new, dangling[k].old_callee}] = n + k;
    }

    RuntimeConfig out;
    out.present_bundles = cfg.present_bundles;
    out.present_objects = cfg.present_objects;
    out.statuses.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const MethodStatus& src = cfg.statuses[order[k]];
        MethodStatus& dst = out.statuses[k];
        dst = src;
        dst.id = k;
        for (auto& e : dst.call_state) {
            auto it = index_of.find(e.callee);
            e.callee = (it != index_of.end()) ? relabel.at(e.callee)
                                              : dangling_id.at({dst.id, e.callee});
        }
        std::sort(dst.call_state.begin(), dst.call_state.end(),
                  [](const CallStateEntry& a, const CallStateEntry& b) {
                      return a.callee < b.callee;
                  });
    }
    out.next_id = n + dangling.size();
    return out;
}

std::vector<TransitionInstance> Exploration::path_to(std::size_t node) const {
    std::vector<TransitionInstance> path;
    std::size_t cur = node;
    while (nodes[cur].parent) {
        path.push_back(*nodes[cur].via);
        cur = *nodes[cur].parent;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

Exploration explore_graph(const SystemDef& def, const Bounds& bounds) {
    Exploration ex;
    ex.nodes.push_back(ExplorationNode{initial_state(def), std::nullopt, std::nullopt, 0, false});

    std::unordered_map<std::string, std::size_t> visited;
    visited.emplace(state_key(canonicalize(ex.nodes[0].config)), 0);

    std::deque<std::size_t> frontier{0};
    while (!frontier.empty()) {
        std::size_t i = frontier.front();
        frontier.pop_front();

        auto options = enabled(def, ex.nodes[i].config);
        if (options.empty()) {
            ex.nodes[i].expanded = true;
            continue;
        }
        if (bounds.max_depth && ex.nodes[i].depth >= *bounds.max_depth) {
            ex.truncated = true;
            continue;
        }
        ex.nodes[i].expanded = true;
        for (const auto& t : options) {
            StepResult step = apply(def, ex.nodes[i].config, t);
            std::string key = state_key(canonicalize(step.config));
            auto it = visited.find(key);
            if (it != visited.end()) {
                ex.edges.push_back({i, t, it->second});
                continue;
            }
            if (bounds.max_states && ex.nodes.size() >= *bounds.max_states) {
                ex.truncated = true;
                continue;
            }
            std::size_t idx = ex.nodes.size();
            ex.nodes.push_back(
                ExplorationNode{std::move(step.config), i, t, ex.nodes[i].depth + 1, false});
            visited.emplace(std::move(key), idx);
            ex.edges.push_back({i, t, idx});
            frontier.push_back(idx);
        }
    }
    return ex;
}

ReachabilityReport explore(const SystemDef& def, const Bounds& bounds) {
    Exploration ex = explore_graph(def, bounds);

    ReachabilityReport report;
    report.states_visited = ex.nodes.size();
    report.transitions_taken = ex.edges.size();
    report.truncated = ex.truncated;
    for (std::size_t i = 0; i < ex.nodes.size(); ++i) {
        RuntimeConfig canon = canonicalize(ex.nodes[i].config);
        Classification cls = classify(def, canon);
        if (cls.state == RunState::Running) continue;
        report.terminals.push_back(Terminal{canon, cls});
        if (cls.state == RunState::Deadlocked) {
            report.deadlock_witnesses.push_back(DeadlockWitness{ex.path_to(i), std::move(canon)});
        }
    }
    return report;
}

std::vector<SimulationStep> simulate(const SystemDef& def, std::uint64_t seed,
                                     std::size_t max_steps) {
    std::vector<SimulationStep> trace;
    RuntimeConfig cfg = initial_state(def);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < max_steps; ++i) {
        auto options = enabled(def, cfg);
        if (options.empty()) break;
        // Index by modulo keeps the choice reproducible across platforms.
        const TransitionInstance& pick = options[rng() % options.size()];
        StepResult step = apply(def, cfg, pick);
        trace.push_back(SimulationStep{pick, std::move(step.events)});
        cfg = std::move(step.config);
    }
    return trace;
}

StepSession::StepSession(const SystemDef& def) : def_(def) {
    history_.push_back(initial_state(def_));
}

std::vector<TransitionInstance> StepSession::options() const { return enabled(def_, current()); }

Classification StepSession::classification() const { return classify(def_, current()); }

bool StepSession::apply_option(std::size_t index) {
    auto opts = options();
    if (index >= opts.size()) return false;
    history_.push_back(apply(def_, current(), opts[index]).config);
    return true;
}

bool StepSession::undo() {
    if (history_.size() <= 1) return false;
    history_.pop_back();
    return true;
}

std::string render_config(const RuntimeConfig& cfg) {
    std::ostringstream os;
    os << "bundles:";
    for (const auto& b : cfg.present_bundles) os << " " << b;
    os << "\nobjects:";
    for (const auto& [b, o] : cfg.present_objects) os << " " << b << "." << o;
    os << "\nstatuses:";
    if (cfg.statuses.empty()) os << " (none)";
    os << "\n";
    for (const auto& s : cfg.statuses) {
        os << "  #" << s.id << " " << s.method << "." << s.object << "@" << s.bundle << " at "
           << s.location;
        if (!s.call_state.empty()) {
            os << " waiting[";
            for (std::size_t i = 0; i < s.call_state.size(); ++i) {
                const auto& e = s.call_state[i];
                if (i > 0) os << ", ";
                os << e.method << "." << e.object << "@" << e.bundle << "#" << e.callee;
            }
            os << "]";
        }
        os << "\n";
    }
    os << "next id: " << cfg.next_id << "\n";
    return os.str();
}

}  // namespace osgilab
