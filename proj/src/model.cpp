#include "osgilab/model.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace osgilab {

std::string to_string(const Diagnostic& d) {
    std::ostringstream out;
    out << (d.severity == Severity::Error ? "error" : "warning");
    if (d.span) out << " at " << d.span->line << ":" << d.span->column;
    if (!d.context.empty()) out << " [" << d.context << "]";
    out << ": " << d.message;
    return out.str();
}

bool is_valid_identifier(const Name& n) {
    if (n.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(n[0])) && n[0] != '_') return false;
    return std::all_of(n.begin(), n.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

bool MethodDef::has_location(const Name& l) const {
    return std::find(locations.begin(), locations.end(), l) != locations.end();
}

std::vector<std::size_t> MethodDef::edges_from(const Name& l) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].source == l) out.push_back(i);
    }
    return out;
}

const MethodDef* ObjectDef::find_method(const Name& m) const {
    for (const auto& md : methods) {
        if (md.name == m) return &md;
    }
    return nullptr;
}

const ObjectDef* BundleDef::find_object(const Name& o) const {
    for (const auto& od : objects) {
        if (od.name == o) return &od;
    }
    return nullptr;
}

const BundleDef* SystemDef::find_bundle(const Name& b) const {
    for (const auto& bd : bundles) {
        if (bd.name == b) return &bd;
    }
    return nullptr;
}

const ObjectDef* SystemDef::find_object(const Name& b, const Name& o) const {
    const BundleDef* bd = find_bundle(b);
    return bd ? bd->find_object(o) : nullptr;
}

const MethodDef* SystemDef::find_method(const Name& b, const Name& o, const Name& m) const {
    const ObjectDef* od = find_object(b, o);
    return od ? od->find_method(m) : nullptr;
}

const MethodStatus* RuntimeConfig::find_status(InstanceId id) const {
    for (const auto& s : statuses) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

MethodStatus* RuntimeConfig::find_status(InstanceId id) {
    for (auto& s : statuses) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

namespace {

class Validator {
  public:
    explicit Validator(const SystemDef& def) : def_(def) {}

    std::vector<Diagnostic> run() {
        check_names();
        check_structure();
        check_actions();
        return std::move(diags_);
    }

  private:
    void fail(std::string context, std::string message) {
        diags_.push_back(error_in(std::move(context), std::move(message)));
    }

    void check_identifier(const Name& n, const std::string& context, const char* what) {
        if (!is_valid_identifier(n)) {
            fail(context, std::string(what) + " name '" + n + "' is not a valid identifier");
        }
    }

    void check_names() {
        check_identifier(def_.name, "system", "system");
        std::unordered_set<Name> bundle_names;
        for (const auto& b : def_.bundles) {
            std::string bctx = "bundle " + b.name;
            check_identifier(b.name, bctx, "bundle");
            if (!bundle_names.insert(b.name).second) {
                fail(bctx, "duplicate bundle name '" + b.name + "'");
            }
            std::unordered_set<Name> object_names;
            for (const auto& o : b.objects) {
                std::string octx = bctx + " / object " + o.name;
                check_identifier(o.name, octx, "object");
                if (!object_names.insert(o.name).second) {
                    fail(octx, "duplicate object name '" + o.name + "' in bundle '" + b.name + "'");
                }
                std::unordered_set<Name> method_names;
                for (const auto& m : o.methods) {
                    std::string mctx = octx + " / method " + m.name;
                    check_identifier(m.name, mctx, "method");
                    if (!method_names.insert(m.name).second) {
                        fail(mctx, "duplicate method name '" + m.name + "'");
                    }
                    std::unordered_set<Name> location_names;
                    for (const auto& l : m.locations) {
                        check_identifier(l, mctx, "location");
                        if (!location_names.insert(l).second) {
                            fail(mctx, "duplicate location name '" + l + "'");
                        }
                    }
                }
            }
        }
    }

    void check_structure() {
        for (const auto& b : def_.bundles) {
            std::string bctx = "bundle " + b.name;
            const ObjectDef* act = b.find_object(b.activator);
            if (act == nullptr) {
                fail(bctx, "activator '" + b.activator + "' is not an object of the bundle");
            } else {
                if (!act->initially_present) {
                    fail(bctx, "activator object '" + act->name + "' must be initially present");
                }
                if (act->find_method("start") == nullptr) {
                    fail(bctx, "activator object '" + act->name + "' lacks a 'start' method");
                }
                if (act->find_method("stop") == nullptr) {
                    fail(bctx, "activator object '" + act->name + "' lacks a 'stop' method");
                }
            }
            for (const auto& o : b.objects) {
                for (const auto& m : o.methods) {
                    std::string mctx = bctx + " / object " + o.name + " / method " + m.name;
                    if (!m.has_location(m.initial)) {
                        fail(mctx, "initial location '" + m.initial + "' is not declared");
                    }
                    for (std::size_t i = 0; i < m.edges.size(); ++i) {
                        const Edge& e = m.edges[i];
                        std::string ectx = mctx + " / edge " + std::to_string(i);
                        if (!m.has_location(e.source)) {
                            fail(ectx, "edge source '" + e.source + "' is not a declared location");
                        }
                        if (!m.has_location(e.target)) {
                            fail(ectx, "edge target '" + e.target + "' is not a declared location");
                        }
                    }
                }
            }
        }
        const BundleDef* init = def_.find_bundle(def_.init_bundle);
        if (init == nullptr) {
            fail("system", "init bundle '" + def_.init_bundle + "' is not declared");
        } else if (!init->initially_present) {
            fail("system", "init bundle '" + def_.init_bundle + "' must be initially present");
        }
    }

    // Closed world plus the same-bundle rule for create/delete.
    void check_action(const Action& a, const std::string& context, const Name& owning_bundle) {
        switch (a.kind) {
            case ActionKind::Call:
                if (def_.find_bundle(a.bundle) == nullptr) {
                    fail(context, "call targets undeclared bundle '" + a.bundle + "'");
                } else if (def_.find_object(a.bundle, a.object) == nullptr) {
                    fail(context, "call targets undeclared object '" + a.object + "' in bundle '" +
                                      a.bundle + "'");
                } else if (def_.find_method(a.bundle, a.object, a.method) == nullptr) {
                    fail(context, "call targets undeclared method '" + a.method + "' of object '" +
                                      a.object + "'");
                }
                break;
            case ActionKind::AddBundle:
            case ActionKind::RemoveBundle:
                if (def_.find_bundle(a.bundle) == nullptr) {
                    fail(context, "structural action targets undeclared bundle '" + a.bundle + "'");
                }
                break;
            case ActionKind::CreateObject:
            case ActionKind::DeleteObject:
                if (def_.find_object(a.bundle, a.object) == nullptr) {
                    fail(context, "structural action targets undeclared object '" + a.object +
                                      "' in bundle '" + a.bundle + "'");
                }
                if (!owning_bundle.empty() && a.bundle != owning_bundle) {
                    fail(context, "objects may only be created or deleted in the method's own "
                                  "bundle ('" +
                                      owning_bundle + "'), not '" + a.bundle + "'");
                }
                break;
        }
    }

    void check_actions() {
        for (const auto& b : def_.bundles) {
            for (const auto& o : b.objects) {
                for (const auto& m : o.methods) {
                    for (std::size_t i = 0; i < m.edges.size(); ++i) {
                        std::string ectx = "bundle " + b.name + " / object " + o.name +
                                           " / method " + m.name + " / edge " + std::to_string(i);
                        for (const auto& a : m.edges[i].actions) {
                            check_action(a, ectx, b.name);
                        }
                    }
                }
            }
        }
        for (std::size_t i = 0; i < def_.environment.size(); ++i) {
            const Action& a = def_.environment[i];
            std::string ectx = "environment action " + std::to_string(i);
            if (a.kind != ActionKind::AddBundle && a.kind != ActionKind::RemoveBundle) {
                fail(ectx, "environment actions may only add or remove bundles");
                continue;
            }
            check_action(a, ectx, Name{});
        }
    }

    const SystemDef& def_;
    std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate(const SystemDef& def) { return Validator(def).run(); }

RuntimeConfig initial_state(const SystemDef& def) {
    auto diags = validate(def);
    if (has_errors(diags)) {
        throw std::invalid_argument("initial_state: definition is not valid: " +
                                    to_string(diags.front()));
    }
    RuntimeConfig cfg;
    for (const auto& b : def.bundles) {
        if (!b.initially_present) continue;
        cfg.present_bundles.insert(b.name);
        for (const auto& o : b.objects) {
            if (o.initially_present) cfg.present_objects.insert({b.name, o.name});
        }
    }
    const BundleDef* init = def.find_bundle(def.init_bundle);
    const ObjectDef* activator = init->find_object(init->activator);
    const MethodDef* start = activator->find_method("start");
    cfg.statuses.push_back(
        MethodStatus{start->name, activator->name, init->name, start->initial, 0, {}});
    cfg.next_id = 1;
    return cfg;
}

}  // namespace osgilab
