#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "osgilab/explore.hpp"
#include "osgilab/semantics.hpp"
#include "support/fixtures.hpp"

using namespace osgilab;
using testsupport::load_model;

namespace {

ObjectDef activator_object(Name name, MethodDef start) {
    MethodDef stop{"stop", {"stop0"}, "stop0", {}};
    return ObjectDef{std::move(name), {std::move(start), stop}, true};
}

RuntimeConfig step(const SystemDef& def, const RuntimeConfig& cfg, const TransitionInstance& t) {
    return apply(def, cfg, t).config;
}

}  // namespace

TEST_CASE("the startup path, step by step") {
    SystemDef def = load_model("startup.osgi");
    RuntimeConfig cfg = initial_state(def);

    CHECK(enabled(def, cfg) == std::vector<TransitionInstance>{TransitionInstance::fire(0, 0)});
    CHECK(classify(def, cfg) == Classification{RunState::Running, {}});

    StepResult r = apply(def, cfg, TransitionInstance::fire(0, 0));
    CHECK(r.events == std::vector<Event>{out("create", "service1")});
    CHECK(r.config.object_present("servicebundle", "service1"));
    CHECK(r.config.statuses[0].location == "l1");
    cfg = r.config;

    // the call blocks the caller and spawns the callee at its initial location
    CHECK(enabled(def, cfg) == std::vector<TransitionInstance>{TransitionInstance::fire(0, 1)});
    r = apply(def, cfg, TransitionInstance::fire(0, 1));
    CHECK(r.events == std::vector<Event>{out("initialize", "service1")});
    cfg = r.config;
    REQUIRE(cfg.statuses.size() == 2);
    CHECK(cfg.statuses[0].location == "l2");
    CHECK(cfg.statuses[0].call_state ==
          std::vector<CallStateEntry>{{"initialize", "service1", "servicebundle", 1}});
    CHECK(cfg.statuses[1] ==
          MethodStatus{"initialize", "service1", "servicebundle", "i0", 1, {}});
    CHECK(cfg.next_id == 2);

    // only the callee may move while the caller's call state is nonempty
    CHECK(enabled(def, cfg) == std::vector<TransitionInstance>{TransitionInstance::fire(1, 0)});
    r = apply(def, cfg, TransitionInstance::fire(1, 0));
    CHECK(r.events.empty());  // the edge carries no actions
    cfg = r.config;

    // i1 has no outgoing edges, so the callee may only return
    CHECK(enabled(def, cfg) == std::vector<TransitionInstance>{TransitionInstance::ret(1)});
    r = apply(def, cfg, TransitionInstance::ret(1));
    CHECK(r.events == std::vector<Event>{out("return", "initialize")});
    cfg = r.config;
    REQUIRE(cfg.statuses.size() == 1);
    CHECK(cfg.statuses[0].call_state.empty());  // unblocked by the return

    cfg = step(def, cfg, TransitionInstance::fire(0, 2));
    CHECK_FALSE(cfg.object_present("servicebundle", "service1"));

    CHECK(enabled(def, cfg) == std::vector<TransitionInstance>{TransitionInstance::ret(0)});
    r = apply(def, cfg, TransitionInstance::ret(0));
    CHECK(r.events == std::vector<Event>{out("return", "start")});
    cfg = r.config;
    CHECK(cfg.statuses.empty());
    CHECK(classify(def, cfg) == Classification{RunState::Quiescent, {}});
}

TEST_CASE("merged edges perform their action lists atomically, in order") {
    SUBCASE("create, call, delete on one edge kills the fresh callee") {
        MethodDef start{"start",
                        {"h0", "h1"},
                        "h0",
                        {Edge{"h0", "h1",
                              {Action::create_object("tmp", "host"),
                               Action::call("ping", "tmp", "host"),
                               Action::delete_object("tmp", "host")}}}};
        ObjectDef tmp{"tmp", {MethodDef{"ping", {"p0"}, "p0", {}}}, false};
        SystemDef def{"merged", {BundleDef{"host", "act",
                                           {activator_object("act", start), tmp}, true}},
                      "host", {}};
        REQUIRE(validate(def).empty());

        RuntimeConfig cfg = initial_state(def);
        CHECK(enabled(def, cfg) ==
              std::vector<TransitionInstance>{TransitionInstance::fire(0, 0)});
        StepResult r = apply(def, cfg, TransitionInstance::fire(0, 0));
        CHECK(r.events == std::vector<Event>{out("create", "tmp"), out("ping", "tmp"),
                                             out("delete", "tmp")});
        cfg = r.config;
        CHECK_FALSE(cfg.object_present("host", "tmp"));
        REQUIRE(cfg.statuses.size() == 1);  // the callee was killed by the delete
        CHECK(cfg.statuses[0].call_state ==
              std::vector<CallStateEntry>{{"ping", "tmp", "host", 1}});  // dangling
        CHECK(cfg.next_id == 2);
        CHECK(classify(def, cfg) ==
              Classification{RunState::Deadlocked, {0}});  // waits forever
    }
    SUBCASE("an edge whose dry run fails is simply not enabled") {
        MethodDef start{"start", {"h0", "h1"}, "h0",
                        {Edge{"h0", "h1", {Action::call("ping", "tmp", "host")}}}};
        ObjectDef tmp{"tmp", {MethodDef{"ping", {"p0"}, "p0", {}}}, false};  // absent
        SystemDef def{"gate", {BundleDef{"host", "act",
                                         {activator_object("act", start), tmp}, true}},
                      "host", {}};
        REQUIRE(validate(def).empty());

        RuntimeConfig cfg = initial_state(def);
        CHECK(enabled(def, cfg).empty());  // cannot fire, cannot return (h0 has an edge)
        CHECK(classify(def, cfg) == Classification{RunState::Deadlocked, {0}});
    }
    SUBCASE("an add earlier in the list satisfies a later call") {
        MethodDef start{"start", {"m0", "m1"}, "m0",
                        {Edge{"m0", "m1",
                              {Action::add_bundle("ext"), Action::call("run", "obj", "ext")}}}};
        ObjectDef obj{"obj", {MethodDef{"run", {"r0", "r1"}, "r0", {Edge{"r0", "r1", {}}}}},
                      true};
        SystemDef def{"addcall",
                      {BundleDef{"main", "act", {activator_object("act", start)}, true},
                       BundleDef{"ext", "extact",
                                 {activator_object("extact", MethodDef{"start", {"e0"}, "e0", {}}),
                                  obj},
                                 false}},
                      "main", {}};
        REQUIRE(validate(def).empty());

        RuntimeConfig cfg = initial_state(def);
        StepResult r = apply(def, cfg, TransitionInstance::fire(0, 0));
        CHECK(r.events == std::vector<Event>{out("add", "ext"), out("run", "obj")});
        cfg = r.config;
        REQUIRE(cfg.statuses.size() == 3);
        // the spawned activator start (id 1) is awaited by nobody
        CHECK(cfg.statuses[1] == MethodStatus{"start", "extact", "ext", "e0", 1, {}});
        // the caller waits only on the called method (id 2)
        CHECK(cfg.statuses[0].call_state ==
              std::vector<CallStateEntry>{{"run", "obj", "ext", 2}});
        CHECK(cfg.statuses[2] == MethodStatus{"run", "obj", "ext", "r0", 2, {}});
        CHECK(cfg.next_id == 3);
    }
}

TEST_CASE("a method removing its own bundle mid-edge") {
    ObjectDef helper{"helper",
                     {MethodDef{"serve", {"v0", "v1"}, "v0", {Edge{"v0", "v1", {}}}}}, true};
    BundleDef aux{"aux", "auxact",
                  {activator_object("auxact", MethodDef{"start", {"a0"}, "a0", {}}), helper},
                  true};

    SUBCASE("later calls still spawn, but nobody records the wait") {
        MethodDef start{"start", {"s0", "s1"}, "s0",
                        {Edge{"s0", "s1",
                              {Action::remove_bundle("solo"),
                               Action::call("serve", "helper", "aux")}}}};
        SystemDef def{"selfrm",
                      {BundleDef{"solo", "act", {activator_object("act", start)}, true}, aux},
                      "solo", {}};
        REQUIRE(validate(def).empty());

        RuntimeConfig cfg = initial_state(def);
        StepResult r = apply(def, cfg, TransitionInstance::fire(0, 0));
        CHECK(r.events == std::vector<Event>{out("remove", "solo"), out("serve", "helper")});
        cfg = r.config;
        CHECK_FALSE(cfg.bundle_present("solo"));
        REQUIRE(cfg.statuses.size() == 1);
        CHECK(cfg.statuses[0] == MethodStatus{"serve", "helper", "aux", "v0", 1, {}});

        // the orphaned callee runs to completion on its own
        cfg = step(def, cfg, TransitionInstance::fire(1, 0));
        cfg = step(def, cfg, TransitionInstance::ret(1));
        CHECK(classify(def, cfg) == Classification{RunState::Quiescent, {}});
    }
    SUBCASE("remove then add restarts the bundle with a fresh activator") {
        MethodDef start{"start", {"s0", "s1"}, "s0",
                        {Edge{"s0", "s1",
                              {Action::remove_bundle("solo"), Action::add_bundle("solo")}}}};
        SystemDef def{"rebirth",
                      {BundleDef{"solo", "act", {activator_object("act", start)}, true}},
                      "solo", {}};
        REQUIRE(validate(def).empty());

        RuntimeConfig cfg = initial_state(def);
        StepResult r = apply(def, cfg, TransitionInstance::fire(0, 0));
        CHECK(r.events == std::vector<Event>{out("remove", "solo"), out("add", "solo")});
        cfg = r.config;
        CHECK(cfg.bundle_present("solo"));
        REQUIRE(cfg.statuses.size() == 1);
        CHECK(cfg.statuses[0] == MethodStatus{"start", "act", "solo", "s0", 1, {}});
        CHECK(cfg.next_id == 2);
    }
}

TEST_CASE("bundle removal kills statuses and leaves the caller hanging") {
    SystemDef def = load_model("remove_hazard.osgi");
    RuntimeConfig cfg = initial_state(def);

    StepResult r = apply(def, cfg, TransitionInstance::fire(0, 0));
    CHECK(r.events ==
          std::vector<Event>{out("serve", "worker"), out("sabotage", "mainobj")});
    cfg = r.config;
    REQUIRE(cfg.statuses.size() == 3);
    CHECK(cfg.statuses[0].call_state ==
          std::vector<CallStateEntry>{{"serve", "worker", "helperbundle", 1},
                                      {"sabotage", "mainobj", "mainbundle", 2}});
    CHECK(enabled(def, cfg) ==
          std::vector<TransitionInstance>{TransitionInstance::fire(1, 0),
                                          TransitionInstance::fire(2, 0)});

    SUBCASE("the removal wins the race") {
        cfg = step(def, cfg, TransitionInstance::fire(2, 0));  // remove helperbundle
        CHECK_FALSE(cfg.bundle_present("helperbundle"));
        CHECK_FALSE(cfg.object_present("helperbundle", "worker"));
        REQUIRE(cfg.statuses.size() == 2);  // worker's status was killed
        CHECK(cfg.find_status(1) == nullptr);
        // the caller still holds both entries: one dangling, one live
        CHECK(cfg.statuses[0].call_state.size() == 2);

        cfg = step(def, cfg, TransitionInstance::ret(2));
        CHECK(cfg.statuses[0].call_state ==
              std::vector<CallStateEntry>{{"serve", "worker", "helperbundle", 1}});
        CHECK(enabled(def, cfg).empty());
        CHECK(classify(def, cfg) == Classification{RunState::Deadlocked, {0}});
    }
    SUBCASE("the worker finishes first") {
        cfg = step(def, cfg, TransitionInstance::fire(1, 0));
        cfg = step(def, cfg, TransitionInstance::ret(1));
        cfg = step(def, cfg, TransitionInstance::fire(2, 0));
        cfg = step(def, cfg, TransitionInstance::ret(2));
        CHECK(cfg.statuses[0].call_state.empty());
        cfg = step(def, cfg, TransitionInstance::ret(0));  // m1 has no outgoing edges
        CHECK(classify(def, cfg) == Classification{RunState::Quiescent, {}});
    }
}

TEST_CASE("environment actions are gated on presence") {
    SystemDef def = load_model("env_remove.osgi");
    RuntimeConfig cfg = initial_state(def);

    auto remove_aux = TransitionInstance::environment(Action::remove_bundle("auxbundle"));
    auto add_aux = TransitionInstance::environment(Action::add_bundle("auxbundle"));

    CHECK(enabled(def, cfg) ==
          std::vector<TransitionInstance>{TransitionInstance::fire(0, 0), remove_aux});

    cfg = step(def, cfg, remove_aux);
    CHECK_FALSE(cfg.bundle_present("auxbundle"));
    CHECK(enabled(def, cfg) ==
          std::vector<TransitionInstance>{TransitionInstance::fire(0, 0), add_aux});

    StepResult r = apply(def, cfg, add_aux);
    CHECK(r.events == std::vector<Event>{out("add", "auxbundle")});
    cfg = r.config;
    CHECK(cfg.bundle_present("auxbundle"));
    REQUIRE(cfg.statuses.size() == 2);  // re-adding spawned auxbundle's activator start
    CHECK(cfg.statuses[1] == MethodStatus{"start", "auxobj", "auxbundle", "a0", 1, {}});

    // removing again kills that spawned status
    cfg = step(def, cfg, remove_aux);
    REQUIRE(cfg.statuses.size() == 1);
    CHECK(cfg.statuses[0].bundle == "corebundle");
}

TEST_CASE("apply rejects transitions that are not enabled") {
    SystemDef def = load_model("startup.osgi");
    RuntimeConfig cfg = initial_state(def);

    CHECK_THROWS_WITH_AS(apply(def, cfg, TransitionInstance::fire(0, 5)),
                         "apply: transition is not enabled", std::invalid_argument);
    // l0 has an outgoing edge, so returning is not allowed
    CHECK_THROWS_AS(apply(def, cfg, TransitionInstance::ret(0)), std::invalid_argument);
    // no such status
    CHECK_THROWS_AS(apply(def, cfg, TransitionInstance::fire(9, 0)), std::invalid_argument);
    // no environment actions in this model
    CHECK_THROWS_AS(
        apply(def, cfg, TransitionInstance::environment(Action::add_bundle("servicebundle"))),
        std::invalid_argument);
}

TEST_CASE("independent transitions commute") {
    SUBCASE("a hand-built diamond closes exactly") {
        MethodDef a_start{"start", {"a0", "a1", "a2"}, "a0",
                          {Edge{"a0", "a1", {Action::add_bundle("bb")}},
                           Edge{"a1", "a2", {}}}};
        MethodDef b_start{"start", {"b0", "b1"}, "b0", {Edge{"b0", "b1", {}}}};
        SystemDef def{"diamond",
                      {BundleDef{"aa", "aact", {activator_object("aact", a_start)}, true},
                       BundleDef{"bb", "bact", {activator_object("bact", b_start)}, false}},
                      "aa", {}};
        REQUIRE(validate(def).empty());

        RuntimeConfig cfg = step(def, initial_state(def), TransitionInstance::fire(0, 0));
        REQUIRE(cfg.statuses.size() == 2);

        RuntimeConfig left = step(def, step(def, cfg, TransitionInstance::fire(0, 1)),
                                  TransitionInstance::fire(1, 0));
        RuntimeConfig right = step(def, step(def, cfg, TransitionInstance::fire(1, 0)),
                                   TransitionInstance::fire(0, 1));
        CHECK(left == right);  // no allocation involved, so plain equality holds
    }
    SUBCASE("any pair enabled in both orders meets up to id renaming") {
        for (const char* name : {"file_actions.osgi", "env_remove.osgi"}) {
            CAPTURE(name);
            SystemDef def = load_model(name);
            Exploration g = explore_graph(def, Bounds{std::nullopt, 60});
            std::size_t pairs = 0;
            for (const auto& node : g.nodes) {
                auto opts = enabled(def, node.config);
                for (std::size_t i = 0; i < opts.size(); ++i) {
                    for (std::size_t j = i + 1; j < opts.size(); ++j) {
                        // same-status pairs may genuinely conflict; skip them
                        if (opts[i].kind != TransitionKind::Environment &&
                            opts[j].kind != TransitionKind::Environment &&
                            opts[i].status == opts[j].status) {
                            continue;
                        }
                        RuntimeConfig after_i = step(def, node.config, opts[i]);
                        RuntimeConfig after_j = step(def, node.config, opts[j]);
                        auto en_i = enabled(def, after_i);
                        auto en_j = enabled(def, after_j);
                        bool ij = std::find(en_i.begin(), en_i.end(), opts[j]) != en_i.end();
                        bool ji = std::find(en_j.begin(), en_j.end(), opts[i]) != en_j.end();
                        if (!ij || !ji) continue;
                        RuntimeConfig one = canonicalize(step(def, after_i, opts[j]));
                        RuntimeConfig two = canonicalize(step(def, after_j, opts[i]));
                        CHECK(one == two);
                        ++pairs;
                    }
                }
            }
            CHECK(pairs > 0);  // the sweep actually exercised something
        }
    }
}

TEST_CASE("transition and action rendering") {
    CHECK(to_string(Action::call("m", "o", "b")) == "call m.o@b");
    CHECK(to_string(Action::add_bundle("b")) == "add b");
    CHECK(to_string(Action::remove_bundle("b")) == "remove b");
    CHECK(to_string(Action::create_object("o", "b")) == "create o@b");
    CHECK(to_string(Action::delete_object("o", "b")) == "delete o@b");

    CHECK(to_string(inc("Lock")) == "INC:Lock");
    CHECK(to_string(out("Lock", "f1")) == "OUT:Lock(f1)");

    SystemDef def = load_model("remove_hazard.osgi");
    RuntimeConfig cfg = initial_state(def);
    CHECK(describe(def, cfg, TransitionInstance::fire(0, 0)) ==
          "fire #0 start.mainobj@mainbundle m0 -> m1 "
          "[call serve.worker@helperbundle, call sabotage.mainobj@mainbundle]");

    cfg = step(def, cfg, TransitionInstance::fire(0, 0));
    CHECK(describe(def, cfg, TransitionInstance::fire(1, 0)) ==
          "fire #1 serve.worker@helperbundle w0 -> w1");

    cfg = step(def, cfg, TransitionInstance::fire(1, 0));
    CHECK(describe(def, cfg, TransitionInstance::ret(1)) ==
          "return #1 serve.worker@helperbundle");

    SystemDef envdef = load_model("env_remove.osgi");
    RuntimeConfig envcfg = initial_state(envdef);
    CHECK(describe(envdef, envcfg,
                   TransitionInstance::environment(Action::remove_bundle("auxbundle"))) ==
          "env remove auxbundle");
}
