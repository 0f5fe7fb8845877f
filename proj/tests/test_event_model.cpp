// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "memorepair/candidate.hpp"
#include "memorepair/event.hpp"
#include "memorepair/graph.hpp"

using namespace memorepair;

namespace {

Artifact record(const ArtifactId& id) {
    Artifact a;
    a.id = id;
    a.kind = ArtifactKind::Record;
    return a;
}

ProvenanceGraph three_nodes() {
    ProvenanceGraph g;
    for (const char* id : {"a", "b", "c"}) g.add_artifact(record(id));
    g.add_influence_edge("a", "b");
    return g;
}

}  // namespace

TEST_CASE("event shape validation") {
    RepairEvent e;
    CHECK_THROWS(validate_event(e));  // empty roots

    e.roots = {"a"};
    e.type = EventType::Correct;
    CHECK_THROWS(validate_event(e));  // correction without replacements

    e.type = EventType::Delete;
    ReplacementSpec rep;
    rep.replaces_root = "a";
    e.replacements.push_back(rep);
    CHECK_THROWS(validate_event(e));  // replacements only for corrections

    e.type = EventType::Correct;
    CHECK_NOTHROW(validate_event(e));
}

TEST_CASE("retained support per event type") {
    ProvenanceGraph g = three_nodes();
    std::set<ArtifactId> affected{"a", "b"};

    RepairEvent del;
    del.roots = {"a"};
    del.type = EventType::Delete;
    CHECK(retained_support(g, del, affected, {}).members == std::set<ArtifactId>{"c"});

    RepairEvent mig;
    mig.roots = {"a"};
    mig.type = EventType::Migrate;
    CHECK(retained_support(g, mig, g.all_ids(), {}).members.empty());

    RepairEvent cor;
    cor.roots = {"a"};
    cor.type = EventType::Correct;
    ReplacementSpec rep;
    rep.replaces_root = "a";
    cor.replacements.push_back(rep);
    auto replacements = materialize_replacements(cor, g);
    REQUIRE(replacements.size() == 1);
    CHECK(replacements[0].id == "a-corrected-v1");
    CHECK(replacements[0].replaces == ArtifactId("a"));
    RetainedSupport ret = retained_support(g, cor, affected, {replacements[0].id});
    CHECK(ret.members == std::set<ArtifactId>{"c", "a-corrected-v1"});
    // Disjoint from the cascade in the post-event universe.
    for (const auto& m : ret.members) CHECK(!affected.count(m));
}

TEST_CASE("post_interface: migration rewrites and bumps, others identity") {
    InterfaceContract k;
    k.entries = {{"depart_date", "legacy"}, {"endpoint", "v1"}};
    k.version = 1;

    RepairEvent mig;
    mig.roots = {"a"};
    mig.type = EventType::Migrate;
    mig.contract_delta = {{"depart_date", "YYYY-MM-DD"}};
    InterfaceContract after = post_interface(k, mig);
    CHECK(after.version == 2);
    CHECK(after.entries.at("depart_date") == "YYYY-MM-DD");
    CHECK(after.entries.at("endpoint") == "v1");

    RepairEvent del;
    del.roots = {"a"};
    del.type = EventType::Delete;
    InterfaceContract same = post_interface(k, del);
    CHECK(same.version == 1);
    CHECK(same.entries == k.entries);
    // Idempotent for delete/correct.
    InterfaceContract again = post_interface(same, del);
    CHECK(again.version == same.version);
    CHECK(again.entries == same.entries);

    RepairEvent empty_mig;
    empty_mig.roots = {"a"};
    empty_mig.type = EventType::Migrate;
    InterfaceContract bumped = post_interface(k, empty_mig);
    CHECK(bumped.version == 2);  // version strictly increases on migration
    CHECK(bumped.entries == k.entries);

    RepairEvent bad;
    bad.roots = {"a"};
    bad.type = EventType::Migrate;
    bad.contract_delta = {{"unknown_key", "x"}};
    CHECK_THROWS(post_interface(k, bad));
}

TEST_CASE("replacement materialization rejects id collisions") {
    ProvenanceGraph g = three_nodes();
    RepairEvent cor;
    cor.roots = {"a"};
    cor.type = EventType::Correct;
    ReplacementSpec rep;
    rep.replaces_root = "a";
    rep.id = "b";  // already present
    cor.replacements.push_back(rep);
    CHECK_THROWS(materialize_replacements(cor, g));
}

TEST_CASE("event json round-trip") {
    RepairEvent e;
    e.roots = {"tool"};
    e.type = EventType::Correct;
    ReplacementSpec rep;
    rep.replaces_root = "tool";
    rep.version = 2;
    rep.schema = {{"depart_date", "iso"}};
    rep.examples_for = {{"skill", {"ex1", "ex2"}}};
    e.replacements.push_back(rep);

    RepairEvent back = event_from_json(event_to_json(e));
    CHECK(back.roots == e.roots);
    CHECK(back.type == EventType::Correct);
    REQUIRE(back.replacements.size() == 1);
    CHECK(back.replacements[0].schema.at("depart_date") == "iso");
    CHECK(back.replacements[0].examples_for.at("skill").size() == 2);
}

TEST_CASE("prepare_repair wires cascade, replacements, and contract together") {
    ProvenanceGraph g = three_nodes();
    RepairEvent cor;
    cor.roots = {"a"};
    cor.type = EventType::Correct;
    ReplacementSpec rep;
    rep.replaces_root = "a";
    rep.version = 3;
    cor.replacements.push_back(rep);

    InterfaceContract k;
    k.entries = {{"endpoint", "v1"}};
    RepairContext ctx = prepare_repair(g, cor, k);
    CHECK(ctx.affected == std::set<ArtifactId>{"a", "b"});
    CHECK(ctx.descendants == std::set<ArtifactId>{"b"});
    CHECK(ctx.replacement_ids == std::set<ArtifactId>{"a-corrected-v3"});
    CHECK(g.has("a-corrected-v3"));
    CHECK(ctx.retained.members.count("a-corrected-v3"));
    CHECK(ctx.retained.members.count("c"));
    CHECK(!ctx.retained.members.count("b"));
}
