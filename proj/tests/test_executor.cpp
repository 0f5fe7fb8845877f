// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>

#include "memorepair/executor.hpp"
#include "memorepair/workload.hpp"

using namespace memorepair;

namespace {

Artifact node(const ArtifactId& id, ArtifactKind kind,
              std::optional<SkillArch> arch = std::nullopt) {
    Artifact a;
    a.id = id;
    a.kind = kind;
    a.arch = arch;
    return a;
}

struct Bench {
    ProvenanceGraph g;
    RepairEvent event;
    InterfaceContract contract;
    std::map<ArtifactId, CandidateInputs> inputs;
    ExampleProvenance provenance;
    Cluster cluster;

    Bench() {
        for (int i = 0; i < 3; ++i) cluster.add_replica("r" + std::to_string(i), 0);
    }

    RepairPlan run(const ExecOptions& options, CandidateFamily* family_out = nullptr) {
        cluster.seed(g.all_ids());
        RepairContext ctx = prepare_repair(g, event, contract);
        CandidateFamily family = build_family(ctx, inputs, provenance, ScoringParams{});
        RepairPlan plan = execute_plan(g, ctx, family, cluster, inputs, provenance, options);
        if (family_out) *family_out = family;
        return plan;
    }
};

// root -> a -> b chain where both a and b are repairable; a's checks are
// controlled by the caller.
Bench chain_bench(bool a_fails) {
    Bench b;
    b.g.add_artifact(node("bg", ArtifactKind::Record));
    b.g.add_artifact(node("root", ArtifactKind::Record));
    b.g.add_artifact(node("a", ArtifactKind::Cache));
    b.g.add_artifact(node("b", ArtifactKind::Cache));
    b.g.add_influence_edge("root", "a");
    b.g.add_influence_edge("a", "b");
    b.event.roots = {"root"};
    b.event.type = EventType::Delete;

    CandidateInputs a_in;
    a_in.replay = ReplayTrace{{"bg"}, {}};
    a_in.resources.tool = 2;
    a_in.trace.uses = 2;
    if (a_fails) a_in.checks.probes = {false};
    b.inputs["a"] = a_in;

    CandidateInputs b_in;
    b_in.replay = ReplayTrace{{"a", "bg"}, {}};
    b_in.resources.tool = 2;
    b_in.trace.uses = 2;
    b.inputs["b"] = b_in;
    return b;
}

}  // namespace

TEST_CASE("topological order: edge, tie-break, diamond, cycle") {
    std::vector<std::pair<ArtifactId, ArtifactId>> edges{{"j", "i"}};
    CHECK(topological_order({"i", "j"}, edges) == std::vector<ArtifactId>{"j", "i"});

    CHECK(topological_order({"b", "a"}, {}) == std::vector<ArtifactId>{"a", "b"});

    std::vector<std::pair<ArtifactId, ArtifactId>> diamond{
        {"j", "a"}, {"j", "b"}, {"a", "i"}, {"b", "i"}};
    auto order = topological_order({"i", "j", "a", "b"}, diamond);
    auto pos = [&](const ArtifactId& id) {
        return std::find(order.begin(), order.end(), id) - order.begin();
    };
    CHECK(pos("j") == 0);
    CHECK(pos("i") == 3);
    CHECK(pos("a") < pos("i"));
    CHECK(pos("b") < pos("i"));

    std::vector<std::pair<ArtifactId, ArtifactId>> cyc{{"x", "y"}, {"y", "x"}};
    CHECK_THROWS_AS(topological_order({"x", "y"}, cyc), std::logic_error);
}

TEST_CASE("withdraw issues the barrier and proceeds despite fencing") {
    Cluster cluster;
    cluster.add_replica("fast", 0);
    cluster.add_replica("slow", 9);
    cluster.t_ack = 2;
    cluster.seed({"a"});
    BarrierOutcome out = withdraw({"a"}, cluster);
    CHECK(out.acked == std::set<std::string>{"fast"});
    CHECK(out.fenced == std::set<std::string>{"slow"});
    CHECK(!cluster.any_serving_visible("a"));
}

TEST_CASE("execute_plan: clean run republishes the validated chain") {
    Bench bench = chain_bench(/*a_fails=*/false);
    ExecOptions options;
    CandidateFamily family;
    RepairPlan plan = bench.run(options, &family);

    CHECK(plan.rounds == 1);
    REQUIRE(plan.republished.size() == 2);
    CHECK(plan.republished[0].first == "a");
    CHECK(plan.republished[1].first == "b");
    CHECK(plan.quarantined.empty());
    CHECK(plan.charged == std::set<ArtifactId>{"a", "b"});
    // Realized cost covers the whole executable mass here.
    CHECK(plan.realized_cost > Rational(999, 1000));

    // Successors exist, carry replaces links, and are visible; originals are
    // withdrawn everywhere.
    const ArtifactId& succ_a = plan.republished[0].second;
    CHECK(bench.g.has(succ_a));
    CHECK(bench.g.get(succ_a).replaces == ArtifactId("a"));
    CHECK(bench.cluster.any_serving_visible(succ_a));
    CHECK(!bench.cluster.any_serving_visible("a"));
    CHECK(!bench.cluster.any_serving_visible("root"));
    CHECK(bench.g.get("a").state == ArtifactState::Withdrawn);
    CHECK(bench.g.get("root").state == ArtifactState::Removed);

    // The successor of b consumes the successor of a, not the original.
    const SuccessorDraft& draft_b = plan.staged.at("b");
    CHECK(draft_b.declared_parents.count(succ_a));
    CHECK(!draft_b.declared_parents.count("a"));

    CHECK(plan.dispositions.at("a") == "published");
    CHECK(plan.dispositions.at("b") == "published");
}

TEST_CASE("execute_plan: validation failure quarantines and keeps dependents withdrawn") {
    Bench bench = chain_bench(/*a_fails=*/true);
    ExecOptions options;
    RepairPlan plan = bench.run(options);

    // Round 1: a executes and fails, b is skipped unexecuted. Round 2: empty
    // or b alone infeasible -> selection drops it; loop ends clean.
    CHECK(plan.republished.empty());
    CHECK(plan.quarantined == std::set<ArtifactId>{"a", "b"});
    CHECK(plan.charged == std::set<ArtifactId>{"a"});  // b never executed
    CHECK(plan.rounds >= 2);
    CHECK(plan.dispositions.at("a") == "quarantined");
    CHECK(plan.dispositions.at("b") == "quarantined");
    CHECK(bench.g.get("a").state == ArtifactState::Quarantined);
    CHECK(!bench.cluster.any_serving_visible("a"));
    CHECK(!bench.cluster.any_serving_visible("b"));

    // Cost accounting: executed-but-failed attempts are charged, skipped
    // candidates are not. c~_a = 2 of a total 4 over E0.
    Rational a_cost = Rational(2, 1) / (Rational(4, 1) + Rational(1, 1000000000));
    CHECK(plan.realized_cost == a_cost);
}

TEST_CASE("execute_plan: single always-fail candidate terminates in two rounds") {
    Bench bench;
    bench.g.add_artifact(node("bg", ArtifactKind::Record));
    bench.g.add_artifact(node("root", ArtifactKind::Record));
    bench.g.add_artifact(node("only", ArtifactKind::Cache));
    bench.g.add_influence_edge("root", "only");
    bench.event.roots = {"root"};
    bench.event.type = EventType::Delete;
    CandidateInputs in;
    in.replay = ReplayTrace{{"bg"}, {}};
    in.resources.tool = 1;
    in.checks.probes = {false};
    bench.inputs["only"] = in;

    RepairPlan plan = bench.run(ExecOptions{});
    CHECK(plan.rounds == 2);
    CHECK(plan.charged == std::set<ArtifactId>{"only"});
    CHECK(plan.republished.empty());
    // The failed attempt is charged: cost equals its full normalized share.
    CHECK(plan.realized_cost > Rational(0, 1));
}

TEST_CASE("execute_plan: remove-mode descendants are deleted, not selected") {
    Bench bench;
    bench.g.add_artifact(node("root", ArtifactKind::Record));
    bench.g.add_artifact(node("orphan", ArtifactKind::Record));
    bench.g.add_influence_edge("root", "orphan");
    bench.event.roots = {"root"};
    bench.event.type = EventType::Delete;
    // No inputs for orphan: mode remove.

    RepairPlan plan = bench.run(ExecOptions{});
    CHECK(plan.dispositions.at("orphan") == "removed");
    CHECK(bench.g.get("orphan").state == ArtifactState::Removed);
    CHECK(!bench.cluster.any_serving_visible("orphan"));
    CHECK(plan.realized_cost == Rational(0, 1));
}

TEST_CASE("selector kinds: nothing vs everything vs min-cut") {
    SUBCASE("barrier only") {
        Bench bench = chain_bench(false);
        ExecOptions options;
        options.selector = SelectorKind::Nothing;
        RepairPlan plan = bench.run(options);
        CHECK(plan.republished.empty());
        CHECK(plan.charged.empty());
        CHECK(plan.realized_cost == Rational(0, 1));
        CHECK(plan.dispositions.at("a") == "not_selected");
        CHECK(!bench.cluster.any_serving_visible("a"));
    }
    SUBCASE("exhaustive attempts every executable candidate even mid-chain") {
        Bench bench = chain_bench(/*a_fails=*/true);
        ExecOptions options;
        options.selector = SelectorKind::Everything;
        options.attempt_without_staged = true;
        RepairPlan plan = bench.run(options);
        // b is executed with the hidden original as parent and fails the
        // precheck, so both are charged and quarantined.
        CHECK(plan.charged == std::set<ArtifactId>{"a", "b"});
        CHECK(plan.quarantined == std::set<ArtifactId>{"a", "b"});
        CHECK(plan.republished.empty());
        CHECK(plan.realized_cost > Rational(999, 1000));
        CHECK(plan.realized_cost <= Rational(1, 1));
    }
}

TEST_CASE("determinism: identical inputs give identical plans") {
    auto run_once = [] {
        Bench bench = chain_bench(false);
        RepairPlan plan = bench.run(ExecOptions{});
        return plan_to_json(plan);
    };
    CHECK(run_once() == run_once());
}

TEST_CASE("publication is predecessor-closed") {
    Bench bench = chain_bench(false);
    CandidateFamily family;
    RepairPlan plan = bench.run(ExecOptions{}, &family);
    std::set<ArtifactId> published;
    for (const auto& [t, s] : plan.republished) published.insert(t);
    for (const auto& [t, s] : plan.republished) {
        for (const auto& j : family.at(t).repairable_required) {
            CHECK(published.count(j));
        }
    }
}

TEST_CASE("event ordering: counter first, deletion outranks on ties") {
    EventTicket del;
    del.counter = 2;
    del.event.roots = {"r"};
    del.event.type = EventType::Delete;
    EventTicket cor;
    cor.counter = 1;
    cor.event.roots = {"r"};
    cor.event.type = EventType::Correct;
    CHECK(event_precedes(cor, del));  // earlier counter completes first

    cor.counter = 2;
    CHECK(event_precedes(del, cor));  // same counter: delete outranks

    EventTicket mig = cor;
    mig.event.type = EventType::Migrate;
    mig.event.contract_delta = {};
    mig.event.replacements.clear();
    CHECK(event_precedes(cor, mig));

    auto order = serialize_events({cor, del, mig});
    CHECK(order == std::vector<std::size_t>{1, 0, 2});
}

TEST_CASE("overlapping events on one store: sequential plans keep leak at zero") {
    // Two deletions whose cascades overlap on a shared descendant.
    ProvenanceGraph g;
    g.add_artifact(node("bg", ArtifactKind::Record));
    g.add_artifact(node("r1", ArtifactKind::Record));
    g.add_artifact(node("r2", ArtifactKind::Record));
    g.add_artifact(node("shared", ArtifactKind::Cache));
    g.add_artifact(node("d1", ArtifactKind::Cache));
    g.add_influence_edge("r1", "shared");
    g.add_influence_edge("r2", "shared");
    g.add_influence_edge("r1", "d1");

    Cluster cluster;
    cluster.add_replica("r0", 0);
    cluster.seed(g.all_ids());

    std::map<ArtifactId, CandidateInputs> inputs;
    CandidateInputs in;
    in.replay = ReplayTrace{{"bg"}, {}};
    in.resources.tool = 1;
    inputs["shared"] = in;
    inputs["d1"] = in;

    EventTicket e1;
    e1.counter = 7;
    e1.event.roots = {"r2"};
    e1.event.type = EventType::Delete;
    EventTicket e2;
    e2.counter = 3;
    e2.event.roots = {"r1"};
    e2.event.type = EventType::Delete;

    std::set<ArtifactId> affected_union;
    for (std::size_t idx : serialize_events({e1, e2})) {
        const RepairEvent& event = (idx == 0 ? e1 : e2).event;
        RepairContext ctx = prepare_repair(g, event, InterfaceContract{});
        CandidateFamily family = build_family(ctx, inputs, {}, ScoringParams{});
        execute_plan(g, ctx, family, cluster, inputs, {}, ExecOptions{});
        affected_union.insert(ctx.affected.begin(), ctx.affected.end());
    }
    for (const auto& x : affected_union) CHECK(!cluster.any_serving_visible(x));
}
