// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "memorepair/candidate.hpp"

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

struct Fixture {
    ProvenanceGraph g;
    RepairEvent event;
    InterfaceContract contract;
    std::map<ArtifactId, CandidateInputs> inputs;
    ExampleProvenance provenance;

    RepairContext prepare() { return prepare_repair(g, event, contract); }
};

// root -> cache d1 -> cache d2, plus retained bg; deletion event.
Fixture chain_fixture() {
    Fixture f;
    f.g.add_artifact(node("bg", ArtifactKind::Record));
    f.g.add_artifact(node("root", ArtifactKind::Record));
    f.g.add_artifact(node("d1", ArtifactKind::Cache));
    f.g.add_artifact(node("d2", ArtifactKind::Cache));
    f.g.add_influence_edge("root", "d1");
    f.g.add_influence_edge("d1", "d2");
    f.event.roots = {"root"};
    f.event.type = EventType::Delete;
    f.contract.entries = {{"endpoint", "v1"}};

    CandidateInputs d1;
    d1.replay = ReplayTrace{{"root"}, {}};
    d1.resources.tool = 2;
    d1.trace.uses = 1;
    f.inputs["d1"] = d1;

    CandidateInputs d2;
    d2.replay = ReplayTrace{{"d1", "bg"}, {{"endpoint", "v1"}}};
    d2.resources.tool = 2;
    d2.trace.uses = 1;
    f.inputs["d2"] = d2;
    return f;
}

}  // namespace

TEST_CASE("assign_mode: replayable caches recompute, mode checks are static") {
    Fixture f = chain_fixture();
    RepairContext ctx = f.prepare();
    CHECK(assign_mode(ctx, "d1", f.inputs["d1"], f.provenance) == RepairMode::Recompute);
    CHECK(assign_mode(ctx, "d2", f.inputs["d2"], f.provenance) == RepairMode::Recompute);
    CHECK_THROWS(assign_mode(ctx, "bg", f.inputs["d1"], f.provenance));  // not affected

    // No replay trace: nothing to recompute from.
    CandidateInputs none;
    CHECK(assign_mode(ctx, "d1", none, f.provenance) == RepairMode::Remove);
}

TEST_CASE("assign_mode: regen needs one retained influence parent") {
    Fixture f;
    f.g.add_artifact(node("bg", ArtifactKind::Record));
    f.g.add_artifact(node("root", ArtifactKind::Record));
    f.g.add_artifact(node("sum-ok", ArtifactKind::Summary));
    f.g.add_artifact(node("sum-orphan", ArtifactKind::Summary));
    f.g.add_influence_edge("root", "sum-ok");
    f.g.add_influence_edge("bg", "sum-ok");
    f.g.add_influence_edge("root", "sum-orphan");
    f.event.roots = {"root"};
    f.event.type = EventType::Delete;
    RepairContext ctx = f.prepare();

    CandidateInputs in;
    in.regen_context = {"bg"};
    CHECK(assign_mode(ctx, "sum-ok", in, f.provenance) == RepairMode::Regen);
    CHECK(assign_mode(ctx, "sum-orphan", CandidateInputs{}, f.provenance) == RepairMode::Remove);
}

TEST_CASE("assign_mode: neural skills keyed on the forget partition") {
    Fixture f;
    f.g.add_artifact(node("bg", ArtifactKind::Record));
    f.g.add_artifact(node("root", ArtifactKind::Record));
    f.g.add_artifact(node("nsk", ArtifactKind::Skill, SkillArch::Neural));
    f.g.add_influence_edge("root", "nsk");
    f.event.roots = {"root"};
    f.event.type = EventType::Delete;
    RepairContext ctx = f.prepare();

    CandidateInputs in;
    in.support = {"e1", "e2"};
    f.provenance["e1"] = {"root"};
    f.provenance["e2"] = {"bg"};
    CHECK(assign_mode(ctx, "nsk", in, f.provenance) == RepairMode::Param);

    // Support untouched by the cascade: no parametric contract.
    f.provenance["e1"] = {"bg"};
    CHECK(assign_mode(ctx, "nsk", in, f.provenance) == RepairMode::Remove);

    // Fully invalidated support keeps the param contract but is statically
    // non-executable (empty reference support).
    f.provenance["e1"] = {"root"};
    f.provenance["e2"] = {"root"};
    CHECK(assign_mode(ctx, "nsk", in, f.provenance) == RepairMode::Param);
    auto modes = std::map<ArtifactId, RepairMode>{{"nsk", RepairMode::Param}};
    Candidate cand = build_candidate(ctx, "nsk", in, f.provenance, modes);
    CHECK(!cand.executable_initial);
    CHECK(cand.demotion_reason == "empty reference support");
}

TEST_CASE("build_candidate: roots are excluded from P_i") {
    Fixture f = chain_fixture();
    RepairContext ctx = f.prepare();
    CandidateFamily fam = build_family(ctx, f.inputs, f.provenance, ScoringParams{});

    // d1 replays from the deleted root: quarantined at construction.
    CHECK(fam.at("d1").required.empty());
    CHECK(!fam.at("d1").executable_initial);
    CHECK(fam.at("d1").demotion_reason == "missing parent: root");

    // d2 consumes d1 (affected) and bg (retained): P = {d1} only.
    CHECK(fam.at("d2").required == std::set<ArtifactId>{"d1"});
    CHECK(fam.at("d2").repairable_required == std::set<ArtifactId>{"d1"});
    // d1 can never be staged, so d2 is statically demoted too.
    CHECK(!fam.at("d2").executable_initial);
    CHECK(fam.at("d2").demotion_reason == "requires quarantined candidate: d1");
    CHECK(fam.initially_executable.empty());
}

TEST_CASE("build_candidate: replacement schema governs correction replays") {
    Fixture f;
    f.g.add_artifact(node("root", ArtifactKind::Record));
    f.g.add_artifact(node("ok", ArtifactKind::Cache));
    f.g.add_artifact(node("bad", ArtifactKind::Cache));
    f.g.add_influence_edge("root", "ok");
    f.g.add_influence_edge("root", "bad");
    f.event.roots = {"root"};
    f.event.type = EventType::Correct;
    ReplacementSpec rep;
    rep.replaces_root = "root";
    rep.schema = {{"depart_date", "iso|legacy_en"}};
    f.event.replacements.push_back(rep);
    f.contract.entries = {{"depart_date", "legacy_en|legacy_short|iso"}};

    CandidateInputs ok;
    ok.replay = ReplayTrace{{"root"}, {{"depart_date", "legacy_en"}}};
    ok.resources.tool = 1;
    f.inputs["ok"] = ok;
    CandidateInputs bad;
    bad.replay = ReplayTrace{{"root"}, {{"depart_date", "custom_locale"}}};
    bad.resources.tool = 1;
    f.inputs["bad"] = bad;

    RepairContext ctx = f.prepare();
    CandidateFamily fam = build_family(ctx, f.inputs, f.provenance, ScoringParams{});
    CHECK(fam.at("ok").executable_initial);
    CHECK(!fam.at("bad").executable_initial);
    CHECK(fam.at("bad").demotion_reason == "argument format not accepted: depart_date=custom_locale");
    // Replaced root parents never enter P_i.
    CHECK(fam.at("ok").required.empty());
}

TEST_CASE("build_candidate: migrated roots flow through the contract") {
    Fixture f;
    f.g.add_artifact(node("root", ArtifactKind::Record));
    f.g.add_artifact(node("rec", ArtifactKind::Cache));
    f.g.add_artifact(node("odd", ArtifactKind::Cache));
    f.g.add_influence_edge("root", "rec");
    f.g.add_influence_edge("root", "odd");
    f.event.roots = {"root"};
    f.event.type = EventType::Migrate;
    f.event.contract_delta = {{"fmt", "modern"}};
    f.contract.entries = {{"fmt", "legacy|modern"}};

    CandidateInputs rec;
    rec.replay = ReplayTrace{{"root"}, {{"fmt", "modern"}}};
    rec.resources.tool = 1;
    f.inputs["rec"] = rec;
    CandidateInputs odd;
    odd.replay = ReplayTrace{{"root"}, {{"legacy_attr", "freeform"}}};
    odd.resources.tool = 1;
    f.inputs["odd"] = odd;

    RepairContext ctx = f.prepare();
    CHECK(ctx.post_contract.entries.at("fmt") == "modern");
    CandidateFamily fam = build_family(ctx, f.inputs, f.provenance, ScoringParams{});
    CHECK(fam.at("rec").executable_initial);
    CHECK(!fam.at("odd").executable_initial);  // key absent from migrated schema
}

TEST_CASE("build_req_graph: edges mirror repairable requirements, cycles demote") {
    Fixture f;
    f.g.add_artifact(node("root", ArtifactKind::Record));
    f.g.add_artifact(node("bg", ArtifactKind::Record));
    for (const char* id : {"i", "j", "k"}) f.g.add_artifact(node(id, ArtifactKind::Cache));
    f.g.add_influence_edge("root", "i");
    f.g.add_influence_edge("i", "j");
    f.g.add_influence_edge("j", "i");  // provenance cycle
    f.g.add_influence_edge("root", "k");
    f.event.roots = {"root"};
    f.event.type = EventType::Migrate;
    f.contract.entries = {{"fmt", "x"}};

    CandidateInputs i_in, j_in, k_in;
    i_in.replay = ReplayTrace{{"j", "root"}, {}};  // i needs j
    j_in.replay = ReplayTrace{{"i", "root"}, {}};  // j needs i
    k_in.replay = ReplayTrace{{"root", "bg"}, {}};
    i_in.resources.tool = j_in.resources.tool = k_in.resources.tool = 1;
    i_in.trace.uses = j_in.trace.uses = k_in.trace.uses = 1;
    f.inputs = {{"i", i_in}, {"j", j_in}, {"k", k_in}};

    RepairContext ctx = f.prepare();
    CandidateFamily fam = build_family(ctx, f.inputs, f.provenance, ScoringParams{});
    CHECK(fam.req_edges ==
          std::vector<std::pair<ArtifactId, ArtifactId>>{{"i", "j"}, {"j", "i"}});
    CHECK(!fam.at("i").executable_initial);
    CHECK(!fam.at("j").executable_initial);
    CHECK(fam.at("i").demotion_reason == "cyclic repair requirement");
    CHECK(fam.at("k").executable_initial);
    CHECK(fam.initially_executable == std::set<ArtifactId>{"k"});

    // E_req restricted to executable candidates is acyclic by construction.
    for (const auto& [j, i] : fam.req_edges) {
        bool both = fam.at(j).executable_initial && fam.at(i).executable_initial;
        CHECK(!both);
    }
}

TEST_CASE("score_cost: normalization over the initially executable set") {
    Fixture f = chain_fixture();
    // Make both candidates executable: replay d1 from bg instead of the root.
    f.inputs["d1"].replay = ReplayTrace{{"bg"}, {}};
    RepairContext ctx = f.prepare();

    ScoringParams params;
    params.epsilon = 0;  // exact halves for the hand-computed case
    CandidateFamily fam = build_family(ctx, f.inputs, f.provenance, params);
    REQUIRE(fam.initially_executable.size() == 2);
    CHECK(fam.at("d1").cost_exact == Rational(1, 2));
    CHECK(fam.at("d2").cost_exact == Rational(1, 2));

    // Self-normalization with a single executable candidate.
    Fixture g2 = chain_fixture();
    g2.inputs.erase("d2");
    g2.inputs["d1"].replay = ReplayTrace{{"bg"}, {}};
    RepairContext ctx2 = g2.prepare();
    CandidateFamily fam2 = build_family(ctx2, g2.inputs, g2.provenance, params);
    CHECK(fam2.at("d1").cost_exact == Rational(1, 1));
}

TEST_CASE("score_cost: empty executable set zeroes all costs") {
    Fixture f = chain_fixture();  // d1 blocked by the deleted root
    RepairContext ctx = f.prepare();
    CandidateFamily fam = build_family(ctx, f.inputs, f.provenance, ScoringParams{});
    CHECK(fam.initially_executable.empty());
    for (const auto& c : fam.candidates) CHECK(c.cost_exact == Rational(0, 1));
}

TEST_CASE("score_cost rejects negative resources") {
    Fixture f = chain_fixture();
    f.inputs["d2"].resources.tok = -3;
    RepairContext ctx = f.prepare();
    CHECK_THROWS(build_family(ctx, f.inputs, f.provenance, ScoringParams{}));
}

TEST_CASE("score_value: formula terms and uniform fallback") {
    Fixture f = chain_fixture();
    f.inputs["d1"].replay = ReplayTrace{{"bg"}, {}};

    SUBCASE("uniform fallback when every executable trace is silent") {
        // Siblings with no downstream fanout and all-zero trace stats.
        Fixture h;
        h.g.add_artifact(node("bg", ArtifactKind::Record));
        h.g.add_artifact(node("root", ArtifactKind::Record));
        h.g.add_artifact(node("a", ArtifactKind::Cache));
        h.g.add_artifact(node("b", ArtifactKind::Cache));
        h.g.add_influence_edge("root", "a");
        h.g.add_influence_edge("root", "b");
        h.event.roots = {"root"};
        h.event.type = EventType::Delete;
        for (const char* id : {"a", "b"}) {
            CandidateInputs in;
            in.replay = ReplayTrace{{"bg"}, {}};
            in.resources.tool = 1;
            h.inputs[id] = in;
        }
        RepairContext ctx = h.prepare();
        CandidateFamily fam = build_family(ctx, h.inputs, h.provenance, ScoringParams{});
        REQUIRE(fam.initially_executable == std::set<ArtifactId>{"a", "b"});
        CHECK(fam.at("a").value == doctest::Approx(0.5));
        CHECK(fam.at("b").value == doctest::Approx(0.5));
    }

    SUBCASE("probe term and fanout difference") {
        f.inputs["d1"].trace = {0, 0, 4};  // probes = max
        f.inputs["d2"].trace = {0, 0, 0};
        RepairContext ctx = f.prepare();
        CandidateFamily fam = build_family(ctx, f.inputs, f.provenance, ScoringParams{});
        // d1 raw: log1p(0) + log1p(fanout=1 via d2) + 4/(4+eps) ~ log(2) + 1
        // d2 raw: 0
        double expect_d1 = std::log(2.0) + 1.0;
        double denom = expect_d1 + 1e-9;
        CHECK(fam.at("d1").value == doctest::Approx(expect_d1 / denom));
        CHECK(fam.at("d2").value == doctest::Approx(0.0));
        CHECK(fam.at("d1").trace.downstream_fanout == doctest::Approx(1.0));
    }

    SUBCASE("fanout difference of 3 vs 0 is log 4") {
        // i reaches three affected descendants, j none; equal other stats.
        Fixture h;
        h.g.add_artifact(node("bg", ArtifactKind::Record));
        h.g.add_artifact(node("root", ArtifactKind::Record));
        for (const char* id : {"i", "j", "x1", "x2", "x3"}) {
            h.g.add_artifact(node(id, ArtifactKind::Cache));
        }
        h.g.add_influence_edge("root", "i");
        h.g.add_influence_edge("root", "j");
        for (const char* id : {"x1", "x2", "x3"}) h.g.add_influence_edge("i", id);
        h.event.roots = {"root"};
        h.event.type = EventType::Migrate;
        h.contract.entries = {{"fmt", "x"}};
        for (const char* id : {"i", "j", "x1", "x2", "x3"}) {
            CandidateInputs in;
            in.replay = ReplayTrace{{"root"}, {}};
            in.resources.tool = 1;
            in.trace.uses = 2;
            h.inputs[id] = in;
        }
        RepairContext ctx = h.prepare();
        CandidateFamily fam = build_family(ctx, h.inputs, h.provenance, ScoringParams{});
        double raw_i = std::log1p(2) + std::log1p(3);
        double raw_j = std::log1p(2);
        CHECK((raw_i - raw_j) == doctest::Approx(std::log(4.0)));
        double sum = 0;
        for (const auto& c : fam.candidates) {
            sum += std::log1p(c.trace.uses) + std::log1p(c.trace.downstream_fanout);
        }
        CHECK(fam.at("i").value == doctest::Approx(raw_i / (sum + 1e-9)));
        CHECK(fam.at("j").value == doctest::Approx(raw_j / (sum + 1e-9)));
    }
}

TEST_CASE("score masses stay within the epsilon slack") {
    Fixture f = chain_fixture();
    f.inputs["d1"].replay = ReplayTrace{{"bg"}, {}};
    f.inputs["d1"].trace.uses = 3;
    f.inputs["d2"].trace.uses = 5;
    RepairContext ctx = f.prepare();
    CandidateFamily fam = build_family(ctx, f.inputs, f.provenance, ScoringParams{});

    Rational cost_mass(0, 1);
    double value_mass = 0;
    for (const auto& id : fam.initially_executable) {
        cost_mass += fam.at(id).cost_exact;
        value_mass += fam.at(id).value;
    }
    CHECK(cost_mass <= Rational(1, 1));
    CHECK(cost_mass >= Rational(999999999, 1000000000));
    CHECK(value_mass <= 1.0 + 1e-12);
    CHECK(value_mass >= 1.0 - 1e-6);
}

TEST_CASE("partition_support: arithmetic on the four-example fixture") {
    ExampleProvenance prov;
    prov["e1"] = {"c1"};
    prov["e2"] = {"c2"};
    prov["e3"] = {"bg1"};
    prov["e4"] = {"bg2"};
    std::set<ArtifactId> affected{"c1", "c2"};

    RepairEvent correct;
    correct.roots = {"c1"};
    correct.type = EventType::Correct;
    ReplacementSpec rep;
    rep.replaces_root = "c1";
    correct.replacements.push_back(rep);

    SupportPartition part = partition_support({"e1", "e2", "e3", "e4"}, prov, affected, correct,
                                              {"n1", "n2"});
    CHECK(part.forget == std::set<std::string>{"e1", "e2"});
    CHECK(part.fresh == std::set<std::string>{"n1", "n2"});
    CHECK(part.reference == std::set<std::string>{"e3", "e4", "n1", "n2"});  // |S|/2 + 2

    RepairEvent del;
    del.roots = {"c1"};
    del.type = EventType::Delete;
    SupportPartition dpart = partition_support({"e1", "e2", "e3", "e4"}, prov, affected, del, {});
    CHECK(dpart.fresh.empty());
    CHECK(dpart.reference == std::set<std::string>{"e3", "e4"});

    CHECK_THROWS(partition_support({"unknown"}, prov, affected, del, {}));
}

TEST_CASE("assign_mode is a pure function") {
    Fixture f = chain_fixture();
    RepairContext ctx = f.prepare();
    for (int i = 0; i < 5; ++i) {
        CHECK(assign_mode(ctx, "d1", f.inputs["d1"], f.provenance) == RepairMode::Recompute);
    }
}

TEST_CASE("candidate dump is sorted by target") {
    Fixture f = chain_fixture();
    RepairContext ctx = f.prepare();
    CandidateFamily fam = build_family(ctx, f.inputs, f.provenance, ScoringParams{});
    std::string dump = candidates_to_json(fam);
    CHECK(dump.find("\"d1\"") < dump.find("\"d2\""));
    CHECK(dump.find("demotion_reason") != std::string::npos);
}
