// SPDX-License-Identifier: Apache-2.0
// Case fixtures. The narratives fix per-descendant dispositions; the edge
// topology here is the minimal one consistent with every disposition.

#include <sstream>

#include "memorepair/workload.hpp"

namespace memorepair {

namespace {

Artifact make(const ArtifactId& id, ArtifactKind kind,
              std::optional<SkillArch> arch = std::nullopt) {
    Artifact a;
    a.id = id;
    a.kind = kind;
    a.arch = arch;
    a.payload_digest = "fixture:" + id;
    return a;
}

void default_replicas(Scenario& s) {
    s.replicas.t_ack = 2;
    s.replicas.delays = {{"replica-0", 0}, {"replica-1", 0}, {"replica-2", 0}};
}

CandidateInputs base_inputs(double uses) {
    CandidateInputs in;
    in.resources.tool = 6;
    in.resources.tok = 6;
    in.trace.uses = uses;
    in.trace.probes = 2;
    in.checks.schema_keys = {"status", "value"};
    in.checks.probes = {true, true};
    return in;
}

// Deletion of a deprecated tool: 4 cached call records lose their only
// parent, 3 summaries regenerate from the two surviving tools, prompt and
// chain skills rebuild from retained context, and both neural skills repair
// parametrically. 7 of 11 republished.
Scenario case1_deletion() {
    Scenario s;
    s.meta.name = "case1_deletion";
    s.meta.preset = "fixture";
    s.contract.entries = {{"endpoint_quote", "v1"},
                          {"endpoint_candles", "v1"},
                          {"briefing", "markdown"}};

    s.graph.add_artifact(make("tool-quote", ArtifactKind::Record));
    for (const char* bg : {"tool-alpha", "tool-beta", "tool-gamma", "bg-notes"}) {
        s.graph.add_artifact(make(bg, ArtifactKind::Record));
    }

    for (int i = 1; i <= 4; ++i) {
        std::string id = "api-rec-q" + std::to_string(i);
        s.graph.add_artifact(make(id, ArtifactKind::Cache));
        s.graph.add_influence_edge("tool-quote", id);
        CandidateInputs in = base_inputs(4);
        in.replay = ReplayTrace{{"tool-quote"}, {{"endpoint_quote", "v1"}}};
        s.inputs[id] = in;
    }
    for (int i = 1; i <= 3; ++i) {
        std::string id = "sum-brief-" + std::to_string(i);
        s.graph.add_artifact(make(id, ArtifactKind::Summary));
        s.graph.add_influence_edge("api-rec-q" + std::to_string(i), id);
        s.graph.add_influence_edge("tool-alpha", id);
        s.graph.add_influence_edge("tool-beta", id);
        CandidateInputs in = base_inputs(5);
        in.regen_context = {"tool-alpha", "tool-beta"};
        s.inputs[id] = in;
    }
    s.graph.add_artifact(make("skill-prompt-brief", ArtifactKind::Skill, SkillArch::Prompt));
    s.graph.add_influence_edge("sum-brief-1", "skill-prompt-brief");
    s.graph.add_influence_edge("bg-notes", "skill-prompt-brief");
    {
        CandidateInputs in = base_inputs(6);
        in.regen_context = {"bg-notes"};
        s.inputs["skill-prompt-brief"] = in;
    }
    s.graph.add_artifact(make("skill-chain-market", ArtifactKind::Skill, SkillArch::Chain));
    s.graph.add_influence_edge("tool-quote", "skill-chain-market");
    s.graph.add_influence_edge("tool-gamma", "skill-chain-market");
    {
        CandidateInputs in = base_inputs(6);
        in.resources.sand = 2;
        in.regen_context = {"tool-gamma"};
        s.inputs["skill-chain-market"] = in;
    }
    for (int i = 1; i <= 2; ++i) {
        std::string id = "skill-neural-" + std::to_string(i);
        std::string rec = "api-rec-q" + std::to_string(i);
        s.graph.add_artifact(make(id, ArtifactKind::Skill, SkillArch::Neural));
        s.graph.add_influence_edge(rec, id);
        CandidateInputs in = base_inputs(5);
        in.resources.gpu = 4;
        for (int z = 1; z <= 4; ++z) {
            std::string ex = id + "-ex" + std::to_string(z);
            in.support.push_back(ex);
            s.example_provenance[ex] = {z <= 2 ? rec : "tool-alpha"};
        }
        in.checks.param_scores = {10.0, 90.0};
        s.inputs[id] = in;
    }

    s.event.roots = {"tool-quote"};
    s.event.type = EventType::Delete;

    default_replicas(s);
    s.tasks = {{"task-0", {"api-rec-q1", "bg-notes"}},
               {"task-1", {"sum-brief-1", "sum-brief-2"}},
               {"task-2", {"skill-chain-market"}},
               {"task-3", {"tool-alpha"}}};
    return s;
}

// Correction of an argument schema: one of five call records holds a retained
// argument the replacement schema cannot interpret and is quarantined before
// any operator runs. 7 of 8 republished.
Scenario case2_correction() {
    Scenario s;
    s.meta.name = "case2_correction";
    s.meta.preset = "fixture";
    s.contract.entries = {{"depart_date", "legacy_en|legacy_short|iso"},
                          {"endpoint_flights", "v1"}};

    s.graph.add_artifact(make("tool-flight", ArtifactKind::Record));
    s.graph.add_artifact(make("bg-flights", ArtifactKind::Record));
    s.graph.add_artifact(make("bg-docs", ArtifactKind::Record));

    for (int i = 1; i <= 5; ++i) {
        std::string id = "rec-f" + std::to_string(i);
        s.graph.add_artifact(make(id, ArtifactKind::Cache));
        s.graph.add_influence_edge("tool-flight", id);
        CandidateInputs in = base_inputs(4);
        in.replay = ReplayTrace{
            {"tool-flight"},
            {{"depart_date", i == 5 ? std::string("custom_locale") : std::string("legacy_en")}}};
        s.inputs[id] = in;
    }
    s.graph.add_artifact(make("sum-flights", ArtifactKind::Summary));
    for (int i = 1; i <= 4; ++i) {
        s.graph.add_influence_edge("rec-f" + std::to_string(i), "sum-flights");
    }
    s.graph.add_influence_edge("bg-flights", "sum-flights");
    {
        CandidateInputs in = base_inputs(5);
        in.regen_context = {"rec-f1", "rec-f2", "rec-f3", "rec-f4", "bg-flights"};
        s.inputs["sum-flights"] = in;
    }
    s.graph.add_artifact(make("skill-chain-booking", ArtifactKind::Skill, SkillArch::Chain));
    s.graph.add_influence_edge("tool-flight", "skill-chain-booking");
    s.graph.add_influence_edge("bg-docs", "skill-chain-booking");
    {
        CandidateInputs in = base_inputs(6);
        in.resources.sand = 3;
        in.regen_context = {"bg-docs"};
        s.inputs["skill-chain-booking"] = in;
    }
    s.graph.add_artifact(make("skill-neural-flight", ArtifactKind::Skill, SkillArch::Neural));
    s.graph.add_influence_edge("rec-f1", "skill-neural-flight");
    {
        CandidateInputs in = base_inputs(5);
        in.resources.gpu = 5;
        for (int z = 1; z <= 6; ++z) {
            std::string ex = "nf-ex" + std::to_string(z);
            in.support.push_back(ex);
            s.example_provenance[ex] = {z <= 3 ? "rec-f1" : "bg-flights"};
        }
        in.checks.param_scores = {12.0, 88.0};
        s.inputs["skill-neural-flight"] = in;
    }

    s.event.roots = {"tool-flight"};
    s.event.type = EventType::Correct;
    ReplacementSpec rep;
    rep.replaces_root = "tool-flight";
    rep.version = 2;
    rep.schema = {{"depart_date", "legacy_en|iso"}};
    rep.examples_for = {{"skill-neural-flight", {"nf-new1", "nf-new2"}}};
    s.event.replacements.push_back(rep);

    default_replicas(s);
    s.tasks = {{"task-0", {"rec-f1"}},
               {"task-1", {"sum-flights", "bg-docs"}},
               {"task-2", {"skill-neural-flight"}}};
    return s;
}

// Migration of an attribute schema: one record carries a free-form attribute
// with no key under the migrated contract. 13 of 14 republished.
Scenario case3_migration() {
    Scenario s;
    s.meta.name = "case3_migration";
    s.meta.preset = "fixture";
    s.contract.entries = {{"attr_size", "freeform|structured"},
                          {"attr_res", "freeform|structured"},
                          {"attr_panel", "freeform|structured"},
                          {"catalog", "v1"}};

    s.graph.add_artifact(make("schema-elec", ArtifactKind::Record));
    s.graph.add_artifact(make("bg-arena", ArtifactKind::Record));

    const char* keys[] = {"attr_size", "attr_res", "attr_panel"};
    for (int i = 1; i <= 12; ++i) {
        std::ostringstream ids;
        ids << "rec-m" << (i < 10 ? "0" : "") << i;
        std::string id = ids.str();
        s.graph.add_artifact(make(id, ArtifactKind::Cache));
        s.graph.add_influence_edge("schema-elec", id);
        CandidateInputs in = base_inputs(3);
        ReplayTrace replay;
        replay.parents = {"schema-elec"};
        if (i == 12) {
            replay.args = {{"attr_smart", "freeform"}};  // no canonical key
        } else {
            replay.args = {{keys[i % 3], "freeform"}};
        }
        in.replay = std::move(replay);
        s.inputs[id] = in;
    }
    s.graph.add_artifact(make("cached-final", ArtifactKind::Cache));
    for (const char* p : {"rec-m01", "rec-m02", "rec-m03"}) {
        s.graph.add_influence_edge(p, "cached-final");
    }
    {
        CandidateInputs in = base_inputs(6);
        in.replay = ReplayTrace{{"rec-m01", "rec-m02", "rec-m03"}, {}};
        s.inputs["cached-final"] = in;
    }
    s.graph.add_artifact(make("skill-neural-elec", ArtifactKind::Skill, SkillArch::Neural));
    s.graph.add_influence_edge("rec-m01", "skill-neural-elec");
    {
        CandidateInputs in = base_inputs(5);
        in.resources.gpu = 4;
        for (int z = 1; z <= 6; ++z) {
            std::string ex = "ne-ex" + std::to_string(z);
            in.support.push_back(ex);
            s.example_provenance[ex] = {z <= 3 ? "rec-m01" : "bg-arena"};
        }
        in.checks.param_scores = {14.0, 86.0};
        s.inputs["skill-neural-elec"] = in;
    }

    s.event.roots = {"schema-elec"};
    s.event.type = EventType::Migrate;
    s.event.contract_delta = {{"catalog", "v2"}};

    default_replicas(s);
    s.tasks = {{"task-0", {"rec-m01", "rec-m02"}},
               {"task-1", {"cached-final"}},
               {"task-2", {"skill-neural-elec", "bg-arena"}}};
    return s;
}

// Deletion of a shared anchor entity: every record depends on the deleted
// parent, the final answers depend on those records, and every neural skill
// ends with empty reference support. All 79 descendants quarantined; nothing
// executes, so realized cost is zero.
Scenario case4_structural_failure() {
    Scenario s;
    s.meta.name = "case4_structural_failure";
    s.meta.preset = "fixture";
    s.contract.entries = {{"endpoint", "v1"}};

    s.graph.add_artifact(make("anchor-entity", ArtifactKind::Record));
    s.graph.add_artifact(make("bg-side", ArtifactKind::Record));

    std::vector<std::string> records;
    for (int i = 1; i <= 63; ++i) {
        std::ostringstream ids;
        ids << "rec-a" << (i < 10 ? "0" : "") << i;
        std::string id = ids.str();
        s.graph.add_artifact(make(id, ArtifactKind::Cache));
        s.graph.add_influence_edge("anchor-entity", id);
        CandidateInputs in = base_inputs(2);
        in.replay = ReplayTrace{{"anchor-entity"}, {{"endpoint", "v1"}}};
        s.inputs[id] = in;
        records.push_back(id);
    }
    for (int i = 1; i <= 8; ++i) {
        std::string id = "final-" + std::to_string(i);
        s.graph.add_artifact(make(id, ArtifactKind::Cache));
        CandidateInputs in = base_inputs(4);
        ReplayTrace replay;
        for (int p = 0; p < 3; ++p) {
            const std::string& parent = records[(i - 1) * 7 + p];
            replay.parents.push_back(parent);
            s.graph.add_influence_edge(parent, id);
        }
        in.replay = std::move(replay);
        s.inputs[id] = in;
    }
    for (int i = 1; i <= 8; ++i) {
        std::string id = "skill-neural-a" + std::to_string(i);
        s.graph.add_artifact(make(id, ArtifactKind::Skill, SkillArch::Neural));
        s.graph.add_influence_edge(records[(i - 1) * 7], id);
        CandidateInputs in = base_inputs(3);
        in.resources.gpu = 3;
        for (int z = 1; z <= 4; ++z) {
            std::string ex = id + "-ex" + std::to_string(z);
            in.support.push_back(ex);
            // Every retained training example references the deleted chain.
            s.example_provenance[ex] = {z == 1 ? "anchor-entity" : records[(i - 1) * 7 + z - 2]};
        }
        in.checks.param_scores = {10.0, 90.0};
        s.inputs[id] = in;
    }

    s.event.roots = {"anchor-entity"};
    s.event.type = EventType::Delete;

    default_replicas(s);
    s.tasks = {{"task-0", {"rec-a01", "rec-a02"}},
               {"task-1", {"final-1"}},
               {"task-2", {"skill-neural-a1"}},
               {"task-3", {"bg-side"}}};
    return s;
}

}  // namespace

std::vector<std::string> fixture_names() {
    return {"case1_deletion", "case2_correction", "case3_migration", "case4_structural_failure"};
}

Scenario load_fixture(const std::string& name) {
    Scenario s;
    if (name == "case1_deletion") {
        s = case1_deletion();
    } else if (name == "case2_correction") {
        s = case2_correction();
    } else if (name == "case3_migration") {
        s = case3_migration();
    } else if (name == "case4_structural_failure") {
        s = case4_structural_failure();
    } else {
        throw std::invalid_argument("unknown fixture: " + name);
    }
    s.ground_truth_influence = s.graph.influence_edges();
    return s;
}

}  // namespace memorepair
