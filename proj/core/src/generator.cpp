// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "memorepair/workload.hpp"

namespace memorepair {

namespace {

// splitmix64: deterministic across platforms, unlike std distributions.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed + 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // inclusive range
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        if (hi <= lo) return lo;
        return lo + (std::int64_t)(next() % (std::uint64_t)(hi - lo + 1));
    }
    double unit() { return (double)(next() >> 11) * (1.0 / 9007199254740992.0); }
    bool chance(double p) { return unit() < p; }
};

std::uint64_t edge_hash(std::uint64_t seed, const std::string& u, const std::string& v) {
    std::uint64_t h = seed ^ 0x8f3ad1a4c2b95e71ull;
    for (unsigned char c : u) h = (h ^ c) * 1099511628211ull;
    h = (h ^ 0x7c) * 1099511628211ull;
    for (unsigned char c : v) h = (h ^ c) * 1099511628211ull;
    return h;
}

std::string padded(const std::string& prefix, int n) {
    std::ostringstream out;
    out << prefix;
    if (n < 100) out << "0";
    if (n < 10) out << "0";
    out << n;
    return out.str();
}

enum class Slot { RegenBase, Recompute, Neural, ChainSkill, RemoveMode };

}  // namespace

GeneratorSpec preset_spec(const std::string& name) {
    GeneratorSpec spec;
    spec.preset = name;
    if (name == "toolbench_deletion") {
        spec.event_type = EventType::Delete;
        spec.roots_min = 1; spec.roots_max = 8;
        spec.cascade_min = 12; spec.cascade_max = 128;
        spec.dplus_min = 9; spec.dplus_max = 96;
    } else if (name == "toolbench_correction") {
        spec.event_type = EventType::Correct;
        spec.roots_min = 1; spec.roots_max = 6;
        spec.cascade_min = 10; spec.cascade_max = 112;
        spec.dplus_min = 8; spec.dplus_max = 84;
    } else if (name == "toolbench_migration") {
        spec.event_type = EventType::Migrate;
        spec.roots_min = 1; spec.roots_max = 5;
        spec.cascade_min = 14; spec.cascade_max = 124;
        spec.dplus_min = 11; spec.dplus_max = 94;
    } else if (name == "memoryarena_deletion") {
        spec.event_type = EventType::Delete;
        spec.roots_min = 1; spec.roots_max = 6;
        spec.cascade_min = 5; spec.cascade_max = 118;
        spec.dplus_min = 0; spec.dplus_max = 95;
    } else if (name == "memoryarena_correction") {
        spec.event_type = EventType::Correct;
        spec.roots_min = 1; spec.roots_max = 5;
        spec.cascade_min = 8; spec.cascade_max = 58;
        spec.dplus_min = 6; spec.dplus_max = 42;
    } else if (name == "memoryarena_migration") {
        spec.event_type = EventType::Migrate;
        spec.roots_min = 1; spec.roots_max = 4;
        spec.cascade_min = 10; spec.cascade_max = 66;
        spec.dplus_min = 8; spec.dplus_max = 48;
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return spec;
}

std::vector<std::string> preset_names() {
    return {"toolbench_deletion",   "toolbench_correction",   "toolbench_migration",
            "memoryarena_deletion", "memoryarena_correction", "memoryarena_migration"};
}

GeneratorSpec generator_spec_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    GeneratorSpec spec = j.contains("preset")
                             ? preset_spec(j.at("preset").get<std::string>())
                             : GeneratorSpec{};
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("event_type")) {
        spec.event_type = event_type_from_string(j.at("event_type").get<std::string>());
    }
    spec.roots_min = j.value("roots_min", spec.roots_min);
    spec.roots_max = j.value("roots_max", spec.roots_max);
    spec.cascade_min = j.value("cascade_min", spec.cascade_min);
    spec.cascade_max = j.value("cascade_max", spec.cascade_max);
    spec.dplus_min = j.value("dplus_min", spec.dplus_min);
    spec.dplus_max = j.value("dplus_max", spec.dplus_max);
    spec.background_nodes = j.value("background_nodes", spec.background_nodes);
    spec.p_drop = j.value("p_drop", spec.p_drop);
    spec.validation_fail_prob = j.value("validation_fail_prob", spec.validation_fail_prob);
    spec.all_validations_fail = j.value("all_validations_fail", spec.all_validations_fail);
    spec.with_partition_script = j.value("with_partition_script", spec.with_partition_script);
    spec.replica_count = j.value("replica_count", spec.replica_count);
    spec.task_count = j.value("task_count", spec.task_count);
    return spec;
}

std::string generator_spec_to_json(const GeneratorSpec& spec) {
    nlohmann::json j;
    j["preset"] = spec.preset;
    j["seed"] = spec.seed;
    j["event_type"] = to_string(spec.event_type);
    j["roots_min"] = spec.roots_min;
    j["roots_max"] = spec.roots_max;
    j["cascade_min"] = spec.cascade_min;
    j["cascade_max"] = spec.cascade_max;
    j["dplus_min"] = spec.dplus_min;
    j["dplus_max"] = spec.dplus_max;
    j["background_nodes"] = spec.background_nodes;
    j["p_drop"] = spec.p_drop;
    j["validation_fail_prob"] = spec.validation_fail_prob;
    j["all_validations_fail"] = spec.all_validations_fail;
    j["with_partition_script"] = spec.with_partition_script;
    j["replica_count"] = spec.replica_count;
    j["task_count"] = spec.task_count;
    return j.dump(2) + "\n";
}

Scenario generate(const GeneratorSpec& spec) {
    if (spec.roots_min < 1 || spec.roots_min > spec.roots_max ||
        spec.cascade_min > spec.cascade_max || spec.dplus_min > spec.dplus_max ||
        spec.cascade_max < spec.roots_min + spec.dplus_min) {
        throw std::invalid_argument("unsatisfiable shape constraints");
    }
    Rng rng(spec.seed * 0x9e3779b97f4a7c15ull + 17);

    Scenario s;
    s.meta.seed = spec.seed;
    s.meta.preset = spec.preset;
    s.meta.p_drop = spec.p_drop;
    s.meta.name = spec.preset + "-s" + std::to_string(spec.seed);

    // Contract keys referenced by replay traces. "payload_fmt" is rewritten by
    // corrections (via replacement schemas) and "schema_fmt" by migrations.
    s.contract.entries = {{"endpoint", "v1"},
                          {"payload_fmt", "legacy|corrected"},
                          {"schema_fmt", "legacy|modern"},
                          {"auth", "key"}};
    s.contract.version = 1;

    int root_count = (int)rng.between(spec.roots_min, spec.roots_max);
    int c_lo = std::max(spec.cascade_min, root_count + spec.dplus_min);
    int c_hi = std::min(spec.cascade_max, root_count + spec.dplus_max + 6);
    if (c_hi < c_lo) c_hi = c_lo;
    int cascade_size = (int)rng.between(c_lo, c_hi);
    int descendant_count = cascade_size - root_count;
    int dplus_target = std::min(descendant_count, spec.dplus_max);
    int remove_count = descendant_count - dplus_target;

    // Roots.
    std::vector<ArtifactId> roots;
    for (int i = 0; i < root_count; ++i) {
        Artifact a;
        a.id = padded("root-", i);
        a.kind = ArtifactKind::Record;
        a.payload_digest = "seed:" + a.id;
        s.graph.add_artifact(a);
        roots.push_back(a.id);
        s.event.roots.insert(a.id);
    }
    s.event.type = spec.event_type;
    if (spec.event_type == EventType::Correct) {
        for (const auto& r : roots) {
            ReplacementSpec rep;
            rep.replaces_root = r;
            rep.version = 2;
            rep.schema = {{"payload_fmt", "corrected"}};
            s.event.replacements.push_back(rep);
        }
    } else if (spec.event_type == EventType::Migrate) {
        s.event.contract_delta = {{"schema_fmt", "modern"}};
    }

    // Retained background pool.
    std::vector<ArtifactId> background;
    for (int i = 0; i < std::max(4, spec.background_nodes); ++i) {
        Artifact a;
        a.id = padded("bg-", i);
        a.kind = ArtifactKind::Record;
        a.payload_digest = "seed:" + a.id;
        s.graph.add_artifact(a);
        background.push_back(a.id);
    }

    auto pick_background = [&]() { return background[rng.between(0, (int)background.size() - 1)]; };
    auto pick_root = [&]() { return roots[rng.between(0, (int)root_count - 1)]; };

    // Slot plan: an early regen layer guarantees stageable predecessors for
    // later recompute chains even under deletion.
    std::vector<Slot> slots;
    int regen_base = std::max(dplus_target / 4, std::min(dplus_target, 2));
    for (int i = 0; i < dplus_target; ++i) {
        if (i < regen_base) {
            slots.push_back(Slot::RegenBase);
        } else {
            double roll = rng.unit();
            if (roll < 0.55) {
                slots.push_back(Slot::Recompute);
            } else if (roll < 0.75) {
                slots.push_back(Slot::Neural);
            } else if (roll < 0.85) {
                slots.push_back(Slot::ChainSkill);
            } else {
                slots.push_back(Slot::RegenBase);
            }
        }
    }
    for (int i = 0; i < remove_count; ++i) slots.push_back(Slot::RemoveMode);

    std::vector<ArtifactId> dplus_so_far;  // repairable descendants, id order
    std::vector<ArtifactId> all_descendants;
    int example_counter = 0;

    for (std::size_t k = 0; k < slots.size(); ++k) {
        Slot slot = slots[k];
        Artifact a;
        a.id = padded("d-", (int)k);
        a.payload_digest = "seed:" + a.id;
        CandidateInputs in;
        in.resources.tool = (double)rng.between(1, 8);
        in.resources.tok = (double)rng.between(0, 30);
        in.trace.uses = (double)rng.between(1, 20);
        in.trace.probes = (double)rng.between(0, 10);
        in.checks.schema_keys = {"status", "value"};
        in.checks.probes = {true, true, true};
        bool fail_validation = spec.all_validations_fail || rng.chance(spec.validation_fail_prob);
        if (spec.all_validations_fail) in.checks.probes = {false};

        // Cascade membership needs at least one affected influence parent.
        std::set<ArtifactId> affected_parents;

        switch (slot) {
            case Slot::RegenBase: {
                a.kind = rng.chance(0.6) ? ArtifactKind::Summary : ArtifactKind::Skill;
                if (a.kind == ArtifactKind::Skill) a.arch = SkillArch::Prompt;
                affected_parents.insert(pick_root());
                in.regen_context = {pick_background()};
                if (fail_validation && !spec.all_validations_fail) in.checks.probes = {true, false};
                break;
            }
            case Slot::Recompute: {
                a.kind = rng.chance(0.7) ? ArtifactKind::Cache : ArtifactKind::Record;
                ReplayTrace replay;
                bool direct_root_child = dplus_so_far.empty() || rng.chance(0.35);
                if (direct_root_child) {
                    ArtifactId r = pick_root();
                    replay.parents.push_back(r);
                    affected_parents.insert(r);
                } else {
                    int deps = (int)rng.between(1, 2);
                    for (int d = 0; d < deps; ++d) {
                        ArtifactId p = dplus_so_far[rng.between(0, (int)dplus_so_far.size() - 1)];
                        replay.parents.push_back(p);
                        affected_parents.insert(p);
                    }
                }
                replay.parents.push_back(pick_background());
                replay.args["endpoint"] = "v1";
                if (spec.event_type == EventType::Correct && direct_root_child) {
                    replay.args["payload_fmt"] =
                        rng.chance(0.15) ? "custom_locale" : "corrected";
                } else if (spec.event_type == EventType::Migrate) {
                    if (rng.chance(0.1)) {
                        replay.args["legacy_attr"] = "freeform";  // unmappable key
                    } else {
                        replay.args["schema_fmt"] = "modern";
                    }
                }
                in.replay = std::move(replay);
                if (fail_validation && !spec.all_validations_fail) in.checks.probes = {true, false};
                break;
            }
            case Slot::Neural: {
                a.kind = ArtifactKind::Skill;
                a.arch = SkillArch::Neural;
                in.resources.gpu = (double)rng.between(1, 5);
                ArtifactId anchor = dplus_so_far.empty()
                                        ? pick_root()
                                        : dplus_so_far[rng.between(0, (int)dplus_so_far.size() - 1)];
                affected_parents.insert(anchor);
                bool empty_reference = rng.chance(0.1);
                int examples = (int)rng.between(4, 8);
                for (int z = 0; z < examples; ++z) {
                    std::string ex = "ex-" + std::to_string(example_counter++);
                    in.support.push_back(ex);
                    bool touches = empty_reference || z < examples / 2;
                    s.example_provenance[ex] = {touches ? anchor : pick_background()};
                }
                in.checks.param_scores = fail_validation
                                             ? std::make_pair(30.0, 70.0)
                                             : std::make_pair((double)rng.between(5, 18),
                                                              (double)rng.between(82, 97));
                break;
            }
            case Slot::ChainSkill: {
                a.kind = ArtifactKind::Skill;
                a.arch = SkillArch::Chain;
                in.resources.sand = (double)rng.between(1, 4);
                affected_parents.insert(pick_root());
                in.regen_context = {pick_background()};
                if (!dplus_so_far.empty() && rng.chance(0.4)) {
                    in.sandbox_requires = {
                        dplus_so_far[rng.between(0, (int)dplus_so_far.size() - 1)]};
                }
                in.checks.sandbox_ok = !fail_validation;
                break;
            }
            case Slot::RemoveMode: {
                a.kind = ArtifactKind::Record;  // no replay trace: remove mode
                in.replay.reset();
                ArtifactId anchor = all_descendants.empty() ? pick_root()
                                                            : all_descendants[rng.between(
                                                                  0, (int)all_descendants.size() - 1)];
                affected_parents.insert(anchor);
                break;
            }
        }

        s.graph.add_artifact(a);
        for (const auto& p : affected_parents) s.graph.add_influence_edge(p, a.id);
        // Sandbox/regen/replay inputs also appear as influence edges.
        if (in.replay) {
            for (const auto& p : in.replay->parents) s.graph.add_influence_edge(p, a.id);
        }
        for (const auto& p : in.regen_context) s.graph.add_influence_edge(p, a.id);
        for (const auto& p : in.sandbox_requires) s.graph.add_influence_edge(p, a.id);

        s.inputs[a.id] = std::move(in);
        all_descendants.push_back(a.id);
        if (slot != Slot::RemoveMode) dplus_so_far.push_back(a.id);
    }

    // Occasional cycles between affected descendants: condensation territory.
    if (all_descendants.size() >= 4) {
        int cycles = (int)rng.between(0, 2);
        for (int i = 0; i < cycles; ++i) {
            int hi = (int)rng.between(1, (int)all_descendants.size() - 1);
            int lo = (int)rng.between(0, hi - 1);
            s.graph.add_influence_edge(all_descendants[hi], all_descendants[lo]);
        }
    }

    // Semantic edges never widen the cascade; cross the boundary on purpose.
    for (int i = 0; i < 4 && !all_descendants.empty(); ++i) {
        s.graph.add_semantic_edge(pick_background(),
                                  all_descendants[rng.between(0, (int)all_descendants.size() - 1)]);
    }

    // Ground truth is the constructed edge set; the observed graph drops each
    // influence edge independently. Edge draws are salted by seed only, so
    // larger p_drop values drop supersets for the same seed.
    s.ground_truth_influence = s.graph.influence_edges();
    if (spec.p_drop > 0) {
        ProvenanceGraph observed;
        for (const auto& [id, art] : s.graph.nodes()) observed.add_artifact(art);
        for (const auto& [u, v] : s.ground_truth_influence) {
            double draw = (double)(edge_hash(spec.seed, u, v) >> 11) * (1.0 / 9007199254740992.0);
            if (draw >= spec.p_drop) observed.add_influence_edge(u, v);
        }
        for (const auto& [u, v] : s.graph.semantic_edges()) observed.add_semantic_edge(u, v);
        s.graph = std::move(observed);
    }

    // Replicas.
    for (int i = 0; i < std::max(1, spec.replica_count); ++i) {
        s.replicas.delays["replica-" + std::to_string(i)] = 0;
    }
    s.replicas.t_ack = 2;
    if (spec.with_partition_script && spec.replica_count >= 2) {
        s.replicas.script.push_back({-1, "partition", "replica-0", "", ""});
        s.replicas.script.push_back({5, "rejoin", "replica-0", "", ""});
    }

    // Post-event task traces; every trace consults the cascade.
    std::vector<ArtifactId> cascade_pool = roots;
    cascade_pool.insert(cascade_pool.end(), all_descendants.begin(), all_descendants.end());
    for (int t = 0; t < spec.task_count; ++t) {
        TaskTrace task;
        task.id = "task-" + std::to_string(t);
        int affected_uses = (int)rng.between(1, 3);
        for (int u = 0; u < affected_uses; ++u) {
            task.uses.insert(cascade_pool[rng.between(0, (int)cascade_pool.size() - 1)]);
        }
        int other_uses = (int)rng.between(0, 2);
        for (int u = 0; u < other_uses; ++u) task.uses.insert(pick_background());
        s.tasks.push_back(std::move(task));
    }

    validate_event(s.event);
    return s;
}

}  // namespace memorepair
