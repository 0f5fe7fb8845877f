// SPDX-License-Identifier: Apache-2.0
#pragma once
// Scenario bundles, seeded generation, case fixtures, and policy runs.
//
// A scenario is one self-contained JSON bundle: observed graph, ground-truth
// provenance, event, contract, per-artifact repair inputs, replica setup, and
// post-event task traces. Policies share the barrier, candidate construction,
// operators, and validation oracle; they differ only in the publication
// selector.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "memorepair/candidate.hpp"
#include "memorepair/event.hpp"
#include "memorepair/executor.hpp"
#include "memorepair/graph.hpp"
#include "memorepair/metrics.hpp"

namespace memorepair {

struct ReplicaScriptOp {
    std::int64_t t = 0;       // logical time; the barrier sits at t = 0
    std::string op;           // merge | partition | rejoin
    std::string replica;      // partition/rejoin target
    std::string a, b;         // merge endpoints
};

struct ReplicaSetup {
    std::uint64_t t_ack = 2;
    std::map<std::string, std::uint64_t> delays;
    std::vector<ReplicaScriptOp> script;
};

struct ScenarioMeta {
    std::string name;
    std::uint64_t seed = 0;
    std::string preset;
    double p_drop = 0;
};

struct Scenario {
    ScenarioMeta meta;
    ProvenanceGraph graph;           // observed influence edges
    EdgeSet ground_truth_influence;  // pre-drop provenance, kept for scoring
    RepairEvent event;
    InterfaceContract contract;
    std::map<ArtifactId, CandidateInputs> inputs;
    ExampleProvenance example_provenance;
    ReplicaSetup replicas;
    std::vector<TaskTrace> tasks;
};

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);
void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

// Bundle split/merge: one JSON file per top-level section in a directory.
void split_scenario(const Scenario& s, const std::string& dir);
Scenario merge_scenario(const std::string& dir);

enum class Policy { NoAction, RemoveAll, RepairAll, BarrierGreedy, MemoRepair };
Policy policy_from_string(const std::string& s);
std::string to_string(Policy p);

struct PolicyRun {
    MetricsReport metrics;
    std::optional<RepairPlan> plan;  // absent for no_action
    std::size_t dplus_size = 0;
    std::size_t republished = 0;
    std::string candidates_json;  // audit dump, empty for no_action
};

PolicyRun run_policy(const Scenario& scenario, Policy policy, const Rational& lambda,
                     const OracleConfig& oracle);

// Generator: shape presets follow the per-event cascade statistics the
// harness targets; ground truth is always retained next to the (possibly
// perturbed) observed edge set.
struct GeneratorSpec {
    std::string preset = "toolbench_deletion";
    std::uint64_t seed = 42;
    EventType event_type = EventType::Delete;
    int roots_min = 1, roots_max = 8;
    int cascade_min = 12, cascade_max = 128;  // |C(F)|
    int dplus_min = 9, dplus_max = 96;        // |D+(F)|
    int background_nodes = 12;
    double p_drop = 0;
    double validation_fail_prob = 0.08;
    bool all_validations_fail = false;  // adversarial oracle fixtures
    bool with_partition_script = false;
    int replica_count = 3;
    int task_count = 12;
};

// Known presets: {toolbench, memoryarena} x {deletion, correction, migration}.
GeneratorSpec preset_spec(const std::string& name);
std::vector<std::string> preset_names();

// Generator-spec file format: a preset name plus field overrides.
GeneratorSpec generator_spec_from_json(const std::string& text);
std::string generator_spec_to_json(const GeneratorSpec& spec);

Scenario generate(const GeneratorSpec& spec);

// Hand-encoded case fixtures: case1_deletion, case2_correction,
// case3_migration, case4_structural_failure.
Scenario load_fixture(const std::string& name);
std::vector<std::string> fixture_names();

}  // namespace memorepair
