// SPDX-License-Identifier: Apache-2.0
#pragma once
// Repair-candidate construction: deterministic mode map, candidate tuples,
// repair-time dependency graph, and value/cost scoring.
//
// The dependency graph E_req captures repair-time prerequisites only: (j, i)
// means the successor of j must be staged before i's operator runs. Root
// replacements and interface updates reach operators through Ret(e) and the
// post-event contract, never through P_i.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "memorepair/event.hpp"
#include "memorepair/graph.hpp"
#include "memorepair/rational.hpp"

namespace memorepair {

// Per-artifact repair inputs carried by the scenario bundle. Desk-scale
// stand-ins for replay logs, regeneration context, training support, and
// operator resource receipts.
struct ReplayTrace {
    std::vector<ArtifactId> parents;
    std::map<std::string, std::string> args;  // key -> format token
};

struct ResourceCounts {
    double tool = 0;  // replayed tool calls
    double tok = 0;   // regeneration tokens
    double gpu = 0;   // parametric repair time
    double sand = 0;  // sandbox execution time
};

struct TraceStats {
    double uses = 0;
    double downstream_fanout = 0;  // filled in during scoring
    double probes = 0;
};

struct FixtureChecks {
    std::vector<std::string> schema_keys;
    std::optional<std::vector<std::string>> rendered_keys;  // defaults to schema_keys
    std::vector<bool> probes;
    bool safety_ok = true;
    bool sandbox_ok = true;
    std::optional<double> sandbox_seconds;
    std::optional<std::pair<double, double>> param_scores;  // (a_F, a_R)
    std::string payload_text;
};

struct CandidateInputs {
    std::optional<ReplayTrace> replay;
    std::vector<ArtifactId> regen_context;
    std::vector<ArtifactId> sandbox_requires;  // chain skills only
    std::vector<std::string> support;          // neural skills: example ids
    ResourceCounts resources;
    TraceStats trace;
    FixtureChecks checks;
};

using ExampleProvenance = std::map<std::string, std::set<ArtifactId>>;

struct SupportPartition {
    std::set<std::string> forget;     // For: provenance intersects C(F)
    std::set<std::string> fresh;      // New: materialized from replacements
    std::set<std::string> reference;  // Ref = (S \ For) u New
};

struct Candidate {
    ArtifactId target;
    RepairMode mode = RepairMode::Remove;
    std::string operator_ref;
    std::set<ArtifactId> required;            // P_i, subset of D(F)
    std::set<ArtifactId> repairable_required; // P-bar_i = P_i n D+(F)
    bool executable_initial = false;          // v0
    bool executable = false;                  // v, demoted by validation retry
    double value = 0;                         // w_i, frozen at construction
    double cost = 0;                          // c_i, frozen at construction
    Rational cost_exact{0, 1};                // exact c_i for cost accounting
    ResourceCounts resources;
    TraceStats trace;
    std::optional<SupportPartition> support;
    std::string demotion_reason;              // audit: why v0 = 0
};

struct ScoringParams {
    double alpha_tool = 1;
    double alpha_tok = 1;
    double alpha_gpu = 1;
    double alpha_sand = 1;
    double epsilon = 1e-9;
};

// Shared per-event state consumed by candidate construction and execution.
struct RepairContext {
    const ProvenanceGraph* graph = nullptr;
    RepairEvent event;
    InterfaceContract post_contract;  // kappa_e
    RetainedSupport retained;
    std::set<ArtifactId> affected;     // C(F)
    std::set<ArtifactId> descendants;  // D(F)
    std::map<ArtifactId, ReplacementSpec> replacement_by_root;
    std::map<ArtifactId, ArtifactId> replacement_id_by_root;
    std::set<ArtifactId> replacement_ids;  // X_Delta
};

// Validates the event, materializes replacements into the graph, and computes
// cascade, retained support, and the post-event contract.
RepairContext prepare_repair(ProvenanceGraph& g, const RepairEvent& e,
                             const InterfaceContract& contract);

struct CandidateFamily {
    std::vector<Candidate> candidates;  // sorted by target id
    std::map<ArtifactId, std::size_t> index;
    std::set<ArtifactId> dplus;    // D+(F): non-remove descendants
    std::set<ArtifactId> removed;  // remove-mode descendants
    std::vector<std::pair<ArtifactId, ArtifactId>> req_edges;  // E_req (j, i)
    std::set<ArtifactId> initially_executable;                 // E0

    Candidate& at(const ArtifactId& id);
    const Candidate& at(const ArtifactId& id) const;
};

RepairMode assign_mode(const RepairContext& ctx, const ArtifactId& id,
                       const CandidateInputs& inputs, const ExampleProvenance& provenance);

// Requires mode != remove for the target. Performs the static executability
// checks (parent availability, argument formats, repairable requirements,
// reference support) and records P_i.
Candidate build_candidate(const RepairContext& ctx, const ArtifactId& id,
                          const CandidateInputs& inputs, const ExampleProvenance& provenance,
                          const std::map<ArtifactId, RepairMode>& modes);

// E_req from repairable requirements, plus static demotion of cyclic members
// and of candidates whose requirements are (transitively) non-executable.
void build_req_graph(CandidateFamily& family);

void score_cost(CandidateFamily& family, const ScoringParams& params);
void score_value(CandidateFamily& family, const ProvenanceGraph& g,
                 const std::set<ArtifactId>& descendants, const ScoringParams& params);

SupportPartition partition_support(const std::vector<std::string>& support,
                                   const ExampleProvenance& provenance,
                                   const std::set<ArtifactId>& affected, const RepairEvent& e,
                                   const std::vector<std::string>& replacement_examples);

// Full pipeline: modes, candidates, E_req, static demotions, scores.
CandidateFamily build_family(const RepairContext& ctx,
                             const std::map<ArtifactId, CandidateInputs>& inputs,
                             const ExampleProvenance& provenance, const ScoringParams& params);

// Audit dump, sorted by target id.
std::string candidates_to_json(const CandidateFamily& family);

}  // namespace memorepair
