// SPDX-License-Identifier: Apache-2.0
#pragma once
// Barrier-first plan execution.
//
// The cascade is withdrawn before any repair work. Each round solves the
// selection problem on the current candidate family, stages selected
// successors in topological order over the repair dependencies, validates
// every staged draft, and quarantines failures (v <- 0). The loop repeats on
// the updated family until a round has no failures; only then are successors
// republished, in one batch. Originals never return to service.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "memorepair/candidate.hpp"
#include "memorepair/rational.hpp"
#include "memorepair/replica.hpp"
#include "memorepair/selector.hpp"
#include "memorepair/validation.hpp"

namespace memorepair {

enum class SelectorKind {
    MinCut,        // exact scalarized selection
    Greedy,        // value-to-cost heuristic under the same lambda
    Everything,    // all currently executable candidates (exhaustive repair)
    Nothing,       // barrier only
};

struct ExecOptions {
    SelectorKind selector = SelectorKind::MinCut;
    Rational lambda{3, 10};
    OracleConfig oracle;
    // Exhaustive repair invokes operators even when a staged predecessor is
    // missing; the draft then declares the hidden original and fails the
    // precheck. Selector-driven policies skip such candidates unexecuted.
    bool attempt_without_staged = false;
};

struct RepairPlan {
    std::set<ArtifactId> hidden;  // B_rho
    std::vector<std::pair<ArtifactId, ArtifactId>> republished;  // (target, successor)
    std::set<ArtifactId> quarantined;
    std::set<ArtifactId> selected_final;
    std::map<ArtifactId, SuccessorDraft> staged;
    std::set<ArtifactId> charged;  // operators invoked at least once
    Rational realized_cost{0, 1};
    int rounds = 0;
    BarrierOutcome barrier;
    // target -> published | quarantined | not_selected | removed
    std::map<ArtifactId, std::string> dispositions;
    // (FSP, RU) per evaluated parametric successor, keyed by target.
    std::map<ArtifactId, std::pair<double, double>> param_scores;
};

struct OperatorRequest {
    const RepairContext* ctx = nullptr;
    const Candidate* candidate = nullptr;
    const CandidateInputs* inputs = nullptr;
    const std::map<ArtifactId, ArtifactId>* staged_ids = nullptr;  // target -> successor
    const std::map<ArtifactId, std::string>* staged_digests = nullptr;
};

using RepairOperator = std::function<SuccessorDraft(const OperatorRequest&)>;

// recompute: digest-of-inputs replay; regen: scripted rebuild from retained
// context; param: scripted score emitter. All deterministic.
std::map<std::string, RepairOperator> default_operator_registry();

// Barrier broadcast; fencing handles non-acknowledgement.
BarrierOutcome withdraw(const std::set<ArtifactId>& hidden, Cluster& cluster);

// Stable order over the selected set: every required predecessor precedes its
// dependent, ties broken by ascending id. Throws on cycles (callers flag
// cyclic candidates beforehand).
std::vector<ArtifactId> topological_order(
    const std::set<ArtifactId>& selected,
    const std::vector<std::pair<ArtifactId, ArtifactId>>& req_edges);

// Candidate family as a selection problem: scores quantized to the 1e-6 grid
// for exact arithmetic, non-executable items carried at zero profit (their
// exclusion is forced by the M-arc either way).
SelectionProblem assemble_selection(const CandidateFamily& family, const Rational& lambda);

RepairPlan execute_plan(ProvenanceGraph& g, const RepairContext& ctx, CandidateFamily& family,
                        Cluster& cluster, const std::map<ArtifactId, CandidateInputs>& inputs,
                        const ExampleProvenance& provenance, const ExecOptions& options);

// Inserts validated successors as fresh artifacts with replaces links and
// flips visibility in one batch; targets stay withdrawn.
void batch_republish(RepairPlan& plan, ProvenanceGraph& g, Cluster& cluster);

std::string plan_to_json(const RepairPlan& plan);

// Ordering convention for overlapping events: monotone submission counter
// first; on ties, deletion outranks correction and migration.
struct EventTicket {
    std::uint64_t counter = 0;
    RepairEvent event;
};
bool event_precedes(const EventTicket& a, const EventTicket& b);
std::vector<std::size_t> serialize_events(const std::vector<EventTicket>& tickets);

}  // namespace memorepair
