// SPDX-License-Identifier: Apache-2.0
#pragma once
// Repair events, retained support, and the post-event interface contract.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "memorepair/graph.hpp"
#include "memorepair/types.hpp"

namespace memorepair {

// Replacement descriptor supplied by a correction event. Materialization
// turns it into a fresh artifact with no incoming influence edges; the
// replacement reaches candidates through Ret(e), never through P_i.
struct ReplacementSpec {
    ArtifactId id;             // optional; derived from the root when empty
    ArtifactId replaces_root;  // which invalidated root this replaces
    ArtifactKind kind = ArtifactKind::Record;
    std::optional<SkillArch> arch;
    int version = 1;
    // Accepted argument formats per contract key, '|'-separated alternatives.
    // Overlays the interface contract when replay traces are checked.
    std::map<std::string, std::string> schema;
    // Fresh support examples the replacement yields per neural skill.
    std::map<ArtifactId, std::vector<std::string>> examples_for;
};

struct RepairEvent {
    std::set<ArtifactId> roots;  // F, nonempty
    EventType type = EventType::Delete;
    std::vector<ReplacementSpec> replacements;        // correct only
    std::map<std::string, std::string> contract_delta;  // migrate only
};

// Throws std::invalid_argument when the (F, tau, Delta) shape is malformed.
void validate_event(const RepairEvent& e);

struct InterfaceContract {
    std::map<std::string, std::string> entries;  // key -> accepted formats
    int version = 1;
};

// Migration applies the delta rewrites and bumps the version; deletion and
// correction return the contract unchanged. Unknown delta keys are rejected.
InterfaceContract post_interface(const InterfaceContract& contract, const RepairEvent& e);

struct RetainedSupport {
    std::set<ArtifactId> members;
};

// Materializes X_Delta as fresh artifacts (default id convention:
// "<root>-corrected-v<version>"). Ids must not collide with the graph.
std::vector<Artifact> materialize_replacements(const RepairEvent& e, const ProvenanceGraph& g);

// Retained valid support in the post-event universe: V \ C(F), plus the
// materialized replacement ids for corrections.
RetainedSupport retained_support(const ProvenanceGraph& g, const RepairEvent& e,
                                 const std::set<ArtifactId>& affected,
                                 const std::set<ArtifactId>& replacement_ids);

// Event file format: {"roots", "type", "replacements"?, "contract_delta"?}.
std::string event_to_json(const RepairEvent& e);
RepairEvent event_from_json(const std::string& text);

}  // namespace memorepair
