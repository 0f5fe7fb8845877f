// SPDX-License-Identifier: Apache-2.0
#pragma once
// Durable-artifact provenance graph.
//
// Influence edges carry causal derivation and are the only edges that enter
// cascade localization; semantic edges support retrieval and never widen
// repair scope. Iterative updates may introduce influence cycles, so
// reachability is computed on the SCC condensation and lifted back to
// artifacts.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "memorepair/types.hpp"

namespace memorepair {

using EdgeSet = std::set<std::pair<ArtifactId, ArtifactId>>;

class ProvenanceGraph {
  public:
    // Throws std::invalid_argument on duplicate id.
    void add_artifact(const Artifact& a);
    // Endpoints must exist; duplicate edges collapse (set semantics),
    // self-loops and cycles are permitted.
    void add_influence_edge(const ArtifactId& u, const ArtifactId& v);
    void add_semantic_edge(const ArtifactId& u, const ArtifactId& v);

    bool has(const ArtifactId& id) const { return nodes_.count(id) != 0; }
    const Artifact& get(const ArtifactId& id) const;
    Artifact& get_mutable(const ArtifactId& id);
    std::size_t size() const { return nodes_.size(); }

    const std::map<ArtifactId, Artifact>& nodes() const { return nodes_; }
    const EdgeSet& influence_edges() const { return influence_; }
    const EdgeSet& semantic_edges() const { return semantic_; }

    const std::set<ArtifactId>& influence_children(const ArtifactId& u) const;
    const std::set<ArtifactId>& influence_parents(const ArtifactId& v) const;

    std::set<ArtifactId> semantic_neighbors(const ArtifactId& x) const;

    std::set<ArtifactId> all_ids() const;

  private:
    std::map<ArtifactId, Artifact> nodes_;
    EdgeSet influence_;
    EdgeSet semantic_;
    std::map<ArtifactId, std::set<ArtifactId>> out_;  // influence adjacency
    std::map<ArtifactId, std::set<ArtifactId>> in_;
};

struct SccCondensation {
    std::map<ArtifactId, int> component_of;
    std::vector<std::vector<ArtifactId>> component_members;  // sorted members
    std::set<std::pair<int, int>> condensed_edges;           // acyclic
};

// Iterative Tarjan over influence edges; component indices are assigned by
// ascending minimum member id so outputs are reproducible.
SccCondensation condense(const ProvenanceGraph& g);

struct Cascade {
    std::set<ArtifactId> affected;     // C(F), includes the roots
    std::set<ArtifactId> descendants;  // D(F) = C(F) \ F
};

// Reachability from the roots over influence edges, computed on the
// condensation and lifted back to artifacts. Throws on unknown root ids.
Cascade cascade(const ProvenanceGraph& g, const std::set<ArtifactId>& roots);

// Reachability over an explicit edge set (used against ground-truth edges
// when the observed graph may have dropped provenance).
std::set<ArtifactId> reach_over_edges(const std::set<ArtifactId>& roots, const EdgeSet& edges);

// Graph file format: one JSON document with sorted "artifacts",
// "influence_edges", and "semantic_edges" arrays; round-trips byte-stable.
std::string graph_to_json(const ProvenanceGraph& g);
ProvenanceGraph graph_from_json(const std::string& text);
void save_graph(const ProvenanceGraph& g, const std::string& path);
ProvenanceGraph load_graph(const std::string& path);

}  // namespace memorepair
