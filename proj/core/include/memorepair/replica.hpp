// SPDX-License-Identifier: Apache-2.0
#pragma once
// Replica visibility simulator.
//
// Each replica keeps grow-only added / hidden / deleted sets; merge is
// componentwise union and visibility is x in A \ (B u T). Hiding is therefore
// monotone: once withdrawn on a replica, no merge order re-exposes the same
// artifact id. Time is logical and the simulation is deterministic.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "memorepair/types.hpp"

namespace memorepair {

struct ReplicaState {
    std::set<ArtifactId> added;    // A
    std::set<ArtifactId> hidden;   // B
    std::set<ArtifactId> deleted;  // T
    std::uint64_t clock = 0;
};

bool visible(const ReplicaState& r, const ArtifactId& x);
ReplicaState merge(const ReplicaState& a, const ReplicaState& b);

enum class ReplicaStatus { Serving, Fenced, Partitioned };

struct BarrierOutcome {
    std::set<std::string> acked;
    std::set<std::string> fenced;
};

class Cluster {
  public:
    void add_replica(const std::string& id, std::uint64_t delay = 0);
    void seed(const std::set<ArtifactId>& ids);  // initial adds, all replicas

    std::uint64_t t_ack = 2;  // logical acknowledgement budget

    // Reachable replicas whose barrier delay exceeds t_ack are fenced and
    // barred from serving until rejoin; the rest merge the hidden set and ack.
    BarrierOutcome broadcast_barrier(const std::set<ArtifactId>& hidden);
    // Deletion broadcast (event roots, remove-mode descendants).
    void broadcast_delete(const std::set<ArtifactId>& deleted);
    // Single batch visibility flip for validated successors.
    void publish_batch(const std::set<ArtifactId>& successor_ids);

    void merge_replicas(const std::string& a, const std::string& b);
    void partition(const std::string& id);
    // Fenced or partitioned replicas merge the authoritative state and
    // re-enter service; rejoin of a serving replica is a precondition error.
    void rejoin(const std::string& id);

    bool serving(const std::string& id) const;
    const ReplicaState& state(const std::string& id) const;
    const ReplicaState& origin() const { return origin_; }
    std::vector<std::string> replica_ids() const;
    std::vector<std::string> serving_ids() const;

    // True when some serving replica still exposes x.
    bool any_serving_visible(const ArtifactId& x) const;

  private:
    ReplicaState& state_mut(const std::string& id);

    std::map<std::string, ReplicaState> replicas_;
    std::map<std::string, ReplicaStatus> status_;
    std::map<std::string, std::uint64_t> delays_;
    ReplicaState origin_;  // coordinator view merged on rejoin
};

}  // namespace memorepair
