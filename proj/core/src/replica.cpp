// SPDX-License-Identifier: Apache-2.0
#include "memorepair/replica.hpp"

#include <algorithm>
#include <stdexcept>

namespace memorepair {

bool visible(const ReplicaState& r, const ArtifactId& x) {
    return r.added.count(x) != 0 && r.hidden.count(x) == 0 && r.deleted.count(x) == 0;
}

ReplicaState merge(const ReplicaState& a, const ReplicaState& b) {
    ReplicaState out;
    out.added = a.added;
    out.added.insert(b.added.begin(), b.added.end());
    out.hidden = a.hidden;
    out.hidden.insert(b.hidden.begin(), b.hidden.end());
    out.deleted = a.deleted;
    out.deleted.insert(b.deleted.begin(), b.deleted.end());
    out.clock = std::max(a.clock, b.clock) + 1;
    return out;
}

void Cluster::add_replica(const std::string& id, std::uint64_t delay) {
    if (replicas_.count(id)) throw std::invalid_argument("duplicate replica: " + id);
    replicas_[id] = ReplicaState{};
    status_[id] = ReplicaStatus::Serving;
    delays_[id] = delay;
}

void Cluster::seed(const std::set<ArtifactId>& ids) {
    origin_.added.insert(ids.begin(), ids.end());
    for (auto& [id, r] : replicas_) r.added.insert(ids.begin(), ids.end());
}

BarrierOutcome Cluster::broadcast_barrier(const std::set<ArtifactId>& hidden) {
    BarrierOutcome out;
    origin_.hidden.insert(hidden.begin(), hidden.end());
    origin_.clock++;
    for (auto& [id, r] : replicas_) {
        if (status_[id] != ReplicaStatus::Serving) continue;
        if (delays_[id] <= t_ack) {
            r.hidden.insert(hidden.begin(), hidden.end());
            r.clock++;
            out.acked.insert(id);
        } else {
            status_[id] = ReplicaStatus::Fenced;
            out.fenced.insert(id);
        }
    }
    return out;
}

void Cluster::broadcast_delete(const std::set<ArtifactId>& deleted) {
    origin_.deleted.insert(deleted.begin(), deleted.end());
    origin_.clock++;
    for (auto& [id, r] : replicas_) {
        if (status_[id] != ReplicaStatus::Serving) continue;
        r.deleted.insert(deleted.begin(), deleted.end());
        r.clock++;
    }
}

void Cluster::publish_batch(const std::set<ArtifactId>& successor_ids) {
    origin_.added.insert(successor_ids.begin(), successor_ids.end());
    origin_.clock++;
    for (auto& [id, r] : replicas_) {
        if (status_[id] != ReplicaStatus::Serving) continue;
        r.added.insert(successor_ids.begin(), successor_ids.end());
        r.clock++;
    }
}

void Cluster::merge_replicas(const std::string& a, const std::string& b) {
    ReplicaState merged = merge(state(a), state(b));
    state_mut(a) = merged;
    state_mut(b) = merged;
}

void Cluster::partition(const std::string& id) {
    if (!replicas_.count(id)) throw std::invalid_argument("unknown replica: " + id);
    status_[id] = ReplicaStatus::Partitioned;
}

void Cluster::rejoin(const std::string& id) {
    auto it = status_.find(id);
    if (it == status_.end()) throw std::invalid_argument("unknown replica: " + id);
    if (it->second == ReplicaStatus::Serving) {
        throw std::invalid_argument("rejoin of serving replica: " + id);
    }
    // Merge the current barrier state before returning to service.
    state_mut(id) = merge(state(id), origin_);
    it->second = ReplicaStatus::Serving;
}

bool Cluster::serving(const std::string& id) const {
    auto it = status_.find(id);
    return it != status_.end() && it->second == ReplicaStatus::Serving;
}

const ReplicaState& Cluster::state(const std::string& id) const {
    auto it = replicas_.find(id);
    if (it == replicas_.end()) throw std::invalid_argument("unknown replica: " + id);
    return it->second;
}

ReplicaState& Cluster::state_mut(const std::string& id) {
    auto it = replicas_.find(id);
    if (it == replicas_.end()) throw std::invalid_argument("unknown replica: " + id);
    return it->second;
}

std::vector<std::string> Cluster::replica_ids() const {
    std::vector<std::string> out;
    for (const auto& [id, r] : replicas_) out.push_back(id);
    return out;
}

std::vector<std::string> Cluster::serving_ids() const {
    std::vector<std::string> out;
    for (const auto& [id, r] : replicas_) {
        if (serving(id)) out.push_back(id);
    }
    return out;
}

bool Cluster::any_serving_visible(const ArtifactId& x) const {
    for (const auto& [id, r] : replicas_) {
        if (serving(id) && visible(r, x)) return true;
    }
    return false;
}

}  // namespace memorepair
