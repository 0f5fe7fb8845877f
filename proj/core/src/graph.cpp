// SPDX-License-Identifier: Apache-2.0
#include "memorepair/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "scc_util.hpp"

namespace memorepair {

using nlohmann::json;

std::string to_string(ArtifactKind k) {
    switch (k) {
        case ArtifactKind::Record: return "record";
        case ArtifactKind::Cache: return "cache";
        case ArtifactKind::Summary: return "summary";
        case ArtifactKind::Skill: return "skill";
    }
    return "record";
}

std::string to_string(SkillArch a) {
    switch (a) {
        case SkillArch::Neural: return "neural";
        case SkillArch::Prompt: return "prompt";
        case SkillArch::Chain: return "chain";
    }
    return "neural";
}

std::string to_string(ArtifactState s) {
    switch (s) {
        case ArtifactState::Active: return "active";
        case ArtifactState::Withdrawn: return "withdrawn";
        case ArtifactState::Removed: return "removed";
        case ArtifactState::Quarantined: return "quarantined";
    }
    return "active";
}

std::string to_string(EventType t) {
    switch (t) {
        case EventType::Delete: return "delete";
        case EventType::Correct: return "correct";
        case EventType::Migrate: return "migrate";
    }
    return "delete";
}

std::string to_string(RepairMode m) {
    switch (m) {
        case RepairMode::Remove: return "remove";
        case RepairMode::Recompute: return "recompute";
        case RepairMode::Regen: return "regen";
        case RepairMode::Param: return "param";
    }
    return "remove";
}

ArtifactKind kind_from_string(const std::string& s) {
    if (s == "record") return ArtifactKind::Record;
    if (s == "cache") return ArtifactKind::Cache;
    if (s == "summary") return ArtifactKind::Summary;
    if (s == "skill") return ArtifactKind::Skill;
    throw std::invalid_argument("unknown artifact kind: " + s);
}

SkillArch arch_from_string(const std::string& s) {
    if (s == "neural") return SkillArch::Neural;
    if (s == "prompt") return SkillArch::Prompt;
    if (s == "chain") return SkillArch::Chain;
    throw std::invalid_argument("unknown skill arch: " + s);
}

ArtifactState state_from_string(const std::string& s) {
    if (s == "active") return ArtifactState::Active;
    if (s == "withdrawn") return ArtifactState::Withdrawn;
    if (s == "removed") return ArtifactState::Removed;
    if (s == "quarantined") return ArtifactState::Quarantined;
    throw std::invalid_argument("unknown artifact state: " + s);
}

EventType event_type_from_string(const std::string& s) {
    if (s == "delete") return EventType::Delete;
    if (s == "correct") return EventType::Correct;
    if (s == "migrate") return EventType::Migrate;
    throw std::invalid_argument("unknown event type: " + s);
}

RepairMode mode_from_string(const std::string& s) {
    if (s == "remove") return RepairMode::Remove;
    if (s == "recompute") return RepairMode::Recompute;
    if (s == "regen") return RepairMode::Regen;
    if (s == "param") return RepairMode::Param;
    throw std::invalid_argument("unknown repair mode: " + s);
}

void ProvenanceGraph::add_artifact(const Artifact& a) {
    if (a.id.empty()) throw std::invalid_argument("artifact with empty id");
    if (nodes_.count(a.id)) throw std::invalid_argument("duplicate id: " + a.id);
    if ((a.kind == ArtifactKind::Skill) != a.arch.has_value()) {
        throw std::invalid_argument("arch tag present iff kind=skill: " + a.id);
    }
    if (a.replaces && !nodes_.count(*a.replaces)) {
        throw std::invalid_argument("replaces names unknown artifact: " + *a.replaces);
    }
    nodes_.emplace(a.id, a);
}

void ProvenanceGraph::add_influence_edge(const ArtifactId& u, const ArtifactId& v) {
    if (!nodes_.count(u)) throw std::invalid_argument("unknown edge endpoint: " + u);
    if (!nodes_.count(v)) throw std::invalid_argument("unknown edge endpoint: " + v);
    influence_.insert({u, v});
    out_[u].insert(v);
    in_[v].insert(u);
}

void ProvenanceGraph::add_semantic_edge(const ArtifactId& u, const ArtifactId& v) {
    if (!nodes_.count(u)) throw std::invalid_argument("unknown edge endpoint: " + u);
    if (!nodes_.count(v)) throw std::invalid_argument("unknown edge endpoint: " + v);
    semantic_.insert({u, v});
}

const Artifact& ProvenanceGraph::get(const ArtifactId& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::invalid_argument("unknown artifact: " + id);
    return it->second;
}

Artifact& ProvenanceGraph::get_mutable(const ArtifactId& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::invalid_argument("unknown artifact: " + id);
    return it->second;
}

const std::set<ArtifactId>& ProvenanceGraph::influence_children(const ArtifactId& u) const {
    static const std::set<ArtifactId> kEmpty;
    auto it = out_.find(u);
    return it == out_.end() ? kEmpty : it->second;
}

const std::set<ArtifactId>& ProvenanceGraph::influence_parents(const ArtifactId& v) const {
    static const std::set<ArtifactId> kEmpty;
    auto it = in_.find(v);
    return it == in_.end() ? kEmpty : it->second;
}

std::set<ArtifactId> ProvenanceGraph::semantic_neighbors(const ArtifactId& x) const {
    if (!nodes_.count(x)) throw std::invalid_argument("unknown artifact: " + x);
    std::set<ArtifactId> out;
    for (const auto& [u, v] : semantic_) {
        if (u == x) out.insert(v);
        if (v == x) out.insert(u);
    }
    return out;
}

std::set<ArtifactId> ProvenanceGraph::all_ids() const {
    std::set<ArtifactId> ids;
    for (const auto& [id, a] : nodes_) ids.insert(id);
    return ids;
}

SccCondensation condense(const ProvenanceGraph& g) {
    std::vector<ArtifactId> ids;
    ids.reserve(g.size());
    for (const auto& [id, a] : g.nodes()) ids.push_back(id);
    std::map<ArtifactId, int> index_of;
    for (int i = 0; i < (int)ids.size(); ++i) index_of[ids[i]] = i;

    int n = (int)ids.size();
    std::vector<std::vector<int>> adj(n);
    for (const auto& [u, v] : g.influence_edges()) adj[index_of[u]].push_back(index_of[v]);

    std::vector<std::vector<int>> comps = detail::scc_components(adj);
    std::vector<int> comp(n, -1);
    for (std::size_t c = 0; c < comps.size(); ++c) {
        for (int m : comps[c]) comp[m] = (int)c;
    }

    // Renumber components by ascending minimum member id.
    std::vector<ArtifactId> comp_min(comps.size());
    for (std::size_t c = 0; c < comps.size(); ++c) {
        ArtifactId mn = ids[comps[c][0]];
        for (int m : comps[c]) mn = std::min(mn, ids[m]);
        comp_min[c] = mn;
    }
    std::vector<int> order(comps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return comp_min[a] < comp_min[b]; });
    std::vector<int> renum(comps.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) renum[order[pos]] = (int)pos;

    SccCondensation out;
    out.component_members.resize(comps.size());
    for (std::size_t c = 0; c < comps.size(); ++c) {
        std::vector<ArtifactId> members;
        for (int m : comps[c]) members.push_back(ids[m]);
        std::sort(members.begin(), members.end());
        out.component_members[renum[c]] = std::move(members);
    }
    for (int v = 0; v < n; ++v) out.component_of[ids[v]] = renum[comp[v]];
    for (const auto& [u, v] : g.influence_edges()) {
        int cu = out.component_of[u], cv = out.component_of[v];
        if (cu != cv) out.condensed_edges.insert({cu, cv});
    }
    return out;
}

Cascade cascade(const ProvenanceGraph& g, const std::set<ArtifactId>& roots) {
    for (const auto& r : roots) {
        if (!g.has(r)) throw std::invalid_argument("unknown cascade root: " + r);
    }
    Cascade out;
    if (roots.empty()) return out;

    SccCondensation cond = condense(g);
    std::map<int, std::vector<int>> cadj;
    for (const auto& [a, b] : cond.condensed_edges) cadj[a].push_back(b);

    std::set<int> seen;
    std::deque<int> queue;
    for (const auto& r : roots) {
        int c = cond.component_of.at(r);
        if (seen.insert(c).second) queue.push_back(c);
    }
    while (!queue.empty()) {
        int c = queue.front();
        queue.pop_front();
        auto it = cadj.find(c);
        if (it == cadj.end()) continue;
        for (int nxt : it->second) {
            if (seen.insert(nxt).second) queue.push_back(nxt);
        }
    }
    for (int c : seen) {
        for (const auto& m : cond.component_members[c]) out.affected.insert(m);
    }
    for (const auto& id : out.affected) {
        if (!roots.count(id)) out.descendants.insert(id);
    }
    return out;
}

std::set<ArtifactId> reach_over_edges(const std::set<ArtifactId>& roots, const EdgeSet& edges) {
    std::map<ArtifactId, std::vector<ArtifactId>> adj;
    for (const auto& [u, v] : edges) adj[u].push_back(v);
    std::set<ArtifactId> seen = roots;
    std::deque<ArtifactId> queue(roots.begin(), roots.end());
    while (!queue.empty()) {
        ArtifactId u = queue.front();
        queue.pop_front();
        auto it = adj.find(u);
        if (it == adj.end()) continue;
        for (const auto& v : it->second) {
            if (seen.insert(v).second) queue.push_back(v);
        }
    }
    return seen;
}

json artifact_to_json(const Artifact& a) {
    json j;
    j["id"] = a.id;
    j["kind"] = to_string(a.kind);
    if (a.arch) j["arch"] = to_string(*a.arch);
    j["version"] = a.version;
    if (!a.payload_digest.empty()) j["digest"] = a.payload_digest;
    if (a.replaces) j["replaces"] = *a.replaces;
    if (a.state != ArtifactState::Active) j["state"] = to_string(a.state);
    return j;
}

Artifact artifact_from_json(const json& j) {
    Artifact a;
    a.id = j.at("id").get<std::string>();
    a.kind = kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("arch")) a.arch = arch_from_string(j.at("arch").get<std::string>());
    a.version = j.value("version", 1);
    a.payload_digest = j.value("digest", std::string());
    if (j.contains("replaces")) a.replaces = j.at("replaces").get<std::string>();
    if (j.contains("state")) a.state = state_from_string(j.at("state").get<std::string>());
    return a;
}

std::string graph_to_json(const ProvenanceGraph& g) {
    json j;
    j["artifacts"] = json::array();
    for (const auto& [id, a] : g.nodes()) j["artifacts"].push_back(artifact_to_json(a));
    j["influence_edges"] = json::array();
    for (const auto& [u, v] : g.influence_edges()) j["influence_edges"].push_back({u, v});
    j["semantic_edges"] = json::array();
    for (const auto& [u, v] : g.semantic_edges()) j["semantic_edges"].push_back({u, v});
    return j.dump(2) + "\n";
}

ProvenanceGraph graph_from_json(const std::string& text) {
    json j = json::parse(text);
    ProvenanceGraph g;
    // Two passes so that "replaces" links can point at any artifact in the file.
    std::vector<Artifact> parsed;
    for (const auto& aj : j.at("artifacts")) parsed.push_back(artifact_from_json(aj));
    for (auto& a : parsed) {
        auto replaces = a.replaces;
        a.replaces.reset();
        g.add_artifact(a);
        if (replaces) a.replaces = replaces;
    }
    for (const auto& a : parsed) {
        if (!a.replaces) continue;
        if (!g.has(*a.replaces)) {
            throw std::invalid_argument("replaces names unknown artifact: " + *a.replaces);
        }
        g.get_mutable(a.id).replaces = a.replaces;
    }
    if (j.contains("influence_edges")) {
        for (const auto& e : j.at("influence_edges")) {
            g.add_influence_edge(e.at(0).get<std::string>(), e.at(1).get<std::string>());
        }
    }
    if (j.contains("semantic_edges")) {
        for (const auto& e : j.at("semantic_edges")) {
            g.add_semantic_edge(e.at(0).get<std::string>(), e.at(1).get<std::string>());
        }
    }
    return g;
}

void save_graph(const ProvenanceGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << graph_to_json(g);
}

ProvenanceGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return graph_from_json(buf.str());
}

}  // namespace memorepair
