// SPDX-License-Identifier: Apache-2.0
#include "memorepair/event.hpp"

#include <json.hpp>

namespace memorepair {

using nlohmann::json;

void validate_event(const RepairEvent& e) {
    if (e.roots.empty()) throw std::invalid_argument("event with empty root set");
    if (e.type == EventType::Correct && e.replacements.empty()) {
        throw std::invalid_argument("correction event without replacements");
    }
    if (e.type != EventType::Correct && !e.replacements.empty()) {
        throw std::invalid_argument("replacements only valid for correction events");
    }
    if (e.type != EventType::Migrate && !e.contract_delta.empty()) {
        throw std::invalid_argument("contract delta only valid for migration events");
    }
    for (const auto& r : e.replacements) {
        if (!e.roots.count(r.replaces_root)) {
            throw std::invalid_argument("replacement for non-root artifact: " + r.replaces_root);
        }
    }
}

InterfaceContract post_interface(const InterfaceContract& contract, const RepairEvent& e) {
    if (e.type != EventType::Migrate) return contract;
    InterfaceContract out = contract;
    for (const auto& [key, value] : e.contract_delta) {
        auto it = out.entries.find(key);
        if (it == out.entries.end()) {
            throw std::invalid_argument("migration delta references unknown contract key: " + key);
        }
        it->second = value;
    }
    out.version = contract.version + 1;  // strictly increases even for an empty delta
    return out;
}

std::vector<Artifact> materialize_replacements(const RepairEvent& e, const ProvenanceGraph& g) {
    if (e.type != EventType::Correct) return {};
    std::vector<Artifact> out;
    for (const auto& spec : e.replacements) {
        Artifact a;
        a.id = spec.id.empty()
                   ? spec.replaces_root + "-corrected-v" + std::to_string(spec.version)
                   : spec.id;
        if (g.has(a.id)) throw std::invalid_argument("replacement id already in graph: " + a.id);
        a.kind = spec.kind;
        a.arch = spec.arch;
        a.version = spec.version;
        a.payload_digest = "corrected:" + spec.replaces_root;
        a.replaces = spec.replaces_root;
        out.push_back(std::move(a));
    }
    return out;
}

RetainedSupport retained_support(const ProvenanceGraph& g, const RepairEvent& e,
                                 const std::set<ArtifactId>& affected,
                                 const std::set<ArtifactId>& replacement_ids) {
    if (e.type == EventType::Correct && e.replacements.empty()) {
        throw std::invalid_argument("correction event without replacements");
    }
    RetainedSupport out;
    for (const auto& [id, a] : g.nodes()) {
        if (!affected.count(id)) out.members.insert(id);
    }
    if (e.type == EventType::Correct) {
        out.members.insert(replacement_ids.begin(), replacement_ids.end());
    }
    return out;
}

std::string event_to_json(const RepairEvent& e) {
    json j;
    j["roots"] = json::array();
    for (const auto& r : e.roots) j["roots"].push_back(r);
    j["type"] = to_string(e.type);
    if (!e.replacements.empty()) {
        j["replacements"] = json::array();
        for (const auto& r : e.replacements) {
            json rj;
            if (!r.id.empty()) rj["id"] = r.id;
            rj["replaces_root"] = r.replaces_root;
            rj["kind"] = to_string(r.kind);
            if (r.arch) rj["arch"] = to_string(*r.arch);
            rj["version"] = r.version;
            if (!r.schema.empty()) rj["schema"] = r.schema;
            if (!r.examples_for.empty()) rj["examples_for"] = r.examples_for;
            j["replacements"].push_back(rj);
        }
    }
    if (!e.contract_delta.empty()) j["contract_delta"] = e.contract_delta;
    return j.dump(2) + "\n";
}

RepairEvent event_from_json(const std::string& text) {
    json j = json::parse(text);
    RepairEvent e;
    for (const auto& r : j.at("roots")) e.roots.insert(r.get<std::string>());
    e.type = event_type_from_string(j.at("type").get<std::string>());
    if (j.contains("replacements")) {
        for (const auto& rj : j.at("replacements")) {
            ReplacementSpec r;
            r.id = rj.value("id", std::string());
            r.replaces_root = rj.at("replaces_root").get<std::string>();
            r.kind = kind_from_string(rj.value("kind", std::string("record")));
            if (rj.contains("arch")) r.arch = arch_from_string(rj.at("arch").get<std::string>());
            r.version = rj.value("version", 1);
            if (rj.contains("schema")) {
                r.schema = rj.at("schema").get<std::map<std::string, std::string>>();
            }
            if (rj.contains("examples_for")) {
                r.examples_for =
                    rj.at("examples_for").get<std::map<std::string, std::vector<std::string>>>();
            }
            e.replacements.push_back(std::move(r));
        }
    }
    if (j.contains("contract_delta")) {
        e.contract_delta = j.at("contract_delta").get<std::map<std::string, std::string>>();
    }
    validate_event(e);
    return e;
}

}  // namespace memorepair
