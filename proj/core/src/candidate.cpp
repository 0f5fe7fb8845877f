// SPDX-License-Identifier: Apache-2.0
#include "memorepair/candidate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include <json.hpp>

#include "scc_util.hpp"

namespace memorepair {

using nlohmann::json;

namespace {

bool format_accepted(const std::string& accepted, const std::string& fmt) {
    std::size_t start = 0;
    while (start <= accepted.size()) {
        std::size_t bar = accepted.find('|', start);
        std::string token = accepted.substr(start, bar == std::string::npos ? std::string::npos
                                                                            : bar - start);
        if (token == fmt) return true;
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    return false;
}

// Availability of a consumed input in the post-event universe. Affected
// descendants are handled separately (they go into P_i).
enum class InputStatus { Retained, Replaced, Affected, Missing };

InputStatus classify_input(const RepairContext& ctx, const ArtifactId& p) {
    if (ctx.event.roots.count(p)) {
        if (ctx.event.type == EventType::Correct && ctx.replacement_id_by_root.count(p)) {
            return InputStatus::Replaced;
        }
        // Migration keeps the root's function flowing through the contract.
        if (ctx.event.type == EventType::Migrate) return InputStatus::Retained;
        return InputStatus::Missing;
    }
    if (ctx.affected.count(p)) return InputStatus::Affected;
    return InputStatus::Retained;
}

}  // namespace

RepairContext prepare_repair(ProvenanceGraph& g, const RepairEvent& e,
                             const InterfaceContract& contract) {
    validate_event(e);
    RepairContext ctx;
    ctx.event = e;
    ctx.post_contract = post_interface(contract, e);

    Cascade casc = cascade(g, e.roots);
    ctx.affected = casc.affected;
    ctx.descendants = casc.descendants;

    for (const Artifact& a : materialize_replacements(e, g)) {
        g.add_artifact(a);
        ctx.replacement_ids.insert(a.id);
        ctx.replacement_id_by_root[*a.replaces] = a.id;
    }
    for (const auto& spec : e.replacements) {
        ctx.replacement_by_root[spec.replaces_root] = spec;
    }
    ctx.retained = retained_support(g, e, ctx.affected, ctx.replacement_ids);
    ctx.graph = &g;
    return ctx;
}

SupportPartition partition_support(const std::vector<std::string>& support,
                                   const ExampleProvenance& provenance,
                                   const std::set<ArtifactId>& affected, const RepairEvent& e,
                                   const std::vector<std::string>& replacement_examples) {
    SupportPartition out;
    for (const auto& z : support) {
        auto it = provenance.find(z);
        if (it == provenance.end()) {
            throw std::invalid_argument("support example without provenance: " + z);
        }
        bool touches = false;
        for (const auto& a : it->second) {
            if (affected.count(a)) {
                touches = true;
                break;
            }
        }
        if (touches) {
            out.forget.insert(z);
        } else {
            out.reference.insert(z);
        }
    }
    if (e.type == EventType::Correct) {
        for (const auto& z : replacement_examples) {
            out.fresh.insert(z);
            out.reference.insert(z);
        }
    }
    return out;
}

RepairMode assign_mode(const RepairContext& ctx, const ArtifactId& id,
                       const CandidateInputs& inputs, const ExampleProvenance& provenance) {
    if (!ctx.descendants.count(id)) {
        throw std::invalid_argument("mode assignment for unaffected artifact: " + id);
    }
    const Artifact& a = ctx.graph->get(id);

    if (a.kind == ArtifactKind::Record || a.kind == ArtifactKind::Cache) {
        // Replayable deterministic artifacts recompute; everything else about
        // the replay (parent availability, argument formats) is an
        // executability question, not a mode question.
        return inputs.replay ? RepairMode::Recompute : RepairMode::Remove;
    }

    bool regen_kind = a.kind == ArtifactKind::Summary ||
                      (a.kind == ArtifactKind::Skill && a.arch &&
                       (*a.arch == SkillArch::Prompt || *a.arch == SkillArch::Chain));
    if (regen_kind) {
        // Sufficient retained support: at least one influence parent outside
        // the cascade, or a replaced root parent.
        for (const auto& p : ctx.graph->influence_parents(id)) {
            InputStatus st = classify_input(ctx, p);
            if (st == InputStatus::Retained || st == InputStatus::Replaced) {
                return RepairMode::Regen;
            }
        }
        return RepairMode::Remove;
    }

    if (a.kind == ArtifactKind::Skill && a.arch && *a.arch == SkillArch::Neural) {
        if (inputs.support.empty()) return RepairMode::Remove;
        SupportPartition part = partition_support(inputs.support, provenance, ctx.affected,
                                                  ctx.event, {});
        // Forget support must exist for a parametric contract; an empty
        // reference set demotes executability later but keeps the candidate
        // in D+ for accounting.
        return part.forget.empty() ? RepairMode::Remove : RepairMode::Param;
    }
    return RepairMode::Remove;
}

namespace {

std::vector<std::string> replacement_examples_for(const RepairContext& ctx, const ArtifactId& id) {
    std::vector<std::string> out;
    for (const auto& spec : ctx.event.replacements) {
        auto it = spec.examples_for.find(id);
        if (it != spec.examples_for.end()) {
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    }
    return out;
}

}  // namespace

Candidate build_candidate(const RepairContext& ctx, const ArtifactId& id,
                          const CandidateInputs& inputs, const ExampleProvenance& provenance,
                          const std::map<ArtifactId, RepairMode>& modes) {
    RepairMode mode = modes.at(id);
    if (mode == RepairMode::Remove) {
        throw std::invalid_argument("candidate for remove-mode target: " + id);
    }

    Candidate cand;
    cand.target = id;
    cand.mode = mode;
    cand.operator_ref = to_string(mode);
    cand.resources = inputs.resources;
    cand.trace = inputs.trace;
    cand.executable_initial = true;

    auto demote = [&cand](const std::string& reason) {
        if (cand.executable_initial) {
            cand.executable_initial = false;
            cand.demotion_reason = reason;
        }
    };

    auto require_input = [&](const ArtifactId& p) {
        switch (classify_input(ctx, p)) {
            case InputStatus::Retained:
            case InputStatus::Replaced:
                return;
            case InputStatus::Missing:
                demote("missing parent: " + p);
                return;
            case InputStatus::Affected: {
                cand.required.insert(p);
                auto it = modes.find(p);
                if (it == modes.end() || it->second == RepairMode::Remove) {
                    demote("requires non-repairable descendant: " + p);
                }
                return;
            }
        }
    };

    if (mode == RepairMode::Recompute) {
        const ReplayTrace& replay = *inputs.replay;
        for (const auto& p : replay.parents) require_input(p);
        // Effective schema: post-event contract overlaid by replacement
        // schemas of replaced root parents.
        std::map<std::string, std::string> schema = ctx.post_contract.entries;
        for (const auto& p : replay.parents) {
            auto rit = ctx.replacement_by_root.find(p);
            if (rit != ctx.replacement_by_root.end()) {
                for (const auto& [k, v] : rit->second.schema) schema[k] = v;
            }
        }
        for (const auto& [key, fmt] : replay.args) {
            auto sit = schema.find(key);
            if (sit == schema.end()) {
                demote("argument key not in post-event schema: " + key);
            } else if (!format_accepted(sit->second, fmt)) {
                demote("argument format not accepted: " + key + "=" + fmt);
            }
        }
    } else if (mode == RepairMode::Regen) {
        const Artifact& a = ctx.graph->get(id);
        std::set<ArtifactId> consumed(inputs.regen_context.begin(), inputs.regen_context.end());
        if (a.arch && *a.arch == SkillArch::Chain) {
            consumed.insert(inputs.sandbox_requires.begin(), inputs.sandbox_requires.end());
        }
        for (const auto& p : consumed) require_input(p);
    } else {  // Param
        SupportPartition part = partition_support(inputs.support, provenance, ctx.affected,
                                                  ctx.event, replacement_examples_for(ctx, id));
        if (part.reference.empty()) demote("empty reference support");
        cand.support = std::move(part);
    }
    return cand;
}

Candidate& CandidateFamily::at(const ArtifactId& id) {
    return candidates.at(index.at(id));
}

const Candidate& CandidateFamily::at(const ArtifactId& id) const {
    return candidates.at(index.at(id));
}

void build_req_graph(CandidateFamily& family) {
    family.req_edges.clear();
    for (auto& cand : family.candidates) {
        cand.repairable_required.clear();
        for (const auto& p : cand.required) {
            if (family.dplus.count(p)) cand.repairable_required.insert(p);
        }
        for (const auto& j : cand.repairable_required) {
            family.req_edges.emplace_back(j, cand.target);
        }
    }
    std::sort(family.req_edges.begin(), family.req_edges.end());

    // Cyclic repair requirements are unsatisfiable under any staging order.
    const std::size_t n = family.candidates.size();
    std::vector<std::vector<int>> adj(n);
    for (const auto& [j, i] : family.req_edges) {
        adj[family.index.at(j)].push_back((int)family.index.at(i));
    }
    for (const auto& comp : detail::scc_components(adj)) {
        if (comp.size() <= 1) continue;
        for (int m : comp) {
            Candidate& cand = family.candidates[m];
            if (cand.executable_initial) {
                cand.executable_initial = false;
                cand.demotion_reason = "cyclic repair requirement";
            }
        }
    }

    // A requirement that can never be staged is unavailable: non-executability
    // propagates to dependents before any operator runs.
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& cand : family.candidates) {
            if (!cand.executable_initial) continue;
            for (const auto& j : cand.repairable_required) {
                if (!family.at(j).executable_initial) {
                    cand.executable_initial = false;
                    cand.demotion_reason = "requires quarantined candidate: " + j;
                    changed = true;
                    break;
                }
            }
        }
    }

    family.initially_executable.clear();
    for (auto& cand : family.candidates) {
        cand.executable = cand.executable_initial;
        if (cand.executable_initial) family.initially_executable.insert(cand.target);
    }
}

void score_cost(CandidateFamily& family, const ScoringParams& params) {
    auto raw_exact = [&](const Candidate& c) {
        Rational total(0, 1);
        total += Rational::from_double_scaled(params.alpha_tool * c.resources.tool, 1000);
        total += Rational::from_double_scaled(params.alpha_tok * c.resources.tok, 1000);
        total += Rational::from_double_scaled(params.alpha_gpu * c.resources.gpu, 1000);
        total += Rational::from_double_scaled(params.alpha_sand * c.resources.sand, 1000);
        if (total.negative()) throw std::invalid_argument("negative resource counts");
        return total;
    };

    if (family.initially_executable.empty()) {
        for (auto& c : family.candidates) {
            c.cost = 0;
            c.cost_exact = Rational(0, 1);
        }
        return;
    }
    Rational denom = Rational::from_double_scaled(params.epsilon, 1000000000);
    for (const auto& id : family.initially_executable) denom += raw_exact(family.at(id));
    if (denom.is_zero()) {
        for (auto& c : family.candidates) {
            c.cost = 0;
            c.cost_exact = Rational(0, 1);
        }
        return;
    }
    for (auto& c : family.candidates) {
        c.cost_exact = raw_exact(c) / denom;
        c.cost = c.cost_exact.to_double();
    }
}

void score_value(CandidateFamily& family, const ProvenanceGraph& g,
                 const std::set<ArtifactId>& descendants, const ScoringParams& params) {
    if (family.initially_executable.empty()) {
        for (auto& c : family.candidates) c.value = 0;
        return;
    }
    double max_probe = 0;
    for (const auto& id : family.initially_executable) {
        max_probe = std::max(max_probe, family.at(id).trace.probes);
    }

    auto raw = [&](Candidate& c) {
        auto reach = reach_over_edges({c.target}, g.influence_edges());
        reach.erase(c.target);
        std::size_t fanout = 0;
        for (const auto& r : reach) {
            if (descendants.count(r)) ++fanout;
        }
        c.trace.downstream_fanout = (double)fanout;
        return std::log1p(c.trace.uses) + std::log1p((double)fanout) +
               c.trace.probes / (max_probe + params.epsilon);
    };

    std::vector<double> tilde(family.candidates.size(), 0);
    for (std::size_t i = 0; i < family.candidates.size(); ++i) {
        tilde[i] = raw(family.candidates[i]);
    }

    double denom = params.epsilon;
    bool any_positive = false;
    for (const auto& id : family.initially_executable) {
        double t = tilde[family.index.at(id)];
        denom += t;
        if (t > 0) any_positive = true;
    }

    if (!family.initially_executable.empty() && !any_positive) {
        // Degenerate traces: uniform values over E0.
        double uniform = 1.0 / (double)family.initially_executable.size();
        for (auto& c : family.candidates) {
            c.value = family.initially_executable.count(c.target) ? uniform : 0.0;
        }
        return;
    }
    for (std::size_t i = 0; i < family.candidates.size(); ++i) {
        family.candidates[i].value = tilde[i] / denom;
    }
}

CandidateFamily build_family(const RepairContext& ctx,
                             const std::map<ArtifactId, CandidateInputs>& inputs,
                             const ExampleProvenance& provenance, const ScoringParams& params) {
    static const CandidateInputs kNoInputs;
    CandidateFamily family;

    std::map<ArtifactId, RepairMode> modes;
    for (const auto& id : ctx.descendants) {
        auto it = inputs.find(id);
        const CandidateInputs& in = it == inputs.end() ? kNoInputs : it->second;
        modes[id] = assign_mode(ctx, id, in, provenance);
    }
    for (const auto& [id, mode] : modes) {
        if (mode == RepairMode::Remove) {
            family.removed.insert(id);
        } else {
            family.dplus.insert(id);
        }
    }
    for (const auto& id : family.dplus) {
        auto it = inputs.find(id);
        const CandidateInputs& in = it == inputs.end() ? kNoInputs : it->second;
        family.candidates.push_back(build_candidate(ctx, id, in, provenance, modes));
    }
    std::sort(family.candidates.begin(), family.candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.target < b.target; });
    for (std::size_t i = 0; i < family.candidates.size(); ++i) {
        family.index[family.candidates[i].target] = i;
    }

    build_req_graph(family);
    score_cost(family, params);
    score_value(family, *ctx.graph, ctx.descendants, params);
    return family;
}

std::string candidates_to_json(const CandidateFamily& family) {
    json arr = json::array();
    for (const auto& c : family.candidates) {
        json j;
        j["target"] = c.target;
        j["mode"] = to_string(c.mode);
        j["operator"] = c.operator_ref;
        j["required"] = json::array();
        for (const auto& p : c.required) j["required"].push_back(p);
        j["repairable_required"] = json::array();
        for (const auto& p : c.repairable_required) j["repairable_required"].push_back(p);
        j["v0"] = c.executable_initial ? 1 : 0;
        j["v"] = c.executable ? 1 : 0;
        j["w"] = c.value;
        j["c"] = c.cost;
        j["c_exact"] = {{"num", c.cost_exact.num()}, {"den", c.cost_exact.den()}};
        j["resources"] = {{"tool", c.resources.tool},
                          {"tok", c.resources.tok},
                          {"gpu", c.resources.gpu},
                          {"sand", c.resources.sand}};
        j["trace"] = {{"uses", c.trace.uses},
                      {"fanout", c.trace.downstream_fanout},
                      {"probes", c.trace.probes}};
        if (c.support) {
            j["support"] = {{"forget", std::vector<std::string>(c.support->forget.begin(),
                                                                c.support->forget.end())},
                            {"new", std::vector<std::string>(c.support->fresh.begin(),
                                                             c.support->fresh.end())},
                            {"reference", std::vector<std::string>(c.support->reference.begin(),
                                                                   c.support->reference.end())}};
        }
        if (!c.demotion_reason.empty()) j["demotion_reason"] = c.demotion_reason;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

}  // namespace memorepair
