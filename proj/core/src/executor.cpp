// SPDX-License-Identifier: Apache-2.0
#include "memorepair/executor.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace memorepair {

using nlohmann::json;

namespace {

std::string fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

std::string successor_id(const RepairContext& ctx, const ArtifactId& target) {
    const Artifact& a = ctx.graph->get(target);
    std::string base = target + "-repaired-v" + std::to_string(a.version + 1);
    std::string id = base;
    int bump = 0;
    while (ctx.graph->has(id)) id = base + "." + std::to_string(++bump);
    return id;
}

// Remap a consumed input into the post-event universe: replaced roots map to
// their replacement, staged targets map to their successor, everything else
// stays as-is (a hidden original then fails the precheck).
ArtifactId remap_input(const OperatorRequest& req, const ArtifactId& p) {
    auto rit = req.ctx->replacement_id_by_root.find(p);
    if (rit != req.ctx->replacement_id_by_root.end()) return rit->second;
    auto sit = req.staged_ids->find(p);
    if (sit != req.staged_ids->end()) return sit->second;
    return p;
}

std::string input_digest(const OperatorRequest& req, const ArtifactId& mapped,
                         const ArtifactId& original) {
    auto sit = req.staged_digests->find(original);
    if (sit != req.staged_digests->end()) return sit->second;
    if (req.ctx->graph->has(mapped)) return req.ctx->graph->get(mapped).payload_digest;
    return "?";
}

SuccessorDraft base_draft(const OperatorRequest& req) {
    const Artifact& target = req.ctx->graph->get(req.candidate->target);
    SuccessorDraft draft;
    draft.id = successor_id(*req.ctx, req.candidate->target);
    draft.target = req.candidate->target;
    draft.kind = target.kind;
    draft.arch = target.arch;
    draft.mode = req.candidate->mode;
    draft.payload_text = req.inputs->checks.payload_text;
    if (req.inputs->checks.rendered_keys) {
        draft.rendered_keys = *req.inputs->checks.rendered_keys;
    } else {
        draft.rendered_keys = req.inputs->checks.schema_keys;
    }
    return draft;
}

SuccessorDraft op_recompute(const OperatorRequest& req) {
    SuccessorDraft draft = base_draft(req);
    std::ostringstream material;
    material << "recompute:" << draft.target << ":k" << req.ctx->post_contract.version;
    if (req.inputs->replay) {
        for (const auto& p : req.inputs->replay->parents) {
            ArtifactId mapped = remap_input(req, p);
            draft.declared_parents.insert(mapped);
            material << ":" << mapped << "=" << input_digest(req, mapped, p);
        }
        for (const auto& [k, v] : req.inputs->replay->args) material << ":" << k << "=" << v;
    }
    draft.payload_digest = fnv1a(material.str());
    return draft;
}

SuccessorDraft op_regen(const OperatorRequest& req) {
    SuccessorDraft draft = base_draft(req);
    std::ostringstream material;
    material << "regen:" << draft.target << ":k" << req.ctx->post_contract.version;
    std::set<ArtifactId> consumed(req.inputs->regen_context.begin(),
                                  req.inputs->regen_context.end());
    if (draft.arch && *draft.arch == SkillArch::Chain) {
        consumed.insert(req.inputs->sandbox_requires.begin(), req.inputs->sandbox_requires.end());
    }
    for (const auto& p : consumed) {
        ArtifactId mapped = remap_input(req, p);
        draft.declared_parents.insert(mapped);
        material << ":" << mapped << "=" << input_digest(req, mapped, p);
    }
    draft.payload_digest = fnv1a(material.str());
    return draft;
}

SuccessorDraft op_param(const OperatorRequest& req) {
    SuccessorDraft draft = base_draft(req);
    draft.support = req.candidate->support;
    draft.param_accuracies = req.inputs->checks.param_scores;
    std::ostringstream material;
    material << "param:" << draft.target;
    if (draft.support) {
        for (const auto& z : draft.support->reference) material << ":" << z;
    }
    draft.payload_digest = fnv1a(material.str());
    return draft;
}

std::set<ArtifactId> select_round(const CandidateFamily& family, const ExecOptions& options) {
    switch (options.selector) {
        case SelectorKind::Nothing:
            return {};
        case SelectorKind::Everything: {
            std::set<ArtifactId> all;
            for (const auto& c : family.candidates) {
                if (c.executable) all.insert(c.target);
            }
            return all;
        }
        case SelectorKind::Greedy: {
            Selection sel = greedy_select(assemble_selection(family, options.lambda));
            return {sel.chosen.begin(), sel.chosen.end()};
        }
        case SelectorKind::MinCut:
        default: {
            Selection sel = min_cut_select(assemble_selection(family, options.lambda));
            return {sel.chosen.begin(), sel.chosen.end()};
        }
    }
}

}  // namespace

SelectionProblem assemble_selection(const CandidateFamily& family, const Rational& lambda) {
    SelectionProblem prob;
    prob.lambda = lambda;
    for (const auto& cand : family.candidates) {
        SelectionItem item;
        item.id = cand.target;
        item.executable = cand.executable;
        if (cand.executable) {
            // Quantized to the 1e-6 grid so capacities stay small after
            // common-denominator scaling. Non-executable items carry zero
            // profit: the M-arc forces them out regardless, and fixture stats
            // of demoted candidates must not inflate the capacity scale.
            item.value = Rational::from_double_scaled(cand.value, 1000000);
            item.cost = Rational::from_double_scaled(cand.cost, 1000000);
        }
        prob.items.push_back(std::move(item));
    }
    for (const auto& [j, i] : family.req_edges) prob.closure_edges.emplace_back(j, i);
    return prob;
}

std::map<std::string, RepairOperator> default_operator_registry() {
    return {{"recompute", op_recompute}, {"regen", op_regen}, {"param", op_param}};
}

BarrierOutcome withdraw(const std::set<ArtifactId>& hidden, Cluster& cluster) {
    return cluster.broadcast_barrier(hidden);
}

std::vector<ArtifactId> topological_order(
    const std::set<ArtifactId>& selected,
    const std::vector<std::pair<ArtifactId, ArtifactId>>& req_edges) {
    std::map<ArtifactId, int> indegree;
    std::map<ArtifactId, std::vector<ArtifactId>> children;
    for (const auto& id : selected) indegree[id] = 0;
    for (const auto& [j, i] : req_edges) {
        if (!selected.count(j) || !selected.count(i)) continue;
        children[j].push_back(i);
        indegree[i]++;
    }
    std::priority_queue<ArtifactId, std::vector<ArtifactId>, std::greater<>> ready;
    for (const auto& [id, deg] : indegree) {
        if (deg == 0) ready.push(id);
    }
    std::vector<ArtifactId> out;
    while (!ready.empty()) {
        ArtifactId id = ready.top();
        ready.pop();
        out.push_back(id);
        for (const auto& child : children[id]) {
            if (--indegree[child] == 0) ready.push(child);
        }
    }
    if (out.size() != selected.size()) {
        throw std::logic_error("cycle in selected repair dependencies");
    }
    return out;
}

RepairPlan execute_plan(ProvenanceGraph& g, const RepairContext& ctx, CandidateFamily& family,
                        Cluster& cluster, const std::map<ArtifactId, CandidateInputs>& inputs,
                        const ExampleProvenance& provenance, const ExecOptions& options) {
    static const CandidateInputs kNoInputs;
    auto inputs_for = [&](const ArtifactId& id) -> const CandidateInputs& {
        auto it = inputs.find(id);
        return it == inputs.end() ? kNoInputs : it->second;
    };

    RepairPlan plan;
    plan.hidden = ctx.affected;
    plan.barrier = withdraw(plan.hidden, cluster);
    for (const auto& id : plan.hidden) g.get_mutable(id).state = ArtifactState::Withdrawn;

    // Root semantics: deletion removes roots permanently; corrected and
    // migrated roots stay withdrawn behind their replacements or the updated
    // contract.
    if (ctx.event.type == EventType::Delete) {
        cluster.broadcast_delete(ctx.event.roots);
        for (const auto& r : ctx.event.roots) g.get_mutable(r).state = ArtifactState::Removed;
    }
    if (!ctx.replacement_ids.empty()) cluster.publish_batch(ctx.replacement_ids);

    // Remove-mode descendants never enter the optimization.
    if (!family.removed.empty()) {
        cluster.broadcast_delete(family.removed);
        for (const auto& id : family.removed) {
            g.get_mutable(id).state = ArtifactState::Removed;
            plan.dispositions[id] = "removed";
        }
    }

    auto registry = default_operator_registry();
    const int round_budget = (int)family.dplus.size() + 1;

    std::vector<std::pair<ArtifactId, SuccessorDraft>> round_published;
    while (true) {
        plan.rounds++;
        if (plan.rounds > round_budget) {
            throw std::logic_error("retry loop exceeded |D+|+1 selection rounds");
        }
        std::set<ArtifactId> selected = select_round(family, options);
        round_published.clear();

        std::map<ArtifactId, ArtifactId> staged_ids;
        std::map<ArtifactId, std::string> staged_digests;
        std::set<ArtifactId> failures;

        for (const ArtifactId& target : topological_order(selected, family.req_edges)) {
            Candidate& cand = family.at(target);
            bool predecessors_staged = true;
            for (const auto& j : cand.repairable_required) {
                if (!staged_ids.count(j)) {
                    predecessors_staged = false;
                    break;
                }
            }
            if (!predecessors_staged && !options.attempt_without_staged) {
                failures.insert(target);  // kept withdrawn, operator not invoked
                continue;
            }

            OperatorRequest req{&ctx, &cand, &inputs_for(target), &staged_ids, &staged_digests};
            SuccessorDraft draft = registry.at(cand.operator_ref)(req);
            plan.charged.insert(target);

            ValidationVerdict verdict =
                cascade_precheck(draft, plan.hidden, ctx.replacement_ids, provenance);
            if (verdict.pass) {
                verdict = validate(draft, options.oracle, inputs_for(target).checks);
            }
            if (verdict.scores) plan.param_scores[target] = *verdict.scores;
            if (verdict.pass) {
                staged_ids[target] = draft.id;
                staged_digests[target] = draft.payload_digest;
                round_published.emplace_back(target, std::move(draft));
            } else {
                failures.insert(target);
            }
        }

        if (failures.empty()) {
            plan.selected_final = selected;
            break;
        }
        for (const auto& id : failures) {
            family.at(id).executable = false;
            plan.quarantined.insert(id);
            g.get_mutable(id).state = ArtifactState::Quarantined;
        }
    }

    for (auto& [target, draft] : round_published) {
        plan.staged.emplace(target, std::move(draft));
        plan.republished.emplace_back(target, plan.staged.at(target).id);
    }
    std::sort(plan.republished.begin(), plan.republished.end());

    for (const auto& id : plan.charged) plan.realized_cost += family.at(id).cost_exact;

    batch_republish(plan, g, cluster);

    for (const auto& cand : family.candidates) {
        if (plan.dispositions.count(cand.target)) continue;
        if (plan.staged.count(cand.target)) {
            plan.dispositions[cand.target] = "published";
        } else if (plan.quarantined.count(cand.target) || !cand.executable_initial) {
            plan.dispositions[cand.target] = "quarantined";
        } else {
            plan.dispositions[cand.target] = "not_selected";
        }
    }
    return plan;
}

void batch_republish(RepairPlan& plan, ProvenanceGraph& g, Cluster& cluster) {
    std::set<ArtifactId> fresh;
    for (const auto& [target, successor] : plan.republished) {
        const SuccessorDraft& draft = plan.staged.at(target);
        const Artifact& old = g.get(target);
        Artifact a;
        a.id = successor;
        a.kind = draft.kind;
        a.arch = draft.arch;
        a.version = old.version + 1;
        a.payload_digest = draft.payload_digest;
        a.replaces = target;
        g.add_artifact(a);
        for (const auto& p : draft.declared_parents) {
            if (g.has(p)) g.add_influence_edge(p, successor);
        }
        fresh.insert(successor);
    }
    if (!fresh.empty()) cluster.publish_batch(fresh);
}

std::string plan_to_json(const RepairPlan& plan) {
    json j;
    j["hidden"] = json::array();
    for (const auto& id : plan.hidden) j["hidden"].push_back(id);
    j["republished"] = json::array();
    for (const auto& [t, s] : plan.republished) j["republished"].push_back({t, s});
    j["quarantined"] = json::array();
    for (const auto& id : plan.quarantined) j["quarantined"].push_back(id);
    j["dispositions"] = plan.dispositions;
    j["realized_cost"] = {{"num", plan.realized_cost.num()}, {"den", plan.realized_cost.den()}};
    j["rounds"] = plan.rounds;
    j["fenced"] = json::array();
    for (const auto& id : plan.barrier.fenced) j["fenced"].push_back(id);
    return j.dump(2) + "\n";
}

bool event_precedes(const EventTicket& a, const EventTicket& b) {
    if (a.counter != b.counter) return a.counter < b.counter;
    auto priority = [](EventType t) {
        switch (t) {
            case EventType::Delete: return 0;
            case EventType::Correct: return 1;
            case EventType::Migrate: return 2;
        }
        return 2;
    };
    if (priority(a.event.type) != priority(b.event.type)) {
        return priority(a.event.type) < priority(b.event.type);
    }
    return *a.event.roots.begin() < *b.event.roots.begin();
}

std::vector<std::size_t> serialize_events(const std::vector<EventTicket>& tickets) {
    std::vector<std::size_t> order(tickets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return event_precedes(tickets[a], tickets[b]);
    });
    return order;
}

}  // namespace memorepair
