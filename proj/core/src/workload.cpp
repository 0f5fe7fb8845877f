// SPDX-License-Identifier: Apache-2.0
#include "memorepair/workload.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace memorepair {

using nlohmann::json;

Policy policy_from_string(const std::string& s) {
    if (s == "no_action") return Policy::NoAction;
    if (s == "remove_all") return Policy::RemoveAll;
    if (s == "repair_all") return Policy::RepairAll;
    if (s == "barrier_greedy") return Policy::BarrierGreedy;
    if (s == "memorepair") return Policy::MemoRepair;
    throw std::invalid_argument("unknown policy: " + s);
}

std::string to_string(Policy p) {
    switch (p) {
        case Policy::NoAction: return "no_action";
        case Policy::RemoveAll: return "remove_all";
        case Policy::RepairAll: return "repair_all";
        case Policy::BarrierGreedy: return "barrier_greedy";
        case Policy::MemoRepair: return "memorepair";
    }
    return "memorepair";
}

namespace {

json inputs_to_json(const CandidateInputs& in) {
    json j;
    if (in.replay) {
        j["replay"] = {{"parents", in.replay->parents}, {"args", in.replay->args}};
    }
    if (!in.regen_context.empty()) j["regen_context"] = in.regen_context;
    if (!in.sandbox_requires.empty()) j["sandbox_requires"] = in.sandbox_requires;
    if (!in.support.empty()) j["support"] = in.support;
    j["resources"] = {{"tool", in.resources.tool},
                      {"tok", in.resources.tok},
                      {"gpu", in.resources.gpu},
                      {"sand", in.resources.sand}};
    j["trace"] = {{"uses", in.trace.uses}, {"probes", in.trace.probes}};
    json checks;
    if (!in.checks.schema_keys.empty()) checks["schema_keys"] = in.checks.schema_keys;
    if (in.checks.rendered_keys) checks["rendered_keys"] = *in.checks.rendered_keys;
    if (!in.checks.probes.empty()) checks["probes"] = in.checks.probes;
    checks["safety_ok"] = in.checks.safety_ok;
    checks["sandbox_ok"] = in.checks.sandbox_ok;
    if (in.checks.sandbox_seconds) checks["sandbox_seconds"] = *in.checks.sandbox_seconds;
    if (in.checks.param_scores) {
        checks["param_scores"] = {in.checks.param_scores->first, in.checks.param_scores->second};
    }
    if (!in.checks.payload_text.empty()) checks["payload_text"] = in.checks.payload_text;
    j["checks"] = checks;
    return j;
}

CandidateInputs inputs_from_json(const json& j) {
    CandidateInputs in;
    if (j.contains("replay")) {
        ReplayTrace r;
        r.parents = j.at("replay").value("parents", std::vector<std::string>{});
        if (j.at("replay").contains("args")) {
            r.args = j.at("replay").at("args").get<std::map<std::string, std::string>>();
        }
        in.replay = std::move(r);
    }
    in.regen_context = j.value("regen_context", std::vector<std::string>{});
    in.sandbox_requires = j.value("sandbox_requires", std::vector<std::string>{});
    in.support = j.value("support", std::vector<std::string>{});
    if (j.contains("resources")) {
        const json& r = j.at("resources");
        in.resources = {r.value("tool", 0.0), r.value("tok", 0.0), r.value("gpu", 0.0),
                        r.value("sand", 0.0)};
    }
    if (j.contains("trace")) {
        in.trace.uses = j.at("trace").value("uses", 0.0);
        in.trace.probes = j.at("trace").value("probes", 0.0);
    }
    if (j.contains("checks")) {
        const json& c = j.at("checks");
        in.checks.schema_keys = c.value("schema_keys", std::vector<std::string>{});
        if (c.contains("rendered_keys")) {
            in.checks.rendered_keys = c.at("rendered_keys").get<std::vector<std::string>>();
        }
        in.checks.probes = c.value("probes", std::vector<bool>{});
        in.checks.safety_ok = c.value("safety_ok", true);
        in.checks.sandbox_ok = c.value("sandbox_ok", true);
        if (c.contains("sandbox_seconds")) {
            in.checks.sandbox_seconds = c.at("sandbox_seconds").get<double>();
        }
        if (c.contains("param_scores")) {
            in.checks.param_scores = {c.at("param_scores").at(0).get<double>(),
                                      c.at("param_scores").at(1).get<double>()};
        }
        in.checks.payload_text = c.value("payload_text", std::string());
    }
    return in;
}

json section_meta(const Scenario& s) {
    return json{{"name", s.meta.name},
                {"seed", s.meta.seed},
                {"preset", s.meta.preset},
                {"p_drop", s.meta.p_drop}};
}

json section_graph(const Scenario& s) { return json::parse(graph_to_json(s.graph)); }

json section_ground_truth(const Scenario& s) {
    json arr = json::array();
    for (const auto& [u, v] : s.ground_truth_influence) arr.push_back({u, v});
    return arr;
}

json section_event(const Scenario& s) { return json::parse(event_to_json(s.event)); }

json section_contract(const Scenario& s) {
    return json{{"entries", s.contract.entries}, {"version", s.contract.version}};
}

json section_inputs(const Scenario& s) {
    json obj = json::object();
    for (const auto& [id, in] : s.inputs) obj[id] = inputs_to_json(in);
    return obj;
}

json section_provenance(const Scenario& s) {
    json obj = json::object();
    for (const auto& [ex, ids] : s.example_provenance) {
        obj[ex] = std::vector<std::string>(ids.begin(), ids.end());
    }
    return obj;
}

json section_replicas(const Scenario& s) {
    json j;
    j["t_ack"] = s.replicas.t_ack;
    j["delays"] = s.replicas.delays;
    json script = json::array();
    for (const auto& op : s.replicas.script) {
        json o{{"t", op.t}, {"op", op.op}};
        if (!op.replica.empty()) o["replica"] = op.replica;
        if (!op.a.empty()) o["a"] = op.a;
        if (!op.b.empty()) o["b"] = op.b;
        script.push_back(o);
    }
    j["script"] = script;
    return j;
}

json section_tasks(const Scenario& s) {
    json arr = json::array();
    for (const auto& t : s.tasks) {
        arr.push_back(json{{"id", t.id},
                           {"uses", std::vector<std::string>(t.uses.begin(), t.uses.end())}});
    }
    return arr;
}

void load_sections(Scenario& s, const json& j) {
    const json& meta = j.at("meta");
    s.meta.name = meta.value("name", std::string());
    s.meta.seed = meta.value("seed", std::uint64_t{0});
    s.meta.preset = meta.value("preset", std::string());
    s.meta.p_drop = meta.value("p_drop", 0.0);

    s.graph = graph_from_json(j.at("graph").dump());
    for (const auto& e : j.at("ground_truth_influence_edges")) {
        s.ground_truth_influence.insert({e.at(0).get<std::string>(), e.at(1).get<std::string>()});
    }
    s.event = event_from_json(j.at("event").dump());
    s.contract.entries = j.at("contract").at("entries").get<std::map<std::string, std::string>>();
    s.contract.version = j.at("contract").value("version", 1);
    for (const auto& [id, in] : j.at("candidate_inputs").items()) {
        s.inputs[id] = inputs_from_json(in);
    }
    if (j.contains("example_provenance")) {
        for (const auto& [ex, ids] : j.at("example_provenance").items()) {
            std::set<ArtifactId> prov;
            for (const auto& id : ids) prov.insert(id.get<std::string>());
            s.example_provenance[ex] = std::move(prov);
        }
    }
    const json& rj = j.at("replicas");
    s.replicas.t_ack = rj.value("t_ack", std::uint64_t{2});
    if (rj.contains("delays")) {
        s.replicas.delays = rj.at("delays").get<std::map<std::string, std::uint64_t>>();
    }
    if (rj.contains("script")) {
        for (const auto& o : rj.at("script")) {
            ReplicaScriptOp op;
            op.t = o.value("t", std::int64_t{1});
            op.op = o.at("op").get<std::string>();
            op.replica = o.value("replica", std::string());
            op.a = o.value("a", std::string());
            op.b = o.value("b", std::string());
            s.replicas.script.push_back(op);
        }
    }
    if (j.contains("task_traces")) {
        for (const auto& tj : j.at("task_traces")) {
            TaskTrace t;
            t.id = tj.at("id").get<std::string>();
            for (const auto& u : tj.at("uses")) t.uses.insert(u.get<std::string>());
            s.tasks.push_back(std::move(t));
        }
    }
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["meta"] = section_meta(s);
    j["graph"] = section_graph(s);
    j["ground_truth_influence_edges"] = section_ground_truth(s);
    j["event"] = section_event(s);
    j["contract"] = section_contract(s);
    j["candidate_inputs"] = section_inputs(s);
    j["example_provenance"] = section_provenance(s);
    j["replicas"] = section_replicas(s);
    j["task_traces"] = section_tasks(s);
    return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
    Scenario s;
    load_sections(s, json::parse(text));
    return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << scenario_to_json(s);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

void split_scenario(const Scenario& s, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const json& j) {
        std::ofstream out(fs::path(dir) / name);
        if (!out) throw std::runtime_error("cannot open for write: " + name);
        out << j.dump(2) << "\n";
    };
    write("meta.json", section_meta(s));
    write("graph.json", section_graph(s));
    write("ground_truth.json", section_ground_truth(s));
    write("event.json", section_event(s));
    write("contract.json", section_contract(s));
    write("candidate_inputs.json", section_inputs(s));
    write("example_provenance.json", section_provenance(s));
    write("replicas.json", section_replicas(s));
    write("task_traces.json", section_tasks(s));
}

Scenario merge_scenario(const std::string& dir) {
    namespace fs = std::filesystem;
    auto read = [&](const std::string& name) {
        std::ifstream in(fs::path(dir) / name);
        if (!in) throw std::runtime_error("missing bundle part: " + name);
        std::stringstream buf;
        buf << in.rdbuf();
        return json::parse(buf.str());
    };
    json j;
    j["meta"] = read("meta.json");
    j["graph"] = read("graph.json");
    j["ground_truth_influence_edges"] = read("ground_truth.json");
    j["event"] = read("event.json");
    j["contract"] = read("contract.json");
    j["candidate_inputs"] = read("candidate_inputs.json");
    j["example_provenance"] = read("example_provenance.json");
    j["replicas"] = read("replicas.json");
    j["task_traces"] = read("task_traces.json");
    Scenario s;
    load_sections(s, j);
    return s;
}

namespace {

Cluster make_cluster(const Scenario& s) {
    Cluster cluster;
    cluster.t_ack = s.replicas.t_ack;
    for (const auto& [id, delay] : s.replicas.delays) cluster.add_replica(id, delay);
    cluster.seed(s.graph.all_ids());
    return cluster;
}

void apply_script(Cluster& cluster, const std::vector<ReplicaScriptOp>& script, bool pre_barrier) {
    std::vector<const ReplicaScriptOp*> ops;
    for (const auto& op : script) {
        if ((op.t < 0) == pre_barrier) ops.push_back(&op);
    }
    std::stable_sort(ops.begin(), ops.end(),
                     [](const ReplicaScriptOp* a, const ReplicaScriptOp* b) { return a->t < b->t; });
    for (const ReplicaScriptOp* op : ops) {
        if (op->op == "merge") {
            cluster.merge_replicas(op->a, op->b);
        } else if (op->op == "partition") {
            cluster.partition(op->replica);
        } else if (op->op == "rejoin") {
            cluster.rejoin(op->replica);
        } else {
            throw std::invalid_argument("unknown replica script op: " + op->op);
        }
    }
}

struct ParamAggregate {
    std::optional<Rational> fsp, ru, valpass;
};

ParamAggregate aggregate_param(const RepairPlan& plan, const OracleConfig& oracle) {
    ParamAggregate out;
    if (plan.param_scores.empty()) return out;
    double fsp_sum = 0, ru_sum = 0;
    std::int64_t passing = 0;
    for (const auto& [id, scores] : plan.param_scores) {
        fsp_sum += scores.first;
        ru_sum += scores.second;
        if (scores.first >= oracle.tau_fsp && scores.second >= oracle.tau_ru) passing++;
    }
    auto n = (double)plan.param_scores.size();
    out.fsp = Rational::from_double_scaled(fsp_sum / n, 1000000);
    out.ru = Rational::from_double_scaled(ru_sum / n, 1000000);
    out.valpass = Rational(100 * passing, (std::int64_t)plan.param_scores.size());
    return out;
}

}  // namespace

PolicyRun run_policy(const Scenario& scenario, Policy policy, const Rational& lambda,
                     const OracleConfig& oracle) {
    Scenario work = scenario;  // the run mutates its own graph copy
    ProvenanceGraph& g = work.graph;
    validate_event(work.event);

    std::set<ArtifactId> affected_true =
        reach_over_edges(work.event.roots, work.ground_truth_influence);

    Cluster cluster = make_cluster(work);
    apply_script(cluster, work.replicas.script, /*pre_barrier=*/true);

    PolicyRun run;
    MetricsReport& m = run.metrics;
    m.scenario = work.meta.name;
    m.policy = to_string(policy);
    m.event_type = to_string(work.event.type);
    m.lambda = format_fixed(lambda, 2);
    m.oracle_level = to_string(oracle.level);
    m.seed = work.meta.seed;

    std::set<ArtifactId> published_targets;

    if (policy == Policy::NoAction) {
        m.rep_pct = rep_pct({}, &m.flags);
    } else {
        RepairContext ctx = prepare_repair(g, work.event, work.contract);
        CandidateFamily family =
            build_family(ctx, work.inputs, work.example_provenance, ScoringParams{});
        run.dplus_size = family.dplus.size();
        run.candidates_json = candidates_to_json(family);

        ExecOptions options;
        options.lambda = lambda;
        options.oracle = oracle;
        switch (policy) {
            case Policy::RemoveAll:
                options.selector = SelectorKind::Nothing;
                break;
            case Policy::RepairAll:
                options.selector = SelectorKind::Everything;
                options.attempt_without_staged = true;
                break;
            case Policy::BarrierGreedy:
                options.selector = SelectorKind::Greedy;
                break;
            default:
                options.selector = SelectorKind::MinCut;
                break;
        }
        RepairPlan plan = execute_plan(g, ctx, family, cluster, work.inputs,
                                       work.example_provenance, options);
        run.republished = plan.republished.size();
        for (const auto& [target, successor] : plan.republished) {
            published_targets.insert(target);
        }
        m.rep_pct = rep_pct({{plan.republished.size(), family.dplus.size()}}, &m.flags);
        m.cost = plan.realized_cost;
        ParamAggregate agg = aggregate_param(plan, oracle);
        m.fsp_pct = agg.fsp;
        m.ru_pct = agg.ru;
        m.valpass_pct = agg.valpass;
        run.plan = std::move(plan);
    }

    apply_script(cluster, work.replicas.script, /*pre_barrier=*/false);

    m.leak_pct = leak_pct(affected_true, cluster);
    m.stale_use_pct = stale_use_pct(work.tasks, affected_true, cluster, &m.flags);

    std::vector<TaskEffect> effects;
    for (const auto& task : work.tasks) {
        TaskEffect eff;
        for (const auto& x : task.uses) {
            if (!affected_true.count(x)) continue;
            eff.affected++;
            if (!published_targets.count(x)) eff.unrepaired++;
            if (cluster.any_serving_visible(x)) eff.leaked++;
        }
        effects.push_back(eff);
    }
    m.delta_task = delta_task(effects);
    return run;
}

}  // namespace memorepair
