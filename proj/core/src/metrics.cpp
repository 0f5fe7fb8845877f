// SPDX-License-Identifier: Apache-2.0
#include "memorepair/metrics.hpp"

#include <json.hpp>

namespace memorepair {

using nlohmann::json;

Rational leak_pct(const std::set<ArtifactId>& affected_true, const Cluster& cluster) {
    if (affected_true.empty()) return Rational(0, 1);
    std::int64_t leaked = 0;
    for (const auto& x : affected_true) {
        if (cluster.any_serving_visible(x)) leaked++;
    }
    return Rational(100 * leaked, (std::int64_t)affected_true.size());
}

Rational stale_use_pct(const std::vector<TaskTrace>& traces,
                       const std::set<ArtifactId>& affected_true, const Cluster& cluster,
                       std::vector<std::string>* flags) {
    if (traces.empty()) {
        if (flags) flags->push_back("no_traces");
        return Rational(0, 1);
    }
    std::int64_t stale = 0;
    for (const auto& t : traces) {
        for (const auto& x : t.uses) {
            if (affected_true.count(x) && cluster.any_serving_visible(x)) {
                stale++;
                break;
            }
        }
    }
    return Rational(100 * stale, (std::int64_t)traces.size());
}

Rational rep_pct(const std::vector<std::pair<std::size_t, std::size_t>>& events,
                 std::vector<std::string>* flags) {
    std::int64_t published = 0, total = 0;
    for (const auto& [r, dplus] : events) {
        published += (std::int64_t)r;
        total += (std::int64_t)dplus;
    }
    if (total == 0) {
        if (flags) flags->push_back("no_publication_opportunity");
        return Rational(0, 1);
    }
    return Rational(100 * published, total);
}

Rational delta_task(const std::vector<TaskEffect>& tasks) {
    if (tasks.empty()) return Rational(0, 1);
    Rational total(0, 1);
    for (const auto& t : tasks) {
        if (t.affected == 0) {
            total += Rational(1, 1);
            continue;
        }
        // s = 1 - (2|U| + |L|) / (2|A|)
        Rational penalty(2 * (std::int64_t)t.unrepaired + (std::int64_t)t.leaked,
                         2 * (std::int64_t)t.affected);
        total += Rational(1, 1) - penalty;
    }
    Rational mean = total / Rational::integer((std::int64_t)tasks.size());
    return (mean - Rational(1, 1)) * Rational(100, 1);
}

std::string metrics_csv_header(bool with_param_columns) {
    std::string header = "policy,event_type,seed,lambda,leak,stale,rep,cost,delta_task";
    if (with_param_columns) header += ",fsp,ru,valpass";
    return header;
}

std::string metrics_csv_row(const MetricsReport& m, bool with_param_columns) {
    std::string row = m.policy + "," + m.event_type + "," + std::to_string(m.seed) + "," +
                      m.lambda + "," + format_fixed(m.leak_pct, 1) + "," +
                      format_fixed(m.stale_use_pct, 1) + "," + format_fixed(m.rep_pct, 1) + "," +
                      format_fixed(m.cost, 2) + "," + format_fixed(m.delta_task, 1);
    if (with_param_columns) {
        row += ",";
        row += m.fsp_pct ? format_fixed(*m.fsp_pct, 1) : "";
        row += ",";
        row += m.ru_pct ? format_fixed(*m.ru_pct, 1) : "";
        row += ",";
        row += m.valpass_pct ? format_fixed(*m.valpass_pct, 1) : "";
    }
    return row;
}

namespace {

json rat(const Rational& r) {
    return json{{"num", r.num()}, {"den", r.den()}};
}

}  // namespace

std::string metrics_to_json(const MetricsReport& m) {
    json j;
    j["config"] = {{"scenario", m.scenario}, {"policy", m.policy},
                   {"event_type", m.event_type}, {"lambda", m.lambda},
                   {"oracle_level", m.oracle_level}, {"seed", m.seed}};
    j["leak_pct"] = rat(m.leak_pct);
    j["stale_use_pct"] = rat(m.stale_use_pct);
    j["rep_pct"] = rat(m.rep_pct);
    j["cost"] = rat(m.cost);
    j["delta_task"] = rat(m.delta_task);
    if (m.fsp_pct) j["fsp_pct"] = rat(*m.fsp_pct);
    if (m.ru_pct) j["ru_pct"] = rat(*m.ru_pct);
    if (m.valpass_pct) j["valpass_pct"] = rat(*m.valpass_pct);
    if (!m.flags.empty()) j["flags"] = m.flags;
    return j.dump(2) + "\n";
}

}  // namespace memorepair
