// SPDX-License-Identifier: Apache-2.0
#pragma once
// Exposure, publication, cost, and task-effect metrics. Aggregation is exact
// rational arithmetic; rendering rounds half-up to one decimal (two for
// cost).

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "memorepair/rational.hpp"
#include "memorepair/replica.hpp"
#include "memorepair/types.hpp"

namespace memorepair {

struct TaskTrace {
    std::string id;
    std::set<ArtifactId> uses;  // artifacts the post-event task consults
};

struct MetricsReport {
    Rational leak_pct{0, 1};
    Rational stale_use_pct{0, 1};
    Rational rep_pct{0, 1};
    Rational cost{0, 1};
    Rational delta_task{0, 1};  // <= 0
    std::optional<Rational> fsp_pct;
    std::optional<Rational> ru_pct;
    std::optional<Rational> valpass_pct;
    std::vector<std::string> flags;

    // Config echo for auditability.
    std::string scenario;
    std::string policy;
    std::string event_type;
    std::string lambda;
    std::string oracle_level;
    std::uint64_t seed = 0;
};

// Fraction of the true affected cascade still servable somewhere; measured
// against ground-truth provenance, so dropped influence edges surface as
// leakage.
Rational leak_pct(const std::set<ArtifactId>& affected_true, const Cluster& cluster);

// Fraction of post-event traces that touch at least one visible member of
// the true cascade.
Rational stale_use_pct(const std::vector<TaskTrace>& traces,
                       const std::set<ArtifactId>& affected_true, const Cluster& cluster,
                       std::vector<std::string>* flags = nullptr);

// Micro-average 100 * sum|R| / sum|D+| over events.
Rational rep_pct(const std::vector<std::pair<std::size_t, std::size_t>>& events,
                 std::vector<std::string>* flags = nullptr);

struct TaskEffect {
    std::size_t affected = 0;    // |A_t|
    std::size_t unrepaired = 0;  // |U_t|, no validated successor
    std::size_t leaked = 0;      // |L_t|, stale version still visible
};

// 100 * (mean s_t - 1) with s_t = 1 - (|U| + |L|/2) / |A| and s_t = 1 when
// A_t is empty.
Rational delta_task(const std::vector<TaskEffect>& tasks);

// CSV: one row per (policy, event type), percentages at one decimal.
std::string metrics_csv_header(bool with_param_columns);
std::string metrics_csv_row(const MetricsReport& m, bool with_param_columns);
std::string metrics_to_json(const MetricsReport& m);

}  // namespace memorepair
