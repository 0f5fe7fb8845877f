// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "memorepair/metrics.hpp"

using namespace memorepair;

namespace {

Cluster one_replica(const std::set<ArtifactId>& ids) {
    Cluster c;
    c.add_replica("r0", 0);
    c.seed(ids);
    return c;
}

}  // namespace

TEST_CASE("leak: full barrier vs no action vs partial withdrawal") {
    std::set<ArtifactId> affected{"a", "b", "c", "d"};
    Cluster open = one_replica(affected);
    CHECK(leak_pct(affected, open) == Rational(100, 1));

    Cluster closed = one_replica(affected);
    closed.broadcast_barrier(affected);
    CHECK(leak_pct(affected, closed) == Rational(0, 1));

    // Localization missed half the true cascade.
    Cluster partial = one_replica(affected);
    partial.broadcast_barrier({"a", "b"});
    CHECK(leak_pct(affected, partial) == Rational(50, 1));

    CHECK(leak_pct({}, open) == Rational(0, 1));
}

TEST_CASE("stale-use counts traces touching a visible affected artifact") {
    std::set<ArtifactId> affected{"a", "b"};
    Cluster cluster = one_replica({"a", "b", "x"});
    cluster.broadcast_barrier({"a"});  // b stays visible (leaked)

    std::vector<TaskTrace> traces{{"t0", {"a"}},       // hidden -> clean
                                  {"t1", {"b", "x"}},  // leaked -> stale
                                  {"t2", {"x"}},       // unaffected -> clean
                                  {"t3", {"a", "b"}},  // leaked member -> stale
                                  {"t4", {"x", "a"}}};
    CHECK(stale_use_pct(traces, affected, cluster) == Rational(40, 1));  // 2 of 5

    std::vector<std::string> flags;
    CHECK(stale_use_pct({}, affected, cluster, &flags) == Rational(0, 1));
    CHECK(flags == std::vector<std::string>{"no_traces"});

    Cluster all_hidden = one_replica({"a", "b", "x"});
    all_hidden.broadcast_barrier({"a", "b"});
    CHECK(stale_use_pct(traces, affected, all_hidden) == Rational(0, 1));
}

TEST_CASE("rep: micro-average over events") {
    CHECK(format_fixed(rep_pct({{7, 11}}), 1) == "63.6");
    CHECK(rep_pct({{7, 11}, {0, 79}}) == Rational(700, 90));  // ~7.8
    CHECK(format_fixed(rep_pct({{7, 11}, {0, 79}}), 1) == "7.8");

    std::vector<std::string> flags;
    CHECK(rep_pct({{0, 0}, {0, 0}}, &flags) == Rational(0, 1));
    CHECK(flags == std::vector<std::string>{"no_publication_opportunity"});
}

TEST_CASE("delta task formula") {
    // All tasks untouched: s_t = 1, delta 0.
    CHECK(delta_task({{0, 0, 0}, {0, 0, 0}}) == Rational(0, 1));

    // A=4, U=2, L=0 -> s = 0.5 -> -50.
    CHECK(delta_task({{4, 2, 0}}) == Rational(-50, 1));

    // Remove-all on a fully affected task: hidden but unrepaired -> s = 0.
    CHECK(delta_task({{2, 2, 0}}) == Rational(-100, 1));

    // No-action double penalty: U = L = A -> s = -0.5.
    CHECK(delta_task({{2, 2, 2}}) == Rational(-150, 1));

    // Monotone in U and L.
    CHECK(delta_task({{4, 3, 0}}) < delta_task({{4, 2, 0}}));
    CHECK(delta_task({{4, 2, 2}}) < delta_task({{4, 2, 1}}));

    CHECK(delta_task({}) == Rational(0, 1));
}

TEST_CASE("csv rendering uses fixed decimals") {
    MetricsReport m;
    m.policy = "memorepair";
    m.event_type = "delete";
    m.lambda = "0.30";
    m.leak_pct = Rational(0, 1);
    m.stale_use_pct = Rational(0, 1);
    m.rep_pct = Rational(700, 11);
    m.cost = Rational(1, 1);
    m.delta_task = Rational(-50, 1);
    CHECK(metrics_csv_header(false) ==
          "policy,event_type,seed,lambda,leak,stale,rep,cost,delta_task");
    CHECK(metrics_csv_row(m, false) == "memorepair,delete,0,0.30,0.0,0.0,63.6,1.00,-50.0");

    m.fsp_pct = Rational(90, 1);
    m.ru_pct = Rational(90, 1);
    m.valpass_pct = Rational(100, 1);
    CHECK(metrics_csv_row(m, true) ==
          "memorepair,delete,0,0.30,0.0,0.0,63.6,1.00,-50.0,90.0,90.0,100.0");
}

TEST_CASE("json report carries exact rationals") {
    MetricsReport m;
    m.rep_pct = Rational(700, 11);
    std::string doc = metrics_to_json(m);
    CHECK(doc.find("\"num\": 700") != std::string::npos);
    CHECK(doc.find("\"den\": 11") != std::string::npos);
}
