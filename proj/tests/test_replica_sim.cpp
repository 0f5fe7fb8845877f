// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "memorepair/replica.hpp"

using namespace memorepair;

namespace {

struct Rng {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t n) { return next() % n; }
};

ReplicaState random_state(Rng& rng) {
    ReplicaState r;
    for (int i = 0; i < 6; ++i) {
        std::string x = "x" + std::to_string(rng.below(8));
        switch (rng.below(3)) {
            case 0: r.added.insert(x); break;
            case 1: r.hidden.insert(x); break;
            default: r.deleted.insert(x); break;
        }
    }
    return r;
}

bool same_sets(const ReplicaState& a, const ReplicaState& b) {
    return a.added == b.added && a.hidden == b.hidden && a.deleted == b.deleted;
}

}  // namespace

TEST_CASE("visibility formula") {
    ReplicaState r;
    CHECK(!visible(r, "x"));
    r.added.insert("x");
    CHECK(visible(r, "x"));
    r.hidden.insert("x");
    CHECK(!visible(r, "x"));

    ReplicaState t;
    t.added.insert("y");
    t.deleted.insert("y");
    CHECK(!visible(t, "y"));
}

TEST_CASE("merge laws on random states") {
    Rng rng{4242};
    for (int iter = 0; iter < 2000; ++iter) {
        ReplicaState a = random_state(rng), b = random_state(rng), c = random_state(rng);
        CHECK(same_sets(merge(a, b), merge(b, a)));
        CHECK(same_sets(merge(merge(a, b), c), merge(a, merge(b, c))));
        CHECK(same_sets(merge(a, a), a));
    }
}

TEST_CASE("merge never re-exposes a hidden artifact") {
    ReplicaState r1;
    r1.added.insert("x");
    ReplicaState r2;
    r2.added.insert("x");
    r2.hidden.insert("x");
    CHECK(visible(r1, "x"));
    ReplicaState merged = merge(r1, r2);
    CHECK(!visible(merged, "x"));
}

TEST_CASE("hide monotonicity under random operation interleavings") {
    Rng rng{99};
    for (int iter = 0; iter < 300; ++iter) {
        int n = 2 + (int)rng.below(4);  // up to 5 replicas
        std::vector<ReplicaState> replicas(n);
        std::map<std::pair<int, std::string>, bool> went_dark;
        for (int step = 0; step < 40; ++step) {
            int r = (int)rng.below(n);
            std::string x = "x" + std::to_string(rng.below(6));
            switch (rng.below(4)) {
                case 0: replicas[r].added.insert(x); break;
                case 1: replicas[r].hidden.insert(x); break;
                case 2: replicas[r].deleted.insert(x); break;
                default: {
                    int other = (int)rng.below(n);
                    ReplicaState m = merge(replicas[r], replicas[other]);
                    replicas[r] = m;
                    replicas[other] = m;
                    break;
                }
            }
            for (int i = 0; i < n; ++i) {
                for (int xi = 0; xi < 6; ++xi) {
                    std::string id = "x" + std::to_string(xi);
                    bool dark = replicas[i].hidden.count(id) || replicas[i].deleted.count(id);
                    auto key = std::make_pair(i, id);
                    if (went_dark[key]) {
                        CHECK(!visible(replicas[i], id));  // never resurfaces
                    }
                    if (dark) went_dark[key] = true;
                }
            }
        }
    }
}

TEST_CASE("barrier broadcast: acks, fencing, empty set") {
    Cluster cluster;
    cluster.add_replica("r0", 0);
    cluster.add_replica("r1", 1);
    cluster.add_replica("r2", 5);  // over t_ack
    cluster.t_ack = 2;
    cluster.seed({"a", "b"});

    BarrierOutcome out = cluster.broadcast_barrier({"a"});
    CHECK(out.acked == std::set<std::string>{"r0", "r1"});
    CHECK(out.fenced == std::set<std::string>{"r2"});
    CHECK(!cluster.serving("r2"));
    CHECK(!cluster.any_serving_visible("a"));
    CHECK(cluster.any_serving_visible("b"));

    // Fenced replica still holds the stale view but serves nothing.
    CHECK(visible(cluster.state("r2"), "a"));

    Cluster empty_barrier;
    empty_barrier.add_replica("r0", 0);
    BarrierOutcome vac = empty_barrier.broadcast_barrier({});
    CHECK(vac.acked == std::set<std::string>{"r0"});
    CHECK(vac.fenced.empty());
}

TEST_CASE("rejoin merges barrier state and restores service") {
    Cluster cluster;
    cluster.add_replica("r0", 0);
    cluster.add_replica("slow", 9);
    cluster.t_ack = 2;
    cluster.seed({"a", "b"});
    cluster.broadcast_barrier({"a"});
    REQUIRE(!cluster.serving("slow"));

    cluster.rejoin("slow");
    CHECK(cluster.serving("slow"));
    CHECK(!visible(cluster.state("slow"), "a"));
    CHECK(!cluster.any_serving_visible("a"));

    // Rejoin of a serving replica violates the precondition.
    CHECK_THROWS(cluster.rejoin("r0"));
    CHECK_THROWS(cluster.rejoin("ghost"));

    // Sequential partition + rejoin is idempotent on the state.
    cluster.partition("slow");
    cluster.rejoin("slow");
    ReplicaState snapshot = cluster.state("slow");
    cluster.partition("slow");
    cluster.rejoin("slow");
    CHECK(same_sets(snapshot, cluster.state("slow")));
}

TEST_CASE("partitioned replica misses the barrier, rejoin closes the leak") {
    Cluster cluster;
    cluster.add_replica("r0", 0);
    cluster.add_replica("r1", 0);
    cluster.seed({"a"});
    cluster.partition("r1");
    cluster.broadcast_barrier({"a"});
    // The partitioned replica still believes a is visible, but cannot serve.
    CHECK(visible(cluster.state("r1"), "a"));
    CHECK(!cluster.any_serving_visible("a"));
    cluster.rejoin("r1");
    CHECK(cluster.serving("r1"));
    CHECK(!visible(cluster.state("r1"), "a"));
    CHECK(!cluster.any_serving_visible("a"));
}

TEST_CASE("publication adds fresh ids and never revives originals") {
    Cluster cluster;
    cluster.add_replica("r0", 0);
    cluster.seed({"a"});
    cluster.broadcast_barrier({"a"});
    cluster.publish_batch({"a-repaired-v2"});
    CHECK(!cluster.any_serving_visible("a"));
    CHECK(cluster.any_serving_visible("a-repaired-v2"));
    const ReplicaState& r = cluster.state("r0");
    CHECK(r.hidden.count("a"));  // republication does not shrink B
}
