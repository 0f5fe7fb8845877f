// SPDX-License-Identifier: Apache-2.0
#include "memorepair/selector.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace memorepair {

using nlohmann::json;

namespace {

std::map<std::string, std::size_t> index_items(const SelectionProblem& prob) {
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < prob.items.size(); ++i) {
        if (!idx.emplace(prob.items[i].id, i).second) {
            throw std::invalid_argument("duplicate selection item: " + prob.items[i].id);
        }
    }
    return idx;
}

// Required predecessors per item index, deduplicated.
std::vector<std::vector<std::size_t>> predecessor_lists(
    const SelectionProblem& prob, const std::map<std::string, std::size_t>& idx) {
    std::vector<std::set<std::size_t>> pred(prob.items.size());
    for (const auto& [j, i] : prob.closure_edges) {
        auto it_i = idx.find(i);
        auto it_j = idx.find(j);
        if (it_i == idx.end() || it_j == idx.end()) {
            throw std::invalid_argument("closure edge references unknown item");
        }
        if (it_i->second == it_j->second) continue;  // self-edge carries no constraint
        pred[it_i->second].insert(it_j->second);
    }
    std::vector<std::vector<std::size_t>> out(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) out[i].assign(pred[i].begin(), pred[i].end());
    return out;
}

// Dinic max-flow on integer capacities; deterministic given arc order.
class MaxFlow {
  public:
    explicit MaxFlow(int nodes) : head_(nodes, -1), level_(nodes), iter_(nodes) {}

    void add_arc(int from, int to, std::int64_t cap) {
        edges_.push_back({to, head_[from], cap});
        head_[from] = (int)edges_.size() - 1;
        edges_.push_back({from, head_[to], 0});
        head_[to] = (int)edges_.size() - 1;
    }

    std::int64_t solve(int s, int t) {
        std::int64_t flow = 0;
        while (bfs(s, t)) {
            iter_ = head_;
            std::int64_t f;
            while ((f = dfs(s, t, std::numeric_limits<std::int64_t>::max())) > 0) flow += f;
        }
        return flow;
    }

    // Residual reachability from s: the canonical minimal source side.
    std::vector<bool> source_side(int s) const {
        std::vector<bool> seen(head_.size(), false);
        std::deque<int> queue{s};
        seen[s] = true;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int e = head_[v]; e != -1; e = edges_[e].next) {
                if (edges_[e].cap > 0 && !seen[edges_[e].to]) {
                    seen[edges_[e].to] = true;
                    queue.push_back(edges_[e].to);
                }
            }
        }
        return seen;
    }

  private:
    struct Edge {
        int to;
        int next;
        std::int64_t cap;
    };

    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::deque<int> queue{s};
        level_[s] = 0;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int e = head_[v]; e != -1; e = edges_[e].next) {
                if (edges_[e].cap > 0 && level_[edges_[e].to] < 0) {
                    level_[edges_[e].to] = level_[v] + 1;
                    queue.push_back(edges_[e].to);
                }
            }
        }
        return level_[t] >= 0;
    }

    std::int64_t dfs(int v, int t, std::int64_t limit) {
        if (v == t) return limit;
        for (int& e = iter_[v]; e != -1; e = edges_[e].next) {
            Edge& fwd = edges_[e];
            if (fwd.cap <= 0 || level_[fwd.to] != level_[v] + 1) continue;
            std::int64_t pushed = dfs(fwd.to, t, std::min(limit, fwd.cap));
            if (pushed > 0) {
                fwd.cap -= pushed;
                edges_[e ^ 1].cap += pushed;
                return pushed;
            }
        }
        return 0;
    }

    std::vector<Edge> edges_;
    std::vector<int> head_;
    std::vector<int> level_;
    std::vector<int> iter_;
};

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    __int128 p = __int128(a) * b;
    if (p > __int128(INT64_MAX) || p < __int128(INT64_MIN)) {
        throw std::overflow_error("scaled capacity overflow; reduce score resolution");
    }
    return (std::int64_t)p;
}

}  // namespace

Rational SelectionProblem::profit(std::size_t index) const {
    const SelectionItem& it = items.at(index);
    return it.value - lambda * it.cost;
}

FlowNetwork build_network(const SelectionProblem& prob) {
    auto idx = index_items(prob);
    auto preds = predecessor_lists(prob, idx);

    std::vector<Rational> profits(prob.items.size(), Rational(0, 1));
    std::int64_t lcd = 1;
    for (std::size_t i = 0; i < prob.items.size(); ++i) {
        profits[i] = prob.profit(i);
        std::int64_t d = profits[i].den();
        std::int64_t g = std::gcd(lcd, d);
        lcd = checked_mul(lcd / g, d);
    }

    FlowNetwork net;
    net.scale = lcd;
    for (const auto& it : prob.items) net.item_ids.push_back(it.id);

    std::int64_t w_plus = 0;
    std::vector<std::int64_t> scaled(prob.items.size(), 0);
    for (std::size_t i = 0; i < prob.items.size(); ++i) {
        scaled[i] = checked_mul(profits[i].num(), lcd / profits[i].den());
        if (scaled[i] > 0) {
            if (w_plus > INT64_MAX - scaled[i]) throw std::overflow_error("W+ overflow");
            w_plus += scaled[i];
        }
    }
    net.big_m = w_plus + 1;

    for (std::size_t i = 0; i < prob.items.size(); ++i) {
        int node = (int)i + 2;
        if (scaled[i] > 0) net.arcs.push_back({net.source, node, scaled[i]});
        if (scaled[i] < 0) net.arcs.push_back({node, net.sink, -scaled[i]});
        if (!prob.items[i].executable) net.arcs.push_back({node, net.sink, net.big_m});
        for (std::size_t j : preds[i]) {
            net.arcs.push_back({node, (int)j + 2, net.big_m});
        }
    }
    return net;
}

Selection min_cut_select(const SelectionProblem& prob) {
    Selection out;
    if (prob.items.empty()) return out;
    FlowNetwork net = build_network(prob);

    MaxFlow flow((int)prob.items.size() + 2);
    for (const auto& arc : net.arcs) flow.add_arc(arc.from, arc.to, arc.capacity);
    flow.solve(net.source, net.sink);

    std::vector<bool> side = flow.source_side(net.source);
    for (std::size_t i = 0; i < prob.items.size(); ++i) {
        if (side[i + 2]) {
            out.chosen.insert(prob.items[i].id);
            out.objective += prob.profit(i);
        }
    }
    return out;
}

Selection greedy_select(const SelectionProblem& prob) {
    auto idx = index_items(prob);
    auto preds = predecessor_lists(prob, idx);
    const std::size_t n = prob.items.size();

    // Transitive predecessor closure per item.
    std::vector<std::set<std::size_t>> closure(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::deque<std::size_t> queue{i};
        closure[i].insert(i);
        while (!queue.empty()) {
            std::size_t v = queue.front();
            queue.pop_front();
            for (std::size_t j : preds[v]) {
                if (closure[i].insert(j).second) queue.push_back(j);
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const SelectionItem& ia = prob.items[a];
        const SelectionItem& ib = prob.items[b];
        bool inf_a = ia.cost.is_zero();
        bool inf_b = ib.cost.is_zero();
        if (inf_a != inf_b) return inf_a;
        if (!inf_a) {
            // w_a/c_a vs w_b/c_b by cross multiplication
            Rational lhs = ia.value * ib.cost;
            Rational rhs = ib.value * ia.cost;
            if (lhs != rhs) return rhs < lhs;
        } else if (ia.value != ib.value) {
            return ib.value < ia.value;
        }
        return ia.id < ib.id;
    });

    Selection out;
    std::vector<bool> taken(n, false);
    for (std::size_t i : order) {
        if (taken[i]) continue;
        bool feasible = true;
        Rational gain(0, 1);
        for (std::size_t m : closure[i]) {
            if (!prob.items[m].executable) {
                feasible = false;
                break;
            }
            if (!taken[m]) gain += prob.profit(m);
        }
        if (!feasible || !gain.positive()) continue;
        for (std::size_t m : closure[i]) {
            if (!taken[m]) {
                taken[m] = true;
                out.chosen.insert(prob.items[m].id);
                out.objective += prob.profit(m);
            }
        }
    }
    return out;
}

Selection brute_force_select(const SelectionProblem& prob) {
    const std::size_t n = prob.items.size();
    if (n > 20) throw std::invalid_argument("brute force limited to 20 items");
    auto idx = index_items(prob);
    auto preds = predecessor_lists(prob, idx);

    std::vector<std::uint32_t> pred_mask(n, 0);
    std::uint32_t exec_mask = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : preds[i]) pred_mask[i] |= (1u << j);
        if (prob.items[i].executable) exec_mask |= (1u << i);
    }

    std::vector<Rational> profits(n, Rational(0, 1));
    for (std::size_t i = 0; i < n; ++i) profits[i] = prob.profit(i);

    auto chosen_ids = [&](std::uint32_t mask) {
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) ids.push_back(prob.items[i].id);
        }
        std::sort(ids.begin(), ids.end());
        return ids;
    };

    std::uint32_t best_mask = 0;
    Rational best(0, 1);
    std::vector<std::string> best_ids;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if ((mask & ~exec_mask) != 0) continue;
        bool closed = true;
        for (std::size_t i = 0; i < n && closed; ++i) {
            if ((mask & (1u << i)) && (pred_mask[i] & ~mask) != 0) closed = false;
        }
        if (!closed) continue;
        Rational total(0, 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) total += profits[i];
        }
        if (total > best) {
            best = total;
            best_mask = mask;
            best_ids = chosen_ids(mask);
        } else if (total == best) {
            auto ids = chosen_ids(mask);
            if (ids < best_ids) {
                best_mask = mask;
                best_ids = ids;
            }
        }
    }

    Selection out;
    out.objective = best;
    for (const auto& id : chosen_ids(best_mask)) out.chosen.insert(id);
    return out;
}

std::vector<SweepPoint> lambda_sweep(const SelectionProblem& base,
                                     const std::vector<Rational>& grid) {
    if (grid.empty()) throw std::invalid_argument("empty lambda grid");
    auto idx = index_items(base);
    std::vector<SweepPoint> out;
    for (const Rational& lambda : grid) {
        SelectionProblem prob = base;
        prob.lambda = lambda;
        Selection sel = min_cut_select(prob);
        SweepPoint pt;
        pt.lambda = lambda;
        pt.chosen_count = sel.chosen.size();
        for (const auto& id : sel.chosen) {
            const SelectionItem& it = prob.items[idx.at(id)];
            pt.repair_mass += it.value;
            pt.cost_mass += it.cost;
        }
        out.push_back(pt);
    }
    return out;
}

namespace {

json rational_to_json(const Rational& r) {
    return json{{"num", r.num()}, {"den", r.den()}};
}

Rational rational_from_json(const json& j) {
    return Rational(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>());
}

}  // namespace

std::string problem_to_json(const SelectionProblem& prob) {
    json j;
    j["items"] = json::array();
    for (const auto& it : prob.items) {
        j["items"].push_back(json{{"id", it.id},
                                  {"w", rational_to_json(it.value)},
                                  {"c", rational_to_json(it.cost)},
                                  {"v", it.executable ? 1 : 0}});
    }
    j["edges"] = json::array();
    for (const auto& [a, b] : prob.closure_edges) j["edges"].push_back({a, b});
    j["lambda"] = rational_to_json(prob.lambda);
    return j.dump(2) + "\n";
}

SelectionProblem problem_from_json(const std::string& text) {
    json j = json::parse(text);
    SelectionProblem prob;
    for (const auto& it : j.at("items")) {
        SelectionItem item;
        item.id = it.at("id").get<std::string>();
        item.value = rational_from_json(it.at("w"));
        item.cost = rational_from_json(it.at("c"));
        item.executable = it.at("v").get<int>() != 0;
        prob.items.push_back(std::move(item));
    }
    if (j.contains("edges")) {
        for (const auto& e : j.at("edges")) {
            prob.closure_edges.emplace_back(e.at(0).get<std::string>(),
                                            e.at(1).get<std::string>());
        }
    }
    prob.lambda = rational_from_json(j.at("lambda"));
    return prob;
}

std::string selection_to_json(const Selection& sel) {
    json j;
    j["chosen"] = json::array();
    for (const auto& id : sel.chosen) j["chosen"].push_back(id);
    j["objective"] = rational_to_json(sel.objective);
    return j.dump(2) + "\n";
}

}  // namespace memorepair
