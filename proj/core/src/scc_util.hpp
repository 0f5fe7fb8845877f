// SPDX-License-Identifier: Apache-2.0
#pragma once
// Internal: iterative Tarjan over integer adjacency lists.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace memorepair::detail {

// Components are returned in reverse-topological discovery order; callers
// renumber as needed.
inline std::vector<std::vector<int>> scc_components(const std::vector<std::vector<int>>& adj) {
    int n = (int)adj.size();
    std::vector<int> dfs_num(n, -1), low(n, 0), on_stack(n, 0);
    std::vector<int> stack;
    std::vector<std::vector<int>> comps;
    int counter = 0;

    struct Frame {
        int v;
        std::size_t edge;
    };
    for (int start = 0; start < n; ++start) {
        if (dfs_num[start] != -1) continue;
        std::vector<Frame> frames{{start, 0}};
        while (!frames.empty()) {
            Frame& f = frames.back();
            int v = f.v;
            if (f.edge == 0) {
                dfs_num[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            while (f.edge < adj[v].size()) {
                int w = adj[v][f.edge++];
                if (dfs_num[w] == -1) {
                    frames.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], dfs_num[w]);
            }
            if (descended) continue;
            if (low[v] == dfs_num[v]) {
                std::vector<int> c;
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    c.push_back(w);
                    if (w == v) break;
                }
                comps.push_back(std::move(c));
            }
            frames.pop_back();
            if (!frames.empty()) {
                int parent = frames.back().v;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    return comps;
}

}  // namespace memorepair::detail
