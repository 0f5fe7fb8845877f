// SPDX-License-Identifier: Apache-2.0
#pragma once
// Scalarized repair selection.
//
// For profit p_i = w_i - lambda*c_i, maximizing sum(p_i) over executable
// predecessor-closed subsets is a maximum-weight closure problem and is
// solved exactly by one s-t min-cut:
//   s -> i   (cap p_i)   for p_i > 0
//   i -> t   (cap -p_i)  for p_i < 0
//   i -> t   (cap M)     for v_i = 0, cumulative with the reward arc
//   i -> j   (cap M)     for every required predecessor j of i
// with M strictly above the total positive profit. Profits are exact
// rationals, scaled to integers by their common denominator, so the cut is
// exact rather than floating-point-close.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "memorepair/rational.hpp"

namespace memorepair {

struct SelectionItem {
    std::string id;
    Rational value{0, 1};  // w_i
    Rational cost{0, 1};   // c_i
    bool executable = true;
};

struct SelectionProblem {
    std::vector<SelectionItem> items;
    // (j, i): j must be selected whenever i is.
    std::vector<std::pair<std::string, std::string>> closure_edges;
    Rational lambda{0, 1};

    Rational profit(std::size_t index) const;
};

struct Selection {
    std::set<std::string> chosen;
    Rational objective{0, 1};
};

struct FlowArc {
    int from = 0;
    int to = 0;
    std::int64_t capacity = 0;
};

struct FlowNetwork {
    int source = 0;
    int sink = 1;
    std::vector<std::string> item_ids;  // node k+2 is item_ids[k]
    std::vector<FlowArc> arcs;
    std::int64_t big_m = 0;      // W+ + 1 after scaling
    std::int64_t scale = 1;      // common denominator applied to profits
};

// Throws std::overflow_error when scaled capacities leave int64.
FlowNetwork build_network(const SelectionProblem& prob);

// Exact optimum. The chosen set is the canonical minimal source side of a
// minimum cut (residual reachability from s), which excludes zero-profit
// items unless a selected dependent forces them.
Selection min_cut_select(const SelectionProblem& prob);

// Value-to-cost greedy baseline under the same lambda: candidates in
// descending w/c (cost 0 sorts first, ties by id); a candidate is taken iff
// its full predecessor closure is executable and adds strictly positive
// profit. Never better than min_cut_select.
Selection greedy_select(const SelectionProblem& prob);

// Exhaustive oracle for instances of at most 20 items. Ties resolve to the
// lexicographically smallest chosen id set.
Selection brute_force_select(const SelectionProblem& prob);

struct SweepPoint {
    Rational lambda{0, 1};
    Rational repair_mass{0, 1};  // sum of w over chosen
    Rational cost_mass{0, 1};    // sum of c over chosen
    std::size_t chosen_count = 0;
};

// min_cut_select per grid value; the frontier recovers the repair-everything
// endpoint at lambda=0 and the withdraw-only endpoint for large lambda.
std::vector<SweepPoint> lambda_sweep(const SelectionProblem& base,
                                     const std::vector<Rational>& grid);

// Problem/selection exchange formats (items as (id, w, c, v) with exact
// numerator/denominator pairs).
std::string problem_to_json(const SelectionProblem& prob);
SelectionProblem problem_from_json(const std::string& text);
std::string selection_to_json(const Selection& sel);

}  // namespace memorepair
