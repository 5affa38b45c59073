#pragma once

// Progressive-edge-growth code construction. Each edge of a variable node is
// attached to the check node that maximizes the BFS distance from the node in
// the partial graph (unreachable checks count as infinitely far), so short
// cycles appear as late as possible. Ties collapse through: lowest current
// check degree, lowest check index, then a seeded draw among whatever
// remains, which makes the construction fully reproducible.

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spms/rng.hpp"
#include "spms/tanner_graph.hpp"

namespace spms {

inline TannerGraph construct_peg(std::int32_t n_vars,
                                 const std::map<std::int32_t, std::int32_t>& vn_degree_counts,
                                 std::int32_t n_checks, std::uint64_t seed) {
    if (n_vars <= 0 || n_checks <= 0)
        throw std::invalid_argument("peg: node counts must be positive");
    long long total_nodes = 0, total_edges = 0;
    for (const auto& [deg, count] : vn_degree_counts) {
        if (deg < 2) throw std::invalid_argument("peg: vn degrees below 2 are not supported");
        if (count < 1) throw std::invalid_argument("peg: degree counts must be positive");
        if (deg > n_checks)
            throw std::invalid_argument("peg: vn degree exceeds the number of check nodes");
        total_nodes += count;
        total_edges += static_cast<long long>(deg) * count;
    }
    if (total_nodes != n_vars)
        throw std::invalid_argument("peg: degree counts sum to " + std::to_string(total_nodes) +
                                    ", expected " + std::to_string(n_vars));
    if (total_edges < 2LL * n_checks)
        throw std::invalid_argument("peg: too few edges to give every check node degree 2");

    // Descending-degree node order. High-degree nodes need many pairwise
    // compatible checks, so they place edges while the pair space is still
    // empty; the low-degree tail is easy to fit afterwards.
    std::vector<std::int32_t> vn_deg;
    vn_deg.reserve(static_cast<std::size_t>(n_vars));
    for (auto it = vn_degree_counts.rbegin(); it != vn_degree_counts.rend(); ++it)
        vn_deg.insert(vn_deg.end(), static_cast<std::size_t>(it->second), it->first);

    std::vector<std::vector<std::int32_t>> vn_adj(static_cast<std::size_t>(n_vars));
    std::vector<std::vector<std::int32_t>> cn_adj(static_cast<std::size_t>(n_checks));

    constexpr std::int32_t kUnreached = std::numeric_limits<std::int32_t>::max();
    std::vector<std::int32_t> cn_dist(static_cast<std::size_t>(n_checks));
    std::vector<std::uint32_t> vn_stamp(static_cast<std::size_t>(n_vars), 0);
    std::vector<std::uint32_t> cn_stamp(static_cast<std::size_t>(n_checks), 0);
    std::vector<std::int32_t> vn_dist(static_cast<std::size_t>(n_vars));
    std::vector<std::int32_t> frontier, next;
    std::uint32_t epoch = 0;
    Rng rng(seed);

    // BFS from v over the partial graph, filling cn_dist (kUnreached where
    // not reachable). Levels alternate vn / cn.
    auto bfs_from = [&](std::int32_t v) {
        ++epoch;
        for (auto& d : cn_dist) d = kUnreached;
        frontier.clear();
        frontier.push_back(v);
        vn_stamp[v] = epoch;
        vn_dist[v] = 0;
        std::int32_t depth = 0;
        while (!frontier.empty()) {
            next.clear();
            ++depth;  // vn level -> cn level
            for (const std::int32_t u : frontier)
                for (const std::int32_t c : vn_adj[u])
                    if (cn_stamp[c] != epoch) {
                        cn_stamp[c] = epoch;
                        cn_dist[c] = depth;
                        next.push_back(c);
                    }
            frontier.clear();
            ++depth;  // cn level -> vn level
            for (const std::int32_t c : next)
                for (const std::int32_t u : cn_adj[c])
                    if (vn_stamp[u] != epoch) {
                        vn_stamp[u] = epoch;
                        vn_dist[u] = depth;
                        frontier.push_back(u);
                    }
        }
    };

    for (std::int32_t v = 0; v < n_vars; ++v) {
        for (std::int32_t k = 0; k < vn_deg[static_cast<std::size_t>(v)]; ++k) {
            if (k == 0) {
                ++epoch;
                for (auto& d : cn_dist) d = kUnreached;  // isolated node: all checks far
            } else {
                bfs_from(v);
            }
            // Candidates: non-neighbors at maximal distance.
            std::int32_t best_dist = -1;
            for (std::int32_t c = 0; c < n_checks; ++c) {
                if (cn_dist[c] == 1) continue;  // already a neighbor of v
                if (cn_dist[c] > best_dist) best_dist = cn_dist[c];
            }
            if (best_dist < 0) throw std::invalid_argument("peg: node degree exhausts check set");
            std::int32_t best_deg = std::numeric_limits<std::int32_t>::max();
            std::vector<std::int32_t> ties;  // min-degree candidates, ascending index
            for (std::int32_t c = 0; c < n_checks; ++c) {
                if (cn_dist[c] == 1 || cn_dist[c] != best_dist) continue;
                const auto deg = static_cast<std::int32_t>(cn_adj[c].size());
                if (deg < best_deg) {
                    best_deg = deg;
                    ties.assign(1, c);
                }
            }
            // Lowest index first (the ascending scan kept it), then the
            // seeded draw over whatever the chain left (a single node here).
            const std::int32_t chosen = ties[rng.next_below(ties.size())];
            vn_adj[static_cast<std::size_t>(v)].push_back(chosen);
            cn_adj[static_cast<std::size_t>(chosen)].push_back(v);
        }
    }

    for (std::int32_t c = 0; c < n_checks; ++c)
        if (cn_adj[static_cast<std::size_t>(c)].size() < 2)
            throw std::invalid_argument("peg: construction left check node " + std::to_string(c) +
                                        " with degree < 2");

    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    edges.reserve(static_cast<std::size_t>(total_edges));
    for (std::int32_t v = 0; v < n_vars; ++v)
        for (const std::int32_t c : vn_adj[static_cast<std::size_t>(v)]) edges.emplace_back(v, c);
    return TannerGraph::from_edges(n_vars, n_checks, std::move(edges));
}

}  // namespace spms
