#pragma once

// Tanner graph representation of an LDPC parity-check matrix, plus alist
// text-format load/store and ensemble statistics.
//
// The graph is stored in CSR form on both sides. Edge ids are dense
// 0..E-1 in variable-node-major order, so the id of the k-th edge of
// variable node v is vn_offset[v] + k. The check-node side carries the
// matching ids so message arrays can be indexed from either direction.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spms {

class TannerGraph {
  public:
    TannerGraph() = default;

    /// Builds a graph from an explicit (vn, cn) edge list. Rejects duplicate
    /// edges and out-of-range endpoints; degree bounds are the caller's
    /// business (the alist loader enforces the min-degree rule).
    static TannerGraph from_edges(std::int32_t n_vars, std::int32_t n_checks,
                                  std::vector<std::pair<std::int32_t, std::int32_t>> edges) {
        if (n_vars <= 0 || n_checks <= 0)
            throw std::invalid_argument("tanner graph: node counts must be positive");
        std::sort(edges.begin(), edges.end());
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const auto [v, c] = edges[i];
            if (v < 0 || v >= n_vars || c < 0 || c >= n_checks)
                throw std::invalid_argument("tanner graph: edge endpoint out of range");
            if (i > 0 && edges[i] == edges[i - 1])
                throw std::invalid_argument("tanner graph: duplicate edge");
        }
        TannerGraph g;
        g.n_vars_ = n_vars;
        g.n_checks_ = n_checks;
        g.vn_off_.assign(static_cast<std::size_t>(n_vars) + 1, 0);
        g.cn_off_.assign(static_cast<std::size_t>(n_checks) + 1, 0);
        for (const auto& [v, c] : edges) {
            ++g.vn_off_[static_cast<std::size_t>(v) + 1];
            ++g.cn_off_[static_cast<std::size_t>(c) + 1];
        }
        for (std::size_t i = 1; i < g.vn_off_.size(); ++i) g.vn_off_[i] += g.vn_off_[i - 1];
        for (std::size_t i = 1; i < g.cn_off_.size(); ++i) g.cn_off_[i] += g.cn_off_[i - 1];
        g.vn_cn_.resize(edges.size());
        g.cn_vn_.resize(edges.size());
        g.cn_eid_.resize(edges.size());
        // Edges are sorted vn-major, so filling in order yields ascending
        // neighbor lists on the vn side and dense vn-major edge ids.
        std::vector<std::int32_t> cn_fill(static_cast<std::size_t>(n_checks), 0);
        for (std::size_t eid = 0; eid < edges.size(); ++eid) {
            const auto [v, c] = edges[eid];
            g.vn_cn_[eid] = c;
            const std::size_t slot = static_cast<std::size_t>(g.cn_off_[c]) + cn_fill[c]++;
            g.cn_vn_[slot] = v;
            g.cn_eid_[slot] = static_cast<std::int32_t>(eid);
        }
        return g;
    }

    std::int32_t n_vars() const { return n_vars_; }
    std::int32_t n_checks() const { return n_checks_; }
    std::int32_t n_edges() const { return static_cast<std::int32_t>(vn_cn_.size()); }

    std::int32_t vn_degree(std::int32_t v) const { return vn_off_[v + 1] - vn_off_[v]; }
    std::int32_t cn_degree(std::int32_t c) const { return cn_off_[c + 1] - cn_off_[c]; }
    std::int32_t vn_offset(std::int32_t v) const { return vn_off_[v]; }
    std::int32_t cn_offset(std::int32_t c) const { return cn_off_[c]; }

    /// Check-node neighbors of variable node v, ascending. The edge id of the
    /// k-th entry is vn_offset(v) + k.
    const std::int32_t* vn_neighbors(std::int32_t v) const { return vn_cn_.data() + vn_off_[v]; }
    /// Variable-node neighbors of check node c, ascending.
    const std::int32_t* cn_neighbors(std::int32_t c) const { return cn_vn_.data() + cn_off_[c]; }
    /// Edge ids of check node c's edges, parallel to cn_neighbors(c).
    const std::int32_t* cn_edge_ids(std::int32_t c) const { return cn_eid_.data() + cn_off_[c]; }

    /// Dense edge id of (v, c), or -1 if absent.
    std::int32_t edge_id(std::int32_t v, std::int32_t c) const {
        const auto* first = vn_cn_.data() + vn_off_[v];
        const auto* last = vn_cn_.data() + vn_off_[v + 1];
        const auto* it = std::lower_bound(first, last, c);
        if (it == last || *it != c) return -1;
        return vn_off_[v] + static_cast<std::int32_t>(it - first);
    }

    std::vector<std::pair<std::int32_t, std::int32_t>> edge_list() const {
        std::vector<std::pair<std::int32_t, std::int32_t>> edges;
        edges.reserve(vn_cn_.size());
        for (std::int32_t v = 0; v < n_vars_; ++v)
            for (std::int32_t k = vn_off_[v]; k < vn_off_[v + 1]; ++k)
                edges.emplace_back(v, vn_cn_[k]);
        return edges;
    }

    /// Rebuilds the cn-side adjacency from the vn side and compares. Used by
    /// tests and the loader to prove the two views describe one edge set.
    bool cross_consistent() const {
        std::vector<std::vector<std::int32_t>> rebuilt(static_cast<std::size_t>(n_checks_));
        for (std::int32_t v = 0; v < n_vars_; ++v)
            for (std::int32_t k = vn_off_[v]; k < vn_off_[v + 1]; ++k)
                rebuilt[static_cast<std::size_t>(vn_cn_[k])].push_back(v);
        for (std::int32_t c = 0; c < n_checks_; ++c) {
            const auto& want = rebuilt[static_cast<std::size_t>(c)];
            if (static_cast<std::int32_t>(want.size()) != cn_degree(c)) return false;
            if (!std::equal(want.begin(), want.end(), cn_neighbors(c))) return false;
        }
        return true;
    }

  private:
    std::int32_t n_vars_ = 0;
    std::int32_t n_checks_ = 0;
    std::vector<std::int32_t> vn_off_, vn_cn_;
    std::vector<std::int32_t> cn_off_, cn_vn_, cn_eid_;
};

struct DegreeDistribution {
    std::map<std::int32_t, std::int32_t> vn_degrees;  // degree -> node count
    std::map<std::int32_t, std::int32_t> cn_degrees;
    double rate = 0.0;  // design rate (N - M) / N, assumes full-rank H
};

inline DegreeDistribution degree_report(const TannerGraph& g) {
    DegreeDistribution d;
    for (std::int32_t v = 0; v < g.n_vars(); ++v) ++d.vn_degrees[g.vn_degree(v)];
    for (std::int32_t c = 0; c < g.n_checks(); ++c) ++d.cn_degrees[g.cn_degree(c)];
    d.rate = static_cast<double>(g.n_vars() - g.n_checks()) / static_cast<double>(g.n_vars());
    return d;
}

/// Variable nodes whose degree is in `degrees`, ascending.
inline std::vector<std::int32_t> select_nodes_by_degree(const TannerGraph& g,
                                                        const std::set<std::int32_t>& degrees) {
    std::vector<std::int32_t> out;
    for (std::int32_t v = 0; v < g.n_vars(); ++v)
        if (degrees.count(g.vn_degree(v))) out.push_back(v);
    return out;
}

// ---------------------------------------------------------------------------
// alist interchange format
//
//   line 1: N M
//   line 2: max_vn_deg max_cn_deg
//   line 3: N vn degrees          line 4: M cn degrees
//   N lines of 1-based cn neighbors, then M lines of 1-based vn neighbors;
//   zero entries are padding.
// ---------------------------------------------------------------------------

namespace detail {

struct AlistScanner {
    explicit AlistScanner(std::istream& in) : in_(in) {}

    bool next_line(std::vector<long long>& fields) {
        std::string line;
        fields.clear();
        while (std::getline(in_, line)) {
            ++line_no_;
            std::istringstream ls(line);
            std::string tok;
            int field_no = 0;
            while (ls >> tok) {
                ++field_no;
                try {
                    std::size_t pos = 0;
                    const long long value = std::stoll(tok, &pos);
                    if (pos != tok.size()) throw std::invalid_argument(tok);
                    fields.push_back(value);
                } catch (const std::exception&) {
                    fail(field_no, "expected an integer, got '" + tok + "'");
                }
            }
            if (!fields.empty()) return true;  // skip blank lines
        }
        return false;
    }

    [[noreturn]] void fail(int field, const std::string& what) const {
        std::ostringstream msg;
        msg << "alist line " << line_no_;
        if (field > 0) msg << ", field " << field;
        msg << ": " << what;
        throw std::runtime_error(msg.str());
    }

    int line_no() const { return line_no_; }

  private:
    std::istream& in_;
    int line_no_ = 0;
};

}  // namespace detail

/// Parses an alist stream into a validated TannerGraph. Zero-padded neighbor
/// entries are discarded; both adjacency sections must describe the same edge
/// set; nodes of degree < 2 are rejected.
inline TannerGraph load_alist(std::istream& in) {
    detail::AlistScanner sc(in);
    std::vector<long long> f;

    if (!sc.next_line(f) || f.size() != 2) sc.fail(0, "malformed header, expected 'N M'");
    const long long n_vars = f[0], n_checks = f[1];
    if (n_vars <= 0 || n_checks <= 0) sc.fail(0, "node counts must be positive");

    if (!sc.next_line(f) || f.size() != 2) sc.fail(0, "malformed header, expected max degrees");
    const long long max_vn_deg = f[0], max_cn_deg = f[1];
    if (max_vn_deg <= 0 || max_cn_deg <= 0) sc.fail(0, "max degrees must be positive");

    auto read_degrees = [&](long long count, long long max_deg, const char* side) {
        std::vector<std::int32_t> degs;
        if (!sc.next_line(f) || static_cast<long long>(f.size()) != count)
            sc.fail(0, std::string("expected ") + std::to_string(count) + " " + side + " degrees");
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f[i] < 2)
                sc.fail(static_cast<int>(i + 1),
                        std::string(side) + " degree " + std::to_string(f[i]) +
                            " below the minimum of 2");
            if (f[i] > max_deg)
                sc.fail(static_cast<int>(i + 1),
                        std::string(side) + " degree exceeds declared maximum");
            degs.push_back(static_cast<std::int32_t>(f[i]));
        }
        return degs;
    };
    const auto vn_degs = read_degrees(n_vars, max_vn_deg, "vn");
    const auto cn_degs = read_degrees(n_checks, max_cn_deg, "cn");

    // Neighbor block: returns per-node ascending 0-based neighbor lists.
    auto read_block = [&](const std::vector<std::int32_t>& degs, long long limit,
                          const char* side) {
        std::vector<std::vector<std::int32_t>> adj(degs.size());
        for (std::size_t node = 0; node < degs.size(); ++node) {
            if (!sc.next_line(f)) sc.fail(0, std::string("missing ") + side + " neighbor line");
            std::vector<std::int32_t> nb;
            for (std::size_t i = 0; i < f.size(); ++i) {
                const long long x = f[i];
                if (x == 0) continue;  // padding
                if (x < 1 || x > limit)
                    sc.fail(static_cast<int>(i + 1), "neighbor index out of range");
                nb.push_back(static_cast<std::int32_t>(x - 1));
            }
            std::sort(nb.begin(), nb.end());
            if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
                sc.fail(0, "duplicate neighbor");
            if (static_cast<std::int32_t>(nb.size()) != degs[node])
                sc.fail(0, std::string(side) + " neighbor count " + std::to_string(nb.size()) +
                               " does not match declared degree " + std::to_string(degs[node]));
            adj[node] = std::move(nb);
        }
        return adj;
    };
    const auto vn_adj = read_block(vn_degs, n_checks, "vn");
    const auto cn_adj = read_block(cn_degs, n_vars, "cn");

    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    for (std::size_t v = 0; v < vn_adj.size(); ++v)
        for (const std::int32_t c : vn_adj[v]) edges.emplace_back(static_cast<std::int32_t>(v), c);
    TannerGraph g = TannerGraph::from_edges(static_cast<std::int32_t>(n_vars),
                                            static_cast<std::int32_t>(n_checks), std::move(edges));

    // Cross-validate against the cn-side section of the file.
    for (std::int32_t c = 0; c < g.n_checks(); ++c) {
        const auto& want = cn_adj[static_cast<std::size_t>(c)];
        const bool same = static_cast<std::int32_t>(want.size()) == g.cn_degree(c) &&
                          std::equal(want.begin(), want.end(), g.cn_neighbors(c));
        if (!same)
            throw std::runtime_error(
                "alist: cn neighbor section disagrees with vn section at check " +
                std::to_string(c));
    }
    return g;
}

/// Emits the canonical alist text for a graph: ascending neighbors, lines
/// zero-padded to the rectangular max-degree width.
inline void write_alist(const TannerGraph& g, std::ostream& out) {
    std::int32_t max_vn = 0, max_cn = 0;
    for (std::int32_t v = 0; v < g.n_vars(); ++v) max_vn = std::max(max_vn, g.vn_degree(v));
    for (std::int32_t c = 0; c < g.n_checks(); ++c) max_cn = std::max(max_cn, g.cn_degree(c));

    out << g.n_vars() << ' ' << g.n_checks() << '\n';
    out << max_vn << ' ' << max_cn << '\n';
    for (std::int32_t v = 0; v < g.n_vars(); ++v)
        out << g.vn_degree(v) << (v + 1 < g.n_vars() ? ' ' : '\n');
    for (std::int32_t c = 0; c < g.n_checks(); ++c)
        out << g.cn_degree(c) << (c + 1 < g.n_checks() ? ' ' : '\n');

    auto write_row = [&out](const std::int32_t* nb, std::int32_t deg, std::int32_t width) {
        for (std::int32_t k = 0; k < width; ++k) {
            out << (k < deg ? nb[k] + 1 : 0);
            out << (k + 1 < width ? ' ' : '\n');
        }
    };
    for (std::int32_t v = 0; v < g.n_vars(); ++v)
        write_row(g.vn_neighbors(v), g.vn_degree(v), max_vn);
    for (std::int32_t c = 0; c < g.n_checks(); ++c)
        write_row(g.cn_neighbors(c), g.cn_degree(c), max_cn);
}

inline std::string write_alist(const TannerGraph& g) {
    std::ostringstream os;
    write_alist(g, os);
    return os.str();
}

inline TannerGraph load_alist(const std::string& text) {
    std::istringstream is(text);
    return load_alist(is);
}

// ---------------------------------------------------------------------------
// Graph diagnostics
// ---------------------------------------------------------------------------

/// Exact girth by BFS from every variable node (shortest cycle through the
/// root; minimized over roots). Returns 0 for an acyclic graph. Search depth
/// is capped by the best cycle found so far, so this is fast once any short
/// cycle exists.
inline std::int32_t girth(const TannerGraph& g) {
    const std::int32_t n = g.n_vars() + g.n_checks();
    auto node_of_cn = [&](std::int32_t c) { return g.n_vars() + c; };
    std::vector<std::int32_t> dist(static_cast<std::size_t>(n));
    std::vector<std::int32_t> parent_edge(static_cast<std::size_t>(n));
    std::vector<std::uint32_t> stamp(static_cast<std::size_t>(n), 0);
    std::uint32_t epoch = 0;
    std::vector<std::int32_t> queue;
    std::int32_t best = 0;  // 0 = no cycle found

    for (std::int32_t root = 0; root < g.n_vars(); ++root) {
        ++epoch;
        queue.clear();
        queue.push_back(root);
        dist[root] = 0;
        parent_edge[root] = -1;
        stamp[root] = epoch;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::int32_t u = queue[head];
            // Any cycle first seen from u has length >= 2 * dist[u].
            if (best != 0 && 2 * dist[u] >= best) break;
            const bool u_is_vn = u < g.n_vars();
            const std::int32_t deg = u_is_vn ? g.vn_degree(u) : g.cn_degree(u - g.n_vars());
            for (std::int32_t k = 0; k < deg; ++k) {
                std::int32_t w, eid;
                if (u_is_vn) {
                    w = node_of_cn(g.vn_neighbors(u)[k]);
                    eid = g.vn_offset(u) + k;
                } else {
                    const std::int32_t c = u - g.n_vars();
                    w = g.cn_neighbors(c)[k];
                    eid = g.cn_edge_ids(c)[k];
                }
                if (eid == parent_edge[u]) continue;
                if (stamp[w] == epoch) {
                    const std::int32_t cycle = dist[u] + dist[w] + 1;
                    if (best == 0 || cycle < best) best = cycle;
                } else {
                    stamp[w] = epoch;
                    dist[w] = dist[u] + 1;
                    parent_edge[w] = eid;
                    queue.push_back(w);
                }
            }
        }
        if (best == 4) break;  // bipartite minimum
    }
    return best;
}

/// Rank of H over GF(2) by bit-packed Gaussian elimination. Desk-scale
/// diagnostic (O(M^2 * N / 64)).
inline std::int32_t gf2_rank(const TannerGraph& g) {
    const std::size_t words = (static_cast<std::size_t>(g.n_vars()) + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows(
        static_cast<std::size_t>(g.n_checks()), std::vector<std::uint64_t>(words, 0));
    for (std::int32_t c = 0; c < g.n_checks(); ++c)
        for (std::int32_t k = 0; k < g.cn_degree(c); ++k) {
            const std::int32_t v = g.cn_neighbors(c)[k];
            rows[c][static_cast<std::size_t>(v) / 64] |= 1ULL << (v % 64);
        }
    std::int32_t rank = 0;
    for (std::int32_t col = 0; col < g.n_vars() && rank < g.n_checks(); ++col) {
        const std::size_t w = static_cast<std::size_t>(col) / 64;
        const std::uint64_t bit = 1ULL << (col % 64);
        std::int32_t pivot = -1;
        for (std::int32_t r = rank; r < g.n_checks(); ++r)
            if (rows[r][w] & bit) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::int32_t r = 0; r < g.n_checks(); ++r)
            if (r != rank && (rows[r][w] & bit))
                for (std::size_t i = 0; i < words; ++i) rows[r][i] ^= rows[rank][i];
        ++rank;
    }
    return rank;
}

}  // namespace spms
