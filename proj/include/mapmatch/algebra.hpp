#pragma once

// Sum and product operators over mapping graphs.
//
// A product refines two collections of bipartite blocks against each other:
// every pair of blocks (A->M, B->N) splits into A\B->M\N, A&B->M&N and
// B\A->N\M, and any piece with an empty side is dropped. Two lifts of the
// pairwise product to whole graphs are provided: `product_exact` evaluates
// the closed form directly and serves as the serial reference;
// `product_chunked` is the OpenMP kernel that splits the older operand into
// contiguous chunks and reuses intersections to compute the residuals.

#include "mapmatch/model.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace mapmatch {

struct ProductMode {
    enum class Kind { Exact, Chunked };

    Kind kind = Kind::Exact;
    std::size_t chunks = 1; // >= 1; only meaningful for Chunked

    static ProductMode exact() { return {Kind::Exact, 1}; }
    static ProductMode chunked(std::size_t chunks);

    bool is_chunked() const noexcept { return kind == Kind::Chunked; }

    friend bool operator==(const ProductMode&, const ProductMode&) = default;
};

/// Concatenates mappings (g0 first) and unions matches. No refinement.
Graph sum(const Graph& g0, const Graph& g1);

/// Pairwise product of two canonical mappings. Emits up to three mappings in
/// the order (w\v, w&v, v\w), keeping only those with both sides non-empty.
std::vector<Mapping> product_pair(const Mapping& w, const Mapping& v);

/// Closed-form product of two internally disjoint graphs, normalized.
Graph product_exact(const Graph& g0, const Graph& g1);

/// Chunked product. `g0` (the older graph) is split into `chunks` contiguous
/// ranges processed by up to `workers` OpenMP threads; `g1` is shared
/// read-only. Chunk outputs are merged in chunk order, so the result does
/// not depend on `chunks` or `workers`. Normalized.
Graph product_chunked(const Graph& g0, const Graph& g1, std::size_t chunks, int workers = 1);

/// Dispatches on `mode`. `older` plays the chunked role.
Graph product(const Graph& older, const Graph& newer, ProductMode mode, int workers = 1);

/// Brings a graph to normal form:
///  - mappings with an empty side are dropped, the rest canonicalized and
///    deduplicated;
///  - matches that disagree with another match on a user or a mac are
///    dropped;
///  - matched tokens are scrubbed from every mapping;
///  - mappings that still share a token are split with product_pair until
///    they are pairwise disjoint;
///  - single-user single-mac mappings move to the match set;
///  - mappings are ordered by their smallest user token.
/// The result has every token at most once across matches and mappings.
Graph normalize(Graph g);

/// Counts normalize() calls and disjointness violations of their results
/// while an instance is alive. Only one audit may be active at a time.
class ScopedNormalizeAudit {
public:
    ScopedNormalizeAudit();
    ~ScopedNormalizeAudit();
    ScopedNormalizeAudit(const ScopedNormalizeAudit&) = delete;
    ScopedNormalizeAudit& operator=(const ScopedNormalizeAudit&) = delete;

    std::uint64_t normalizations() const noexcept { return normalizations_.load(); }
    std::uint64_t violations() const noexcept { return violations_.load(); }

private:
    friend void audit_normalized(const Graph& g);

    std::atomic<std::uint64_t> normalizations_{0};
    std::atomic<std::uint64_t> violations_{0};
};

} // namespace mapmatch
