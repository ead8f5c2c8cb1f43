#ifndef SNAQ_BLOSSOM_H
#define SNAQ_BLOSSOM_H

#include <cstdint>
#include <vector>

namespace snaq {

struct WeightedEdge {
    int u;
    int v;
    int64_t w;
};

// Edmonds' weighted blossom algorithm, O(n^3), integer weights. Returns
// mate[v] or -1. With max_cardinality, the heaviest of the maximum-cardinality
// matchings is returned.
std::vector<int> max_weight_matching(int num_vertices, const std::vector<WeightedEdge> &edges,
                                     bool max_cardinality);

}  // namespace snaq

#endif
