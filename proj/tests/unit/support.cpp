#include "support.hpp"

#include <vector>

namespace hreig::test {

Mesh reference_triangle() {
    return Mesh({Point(0, 0), Point(1, 0), Point(0, 1)}, {Triangle{{0, 1, 2}}}, 3);
}

Mesh random_refinement(const Mesh& mesh, int rounds, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution pick(p);
    Mesh cur = mesh;
    for (int r = 0; r < rounds; ++r) {
        std::vector<int> marked;
        for (int t = 0; t < cur.num_triangles(); ++t)
            if (pick(rng)) marked.push_back(t);
        if (marked.empty()) marked.push_back(static_cast<int>(rng() % cur.num_triangles()));
        cur = bisect(cur, marked);
    }
    return cur;
}

Mesh unit_square() {
    return Mesh({Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}, {Triangle{{1, 2, 0}, -1, 0, 0}, Triangle{{3, 0, 2}, -1, 0, 1}},
                4);
}

}  // namespace hreig::test
