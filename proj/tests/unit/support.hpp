#pragma once

#include "mesh.hpp"

#include <cstdint>
#include <random>

namespace hreig::test {

/// Reference triangle (0,0), (1,0), (0,1) with the newest vertex at the right angle.
Mesh reference_triangle();

/// Mesh after `rounds` of random marking (each triangle marked with probability p).
Mesh random_refinement(const Mesh& mesh, int rounds, double p, std::uint64_t seed);

/// Unit square split along the diagonal (0,0)-(1,1), which is the refinement edge of both halves.
Mesh unit_square();

}  // namespace hreig::test
