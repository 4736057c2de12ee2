#pragma once

#include <cstdint>
#include <vector>

#include "upg/rotation.hpp"

namespace upg {

struct EmbeddingResult {
    bool planar;
    // Genus 0 when planar. For non-planar input this is an arbitrary valid
    // rotation system (its genus is necessarily positive).
    RotationSystem rs;
    // Edge ids of a Kuratowski-style obstruction (a K5 or K3,3 subdivision),
    // nonempty exactly when not planar.
    std::vector<Edge> witness;
};

// Computes a genus-0 rotation system for a connected graph whose
// simplification is planar, with every parallel bundle consecutive at both
// endpoints, or reports non-planarity with an obstruction. Deterministic.
EmbeddingResult planar_embed(const MultiGraph& g);

// Enumerates every rotation system of the simplification and reports whether
// exactly two have genus 0 and those two are mutual mirror images. Requires a
// 3-connected simplification and a small graph (at most 8 vertices or at most
// 14 edges).
bool whitney_check(const MultiGraph& g);

// Picks the planar embedding or its mirror image with probability 1/2 each,
// then randomizes every parallel bundle. Requires a 3-connected planar
// simplification. Deterministic given the seed.
RotationSystem uniform_planar_embedding(const MultiGraph& g, std::uint64_t seed);

namespace detail {

// Same as uniform_planar_embedding but trusts the caller on 3-connectivity.
RotationSystem uniform_planar_embedding_unchecked(const MultiGraph& g, std::uint64_t seed);

} // namespace detail

} // namespace upg
