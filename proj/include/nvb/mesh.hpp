#pragma once

#include <nvb/geometry.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace nvb {

using Index = std::size_t;
inline constexpr Index no_index = std::numeric_limits<Index>::max();

class MeshError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Triangle of the refinement forest. The refinement edge is (v[0], v[1]) and
/// v[2] is the newest vertex.
struct Triangle
{
    std::array<Index, 3> v{};
    int generation = 0;
    bool alive = true;
    Index parent = no_index;
    std::array<Index, 2> children{no_index, no_index};
};

/// Undirected edge key, stored as (min, max).
struct EdgeKey
{
    Index a;
    Index b;

    EdgeKey(Index i, Index j) : a(std::min(i, j)), b(std::max(i, j)) {}
    friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
};

struct EdgeKeyHash
{
    std::size_t operator()(const EdgeKey& e) const noexcept
    {
        return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(e.a) << 32) ^ e.b);
    }
};

using MarkSet = std::vector<Index>;

/// Two-dimensional simplicial mesh refined by newest-vertex bisection.
///
/// All triangles ever created are kept (a forest rooted at the initial mesh);
/// the current triangulation is the set of alive leaves. Midpoints are shared
/// through a canonical edge key, so neighbouring bisections reuse one vertex.
class Mesh
{
public:
    Mesh() = default;

    /// Builds a mesh from an initial conforming triangulation. Each triangle's
    /// vertex order encodes its refinement edge (v[0], v[1]).
    ///
    /// Throws MeshError on degenerate or non-finite input, out-of-range
    /// indices, non-conforming input, or incompatible refinement-edge flags.
    static Mesh from_initial(std::vector<Point> vertices, const std::vector<std::array<Index, 3>>& triangles);

    /// Rebuilds a mesh from a full forest (vertices plus every triangle with its
    /// generation and alive flag). Parent/child links and the midpoint table are
    /// reconstructed from the bisection rule.
    static Mesh from_forest(std::vector<Point> vertices, std::vector<Triangle> triangles);

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const Triangle& triangle(Index id) const { return triangles_.at(id); }

    std::size_t leaf_count() const { return leaf_count_; }
    std::size_t initial_count() const { return initial_count_; }
    std::vector<Index> leaves() const;
    bool is_leaf(Index id) const { return id < triangles_.size() && triangles_[id].alive; }

    TrianglePoints points(Index id) const;
    double area(Index id) const { return nvb::area(points(id)); }
    /// h_T = |T|^(1/2).
    double element_size(Index id) const;

    /// Bisects a leaf across its refinement edge. Children are (v2, v0, m) and
    /// (v1, v2, m), both with newest vertex m.
    std::pair<Index, Index> bisect(Index id);

    /// Bisects each marked leaf exactly once. Returns the number of marks.
    std::size_t refine(const MarkSet& marks);

    /// Removes all hanging nodes using newest-vertex bisections only. Returns
    /// the number of additional bisections.
    std::size_t complete();

    bool is_conforming() const;
    bool check_flag_compatibility() const;

    /// Minimum interior angle over the leaves.
    double min_angle() const;
    double leaf_area_sum() const;
    double domain_area() const { return domain_area_; }

    bool is_boundary_edge(Index a, Index b) const { return boundary_.contains(EdgeKey(a, b)); }
    /// Midpoint vertex already created on edge (a, b), or no_index.
    Index edge_midpoint(Index a, Index b) const;
    /// Leaves currently having (a, b) as one of their edges.
    const std::vector<Index>& leaves_on_edge(Index a, Index b) const;

    /// Same predicate without the hanging-node check; used by from_initial.
    static bool flags_compatible(const std::vector<std::array<Index, 3>>& triangles);

private:
    void attach_leaf(Index id);
    void detach_leaf(Index id);
    bool has_hanging_edge(Index id) const;

    std::vector<Point> vertices_;
    std::vector<Triangle> triangles_;
    std::unordered_map<EdgeKey, Index, EdgeKeyHash> midpoints_;
    std::unordered_map<EdgeKey, std::vector<Index>, EdgeKeyHash> edge_leaves_;
    std::unordered_set<EdgeKey, EdgeKeyHash> boundary_;
    std::size_t leaf_count_ = 0;
    std::size_t initial_count_ = 0;
    double domain_area_ = 0.0;
};

/// Minimum interior angle over all descendants of the initial triangles up to
/// the given generation, computed by pure geometric bisection.
double descendant_min_angle(const Mesh& mesh, int generations);

} // namespace nvb
