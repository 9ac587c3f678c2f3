#pragma once

#include <nvb/field.hpp>
#include <nvb/mesh.hpp>

#include <array>
#include <vector>

namespace nvb {

/// Degree-p lattice {(i,j,k)/p : i+j+k = p}; (i,j,k) are the barycentric
/// weights of the element vertices v0, v1, v2.
struct LagrangeNodes
{
    int p = 1;
    std::vector<std::array<int, 3>> lattice;

    explicit LagrangeNodes(int degree);
    std::size_t size() const { return lattice.size(); }
};

/// Affine element: barycentric coordinates and their constant gradients.
struct ElementMap
{
    TrianglePoints vertices;
    std::array<Point, 3> grad_lambda;

    explicit ElementMap(const TrianglePoints& t);
    std::array<double, 3> barycentric(Point x) const;
};

/// Values and physical gradients of the nodal basis at x.
void lagrange_basis(const LagrangeNodes& nodes, const ElementMap& element, Point x, std::vector<double>& values,
                    std::vector<Point>& gradients);

/// Continuous piecewise-polynomial interpolant on the leaves of a conforming
/// mesh. Nodes on shared edges and vertices carry a single global value.
struct Interpolant
{
    LagrangeNodes nodes{1};
    std::vector<Index> elements;                   ///< leaf ids, ascending
    std::vector<std::vector<Index>> element_nodes; ///< global node per lattice entry
    std::vector<Point> node_points;
    std::vector<double> values;

    /// Gradient of the interpolant on element e (position in `elements`).
    Point gradient(std::size_t e, const ElementMap& map, Point x) const;
    double value(std::size_t e, const ElementMap& map, Point x) const;
};

Interpolant interpolate(const Mesh& mesh, int p, const Field& f);

} // namespace nvb
