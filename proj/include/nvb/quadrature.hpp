#pragma once

#include <nvb/geometry.hpp>

#include <vector>

namespace nvb {

/// Gauss-Legendre nodes and weights on [0, 1].
struct LineRule
{
    std::vector<double> points;
    std::vector<double> weights;
};

LineRule gauss_legendre(int n);

/// Rule on the reference triangle (0,0), (1,0), (0,1); weights sum to 1/2.
struct QuadratureRule
{
    std::vector<Point> points;
    std::vector<double> weights;
    int degree = 0; ///< polynomials up to this total degree are integrated exactly
};

/// Collapsed (conical) Gauss product rule exact for total degree `degree`.
/// Results are cached per degree.
const QuadratureRule& triangle_rule(int degree);

/// Quadrature points and weights in physical coordinates.
struct WeightedPoints
{
    std::vector<Point> points;
    std::vector<double> weights;
};

/// Maps a reference rule onto t (weights scaled by 2|T|).
WeightedPoints map_rule(const QuadratureRule& rule, const TrianglePoints& t);

/// Graded rule for integrands singular at t[0]. The collapsed coordinate
/// s in [0,1] (distance fraction from the apex) is split into geometric layers
/// [2^-(k+1), 2^-k], k < levels, plus the core [0, 2^-levels]; each layer
/// carries an n_radial x n_angular Gauss product. Layer k is the trapezoid
/// between the apex-similar copies of t scaled by 2^-k and 2^-(k+1).
WeightedPoints apex_graded_rule(const TrianglePoints& t, int levels, int n_radial, int n_angular);

} // namespace nvb
