#pragma once

#include <array>
#include <cmath>
#include <span>

namespace nvb {

struct Point
{
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline Point midpoint(Point a, Point b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

using TrianglePoints = std::array<Point, 3>;

inline double signed_area(const TrianglePoints& t)
{
    return 0.5 * cross(t[1] - t[0], t[2] - t[0]);
}

inline double area(const TrianglePoints& t) { return std::abs(signed_area(t)); }

/// Interior angle at each vertex, in radians.
std::array<double, 3> interior_angles(const TrianglePoints& t);

double min_interior_angle(const TrianglePoints& t);

/// Longest edge length.
double diameter(const TrianglePoints& t);

/// Euclidean distance from a segment [a,b] to p.
double point_segment_distance(Point p, Point a, Point b);

/// Exact Euclidean distance from p to the closed triangle t (0 inside).
double point_triangle_distance(Point p, const TrianglePoints& t);

/// Minimum distance from t to any of the points; +inf when points is empty.
double min_distance(const TrianglePoints& t, std::span<const Point> points);

/// Closed-triangle containment with a relative tolerance on the barycentric coordinates.
bool contains(const TrianglePoints& t, Point p, double tol = 1e-12);

/// Red (4:1) subdivision into congruent children.
std::array<TrianglePoints, 4> red_split(const TrianglePoints& t);

} // namespace nvb
