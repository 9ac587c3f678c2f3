#include <nvb/geometry.hpp>

#include <algorithm>
#include <limits>

namespace nvb {

std::array<double, 3> interior_angles(const TrianglePoints& t)
{
    std::array<double, 3> angles{};
    for (int i = 0; i < 3; ++i) {
        const Point a = t[(i + 1) % 3] - t[i];
        const Point b = t[(i + 2) % 3] - t[i];
        angles[i] = std::atan2(std::abs(cross(a, b)), dot(a, b));
    }
    return angles;
}

double min_interior_angle(const TrianglePoints& t)
{
    const auto a = interior_angles(t);
    return std::min({a[0], a[1], a[2]});
}

double diameter(const TrianglePoints& t)
{
    return std::max({norm(t[1] - t[0]), norm(t[2] - t[1]), norm(t[0] - t[2])});
}

double point_segment_distance(Point p, Point a, Point b)
{
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) {
        return norm(p - a);
    }
    const double s = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + s * ab));
}

bool contains(const TrianglePoints& t, Point p, double tol)
{
    const double total = signed_area(t);
    if (total == 0.0) {
        return false;
    }
    const double l0 = 0.5 * cross(t[1] - p, t[2] - p) / total;
    const double l1 = 0.5 * cross(t[2] - p, t[0] - p) / total;
    const double l2 = 1.0 - l0 - l1;
    return l0 >= -tol && l1 >= -tol && l2 >= -tol;
}

double point_triangle_distance(Point p, const TrianglePoints& t)
{
    if (contains(t, p, 0.0)) {
        return 0.0;
    }
    return std::min({point_segment_distance(p, t[0], t[1]),
                     point_segment_distance(p, t[1], t[2]),
                     point_segment_distance(p, t[2], t[0])});
}

double min_distance(const TrianglePoints& t, std::span<const Point> points)
{
    double best = std::numeric_limits<double>::infinity();
    for (const Point& p : points) {
        best = std::min(best, point_triangle_distance(p, t));
    }
    return best;
}

std::array<TrianglePoints, 4> red_split(const TrianglePoints& t)
{
    const Point m01 = midpoint(t[0], t[1]);
    const Point m12 = midpoint(t[1], t[2]);
    const Point m20 = midpoint(t[2], t[0]);
    return {TrianglePoints{t[0], m01, m20},
            TrianglePoints{m01, t[1], m12},
            TrianglePoints{m20, m12, t[2]},
            TrianglePoints{m12, m20, m01}};
}

} // namespace nvb
