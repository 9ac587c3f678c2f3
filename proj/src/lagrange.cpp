#include <nvb/lagrange.hpp>

#include <map>
#include <stdexcept>
#include <tuple>

namespace nvb {

LagrangeNodes::LagrangeNodes(int degree) : p(degree)
{
    if (degree < 1) {
        throw std::invalid_argument("Lagrange degree must be at least 1");
    }
    for (int i = p; i >= 0; --i) {
        for (int j = p - i; j >= 0; --j) {
            lattice.push_back({i, j, p - i - j});
        }
    }
}

ElementMap::ElementMap(const TrianglePoints& t) : vertices(t)
{
    const double two_area = cross(t[1] - t[0], t[2] - t[0]);
    for (int i = 0; i < 3; ++i) {
        const Point e = t[(i + 2) % 3] - t[(i + 1) % 3];
        // lambda_i vanishes on the opposite edge; gradient is its inward normal over 2|T|
        grad_lambda[i] = {-e.y / two_area, e.x / two_area};
    }
}

std::array<double, 3> ElementMap::barycentric(Point x) const
{
    const double l1 = dot(grad_lambda[1], x - vertices[0]);
    const double l2 = dot(grad_lambda[2], x - vertices[0]);
    return {1.0 - l1 - l2, l1, l2};
}

namespace {

/// prod_{a<n} (p*l - a)/(a+1) and its derivative in l.
void lattice_factor(int n, int p, double l, double& value, double& derivative)
{
    value = 1.0;
    derivative = 0.0;
    for (int a = 0; a < n; ++a) {
        const double f = (p * l - a) / (a + 1);
        const double df = static_cast<double>(p) / (a + 1);
        derivative = derivative * f + value * df;
        value *= f;
    }
}

} // namespace

void lagrange_basis(const LagrangeNodes& nodes, const ElementMap& element, Point x, std::vector<double>& values,
                    std::vector<Point>& gradients)
{
    const auto lambda = element.barycentric(x);
    values.resize(nodes.size());
    gradients.resize(nodes.size());
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        std::array<double, 3> f{};
        std::array<double, 3> df{};
        for (int m = 0; m < 3; ++m) {
            lattice_factor(nodes.lattice[n][m], nodes.p, lambda[m], f[m], df[m]);
        }
        values[n] = f[0] * f[1] * f[2];
        gradients[n] = (df[0] * f[1] * f[2]) * element.grad_lambda[0] + (f[0] * df[1] * f[2]) * element.grad_lambda[1] +
                       (f[0] * f[1] * df[2]) * element.grad_lambda[2];
    }
}

Point Interpolant::gradient(std::size_t e, const ElementMap& map, Point x) const
{
    thread_local std::vector<double> phi;
    thread_local std::vector<Point> dphi;
    lagrange_basis(nodes, map, x, phi, dphi);
    Point g;
    const auto& ids = element_nodes[e];
    for (std::size_t n = 0; n < ids.size(); ++n) {
        g = g + values[ids[n]] * dphi[n];
    }
    return g;
}

double Interpolant::value(std::size_t e, const ElementMap& map, Point x) const
{
    thread_local std::vector<double> phi;
    thread_local std::vector<Point> dphi;
    lagrange_basis(nodes, map, x, phi, dphi);
    double v = 0.0;
    const auto& ids = element_nodes[e];
    for (std::size_t n = 0; n < ids.size(); ++n) {
        v += values[ids[n]] * phi[n];
    }
    return v;
}

Interpolant interpolate(const Mesh& mesh, int p, const Field& f)
{
    Interpolant out;
    out.nodes = LagrangeNodes(p);
    out.elements = mesh.leaves();
    out.element_nodes.reserve(out.elements.size());

    // vertex nodes reuse vertex ids; edge nodes are keyed by (min, max, steps from min)
    std::vector<Index> vertex_node(mesh.vertices().size(), no_index);
    std::map<std::tuple<Index, Index, int>, Index> edge_node;

    auto new_node = [&](Point x) {
        out.node_points.push_back(x);
        out.values.push_back(f.value(x));
        return out.node_points.size() - 1;
    };

    for (Index id : out.elements) {
        const auto& v = mesh.triangle(id).v;
        const TrianglePoints pts = mesh.points(id);
        std::vector<Index> ids;
        ids.reserve(out.nodes.size());
        for (const auto& l : out.nodes.lattice) {
            const int zeros = (l[0] == 0) + (l[1] == 0) + (l[2] == 0);
            if (zeros == 2) {
                const int m = l[0] == p ? 0 : (l[1] == p ? 1 : 2);
                if (vertex_node[v[m]] == no_index) {
                    vertex_node[v[m]] = new_node(pts[m]);
                }
                ids.push_back(vertex_node[v[m]]);
                continue;
            }
            const Point x = (static_cast<double>(l[0]) / p) * pts[0] + (static_cast<double>(l[1]) / p) * pts[1] +
                            (static_cast<double>(l[2]) / p) * pts[2];
            if (zeros == 1) {
                int a = -1;
                int b = -1;
                for (int m = 0; m < 3; ++m) {
                    if (l[m] != 0) {
                        (a < 0 ? a : b) = m;
                    }
                }
                // l[a] steps of weight on v[a]; distance from v[b] in lattice steps is l[a]
                Index lo = v[a];
                Index hi = v[b];
                int steps_from_lo = l[b];
                if (lo > hi) {
                    std::swap(lo, hi);
                    steps_from_lo = l[a];
                }
                const auto key = std::make_tuple(lo, hi, steps_from_lo);
                auto it = edge_node.find(key);
                if (it == edge_node.end()) {
                    it = edge_node.emplace(key, new_node(x)).first;
                }
                ids.push_back(it->second);
                continue;
            }
            ids.push_back(new_node(x));
        }
        out.element_nodes.push_back(std::move(ids));
    }
    return out;
}

} // namespace nvb
