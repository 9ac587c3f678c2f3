#include <nvb/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

namespace nvb {

namespace {

const std::vector<Index> empty_leaf_list;

std::array<EdgeKey, 3> edges_of(const std::array<Index, 3>& v)
{
    return {EdgeKey(v[0], v[1]), EdgeKey(v[1], v[2]), EdgeKey(v[2], v[0])};
}

void validate_initial(const std::vector<Point>& vertices, const std::vector<std::array<Index, 3>>& triangles)
{
    if (triangles.empty()) {
        throw MeshError("initial mesh has no triangles");
    }
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (!std::isfinite(vertices[i].x) || !std::isfinite(vertices[i].y)) {
            throw MeshError("vertex " + std::to_string(i) + " has non-finite coordinates");
        }
    }
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const auto& v = triangles[t];
        for (Index i : v) {
            if (i >= vertices.size()) {
                throw MeshError("triangle " + std::to_string(t) + " references missing vertex " + std::to_string(i));
            }
        }
        if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2]) {
            throw MeshError("triangle " + std::to_string(t) + " repeats a vertex");
        }
        const double a = signed_area({vertices[v[0]], vertices[v[1]], vertices[v[2]]});
        const double scale = std::max({norm(vertices[v[1]] - vertices[v[0]]), norm(vertices[v[2]] - vertices[v[0]]), 1e-300});
        if (std::abs(a) <= 1e-14 * scale * scale) {
            throw MeshError("triangle " + std::to_string(t) + " is degenerate");
        }
    }
}

} // namespace

bool Mesh::flags_compatible(const std::vector<std::array<Index, 3>>& triangles)
{
    std::unordered_map<EdgeKey, std::vector<std::size_t>, EdgeKeyHash> incident;
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        for (const EdgeKey& e : edges_of(triangles[t])) {
            incident[e].push_back(t);
        }
    }
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const EdgeKey ref(triangles[t][0], triangles[t][1]);
        for (std::size_t other : incident[ref]) {
            if (EdgeKey(triangles[other][0], triangles[other][1]) != ref) {
                return false;
            }
        }
    }
    return true;
}

Mesh Mesh::from_initial(std::vector<Point> vertices, const std::vector<std::array<Index, 3>>& triangles)
{
    validate_initial(vertices, triangles);

    Mesh mesh;
    mesh.vertices_ = std::move(vertices);
    mesh.triangles_.reserve(triangles.size());
    for (const auto& v : triangles) {
        Triangle t;
        t.v = v;
        mesh.triangles_.push_back(t);
    }
    for (Index id = 0; id < mesh.triangles_.size(); ++id) {
        mesh.attach_leaf(id);
        mesh.domain_area_ += mesh.area(id);
    }
    mesh.leaf_count_ = mesh.triangles_.size();
    mesh.initial_count_ = mesh.triangles_.size();

    for (const auto& [edge, incident] : mesh.edge_leaves_) {
        if (incident.size() > 2) {
            throw MeshError("edge (" + std::to_string(edge.a) + "," + std::to_string(edge.b) +
                            ") is shared by more than two triangles");
        }
        if (incident.size() == 1) {
            mesh.boundary_.insert(edge);
        }
    }

    // A vertex in the interior of a boundary edge means a hanging node.
    for (const EdgeKey& e : mesh.boundary_) {
        const Point a = mesh.vertices_[e.a];
        const Point b = mesh.vertices_[e.b];
        const double len = norm(b - a);
        for (Index i = 0; i < mesh.vertices_.size(); ++i) {
            if (i == e.a || i == e.b) {
                continue;
            }
            const Point p = mesh.vertices_[i];
            if (point_segment_distance(p, a, b) <= 1e-12 * len && norm(p - a) > 1e-12 * len &&
                norm(p - b) > 1e-12 * len) {
                throw MeshError("vertex " + std::to_string(i) + " hangs on edge (" + std::to_string(e.a) + "," +
                                std::to_string(e.b) + "); initial mesh must be conforming");
            }
        }
    }

    if (!flags_compatible(triangles)) {
        throw MeshError("incompatible refinement-edge flags: an interior refinement edge is not the "
                        "refinement edge of both adjacent triangles");
    }
    return mesh;
}

Mesh Mesh::from_forest(std::vector<Point> vertices, std::vector<Triangle> triangles)
{
    std::vector<std::array<Index, 3>> roots;
    for (const Triangle& t : triangles) {
        if (t.generation < 0) {
            throw MeshError("negative generation");
        }
        if (t.generation == 0) {
            roots.push_back(t.v);
        }
    }
    validate_initial(vertices, roots);
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        for (Index i : triangles[t].v) {
            if (i >= vertices.size()) {
                throw MeshError("triangle " + std::to_string(t) + " references missing vertex " + std::to_string(i));
            }
        }
    }

    Mesh mesh;
    mesh.vertices_ = std::move(vertices);
    mesh.triangles_ = std::move(triangles);

    // (first vertex, second vertex, generation) identifies a child uniquely.
    std::map<std::tuple<Index, Index, int>, Index> by_leading_edge;
    for (Index id = 0; id < mesh.triangles_.size(); ++id) {
        Triangle& t = mesh.triangles_[id];
        t.parent = no_index;
        t.children = {no_index, no_index};
        by_leading_edge[{t.v[0], t.v[1], t.generation}] = id;
    }

    std::vector<Index> dead;
    for (Index id = 0; id < mesh.triangles_.size(); ++id) {
        const Triangle& t = mesh.triangles_[id];
        if (t.generation == 0) {
            mesh.initial_count_ += 1;
            mesh.domain_area_ += mesh.area(id);
        }
        if (t.alive) {
            mesh.leaf_count_ += 1;
        } else {
            dead.push_back(id);
        }
    }
    std::stable_sort(dead.begin(), dead.end(), [&](Index a, Index b) {
        return mesh.triangles_[a].generation < mesh.triangles_[b].generation;
    });

    for (Index id = 0; id < mesh.triangles_.size(); ++id) {
        if (mesh.triangles_[id].alive) {
            mesh.attach_leaf(id);
        }
    }

    // Boundary of the initial mesh.
    {
        std::unordered_map<EdgeKey, int, EdgeKeyHash> counts;
        for (const auto& r : roots) {
            for (const EdgeKey& e : edges_of(r)) {
                counts[e] += 1;
            }
        }
        for (const auto& [e, c] : counts) {
            if (c == 1) {
                mesh.boundary_.insert(e);
            }
        }
    }

    for (Index id : dead) {
        const Triangle t = mesh.triangles_[id];
        const auto first = by_leading_edge.find({t.v[2], t.v[0], t.generation + 1});
        const auto second = by_leading_edge.find({t.v[1], t.v[2], t.generation + 1});
        if (first == by_leading_edge.end() || second == by_leading_edge.end()) {
            throw MeshError("bisected triangle " + std::to_string(id) + " has no matching children");
        }
        const Index m = mesh.triangles_[first->second].v[2];
        if (mesh.triangles_[second->second].v[2] != m) {
            throw MeshError("children of triangle " + std::to_string(id) + " disagree on the midpoint");
        }
        mesh.triangles_[id].children = {first->second, second->second};
        mesh.triangles_[first->second].parent = id;
        mesh.triangles_[second->second].parent = id;
        mesh.midpoints_[EdgeKey(t.v[0], t.v[1])] = m;
        if (mesh.boundary_.contains(EdgeKey(t.v[0], t.v[1]))) {
            mesh.boundary_.insert(EdgeKey(t.v[0], m));
            mesh.boundary_.insert(EdgeKey(m, t.v[1]));
        }
    }
    for (Index id = 0; id < mesh.triangles_.size(); ++id) {
        const Triangle& t = mesh.triangles_[id];
        if (t.generation > 0 && t.parent == no_index) {
            throw MeshError("triangle " + std::to_string(id) + " has generation " + std::to_string(t.generation) +
                            " but no parent");
        }
    }
    return mesh;
}

std::vector<Index> Mesh::leaves() const
{
    std::vector<Index> out;
    out.reserve(leaf_count_);
    for (Index id = 0; id < triangles_.size(); ++id) {
        if (triangles_[id].alive) {
            out.push_back(id);
        }
    }
    return out;
}

TrianglePoints Mesh::points(Index id) const
{
    const auto& v = triangles_.at(id).v;
    return {vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]};
}

double Mesh::element_size(Index id) const { return std::sqrt(area(id)); }

Index Mesh::edge_midpoint(Index a, Index b) const
{
    const auto it = midpoints_.find(EdgeKey(a, b));
    return it == midpoints_.end() ? no_index : it->second;
}

const std::vector<Index>& Mesh::leaves_on_edge(Index a, Index b) const
{
    const auto it = edge_leaves_.find(EdgeKey(a, b));
    return it == edge_leaves_.end() ? empty_leaf_list : it->second;
}

void Mesh::attach_leaf(Index id)
{
    for (const EdgeKey& e : edges_of(triangles_[id].v)) {
        edge_leaves_[e].push_back(id);
    }
}

void Mesh::detach_leaf(Index id)
{
    for (const EdgeKey& e : edges_of(triangles_[id].v)) {
        auto it = edge_leaves_.find(e);
        auto& list = it->second;
        list.erase(std::find(list.begin(), list.end(), id));
        if (list.empty()) {
            edge_leaves_.erase(it);
        }
    }
}

std::pair<Index, Index> Mesh::bisect(Index id)
{
    if (id >= triangles_.size()) {
        throw MeshError("bisect: invalid element id " + std::to_string(id));
    }
    if (!triangles_[id].alive) {
        throw MeshError("bisect: element " + std::to_string(id) + " is not a leaf");
    }
    const Triangle parent = triangles_[id];
    const Index v0 = parent.v[0];
    const Index v1 = parent.v[1];
    const Index v2 = parent.v[2];

    const EdgeKey ref(v0, v1);
    Index m;
    if (const auto it = midpoints_.find(ref); it != midpoints_.end()) {
        m = it->second;
    } else {
        m = vertices_.size();
        vertices_.push_back(midpoint(vertices_[v0], vertices_[v1]));
        midpoints_.emplace(ref, m);
    }
    if (boundary_.contains(ref)) {
        boundary_.insert(EdgeKey(v0, m));
        boundary_.insert(EdgeKey(m, v1));
    }

    detach_leaf(id);

    Triangle first;
    first.v = {v2, v0, m};
    first.generation = parent.generation + 1;
    first.parent = id;
    Triangle second = first;
    second.v = {v1, v2, m};

    const Index c1 = triangles_.size();
    const Index c2 = c1 + 1;
    triangles_.push_back(first);
    triangles_.push_back(second);
    triangles_[id].alive = false;
    triangles_[id].children = {c1, c2};
    attach_leaf(c1);
    attach_leaf(c2);
    leaf_count_ += 1;
    return {c1, c2};
}

std::size_t Mesh::refine(const MarkSet& marks)
{
    std::unordered_set<Index> seen;
    for (Index id : marks) {
        if (!is_leaf(id)) {
            throw MeshError("refine: marked element " + std::to_string(id) + " is not a leaf");
        }
        if (!seen.insert(id).second) {
            throw MeshError("refine: element " + std::to_string(id) + " marked twice");
        }
    }
    for (Index id : marks) {
        bisect(id);
    }
    return marks.size();
}

bool Mesh::has_hanging_edge(Index id) const
{
    for (const EdgeKey& e : edges_of(triangles_[id].v)) {
        if (midpoints_.contains(e)) {
            return true;
        }
    }
    return false;
}

std::size_t Mesh::complete()
{
    std::vector<Index> work;
    for (Index id = 0; id < triangles_.size(); ++id) {
        if (triangles_[id].alive && has_hanging_edge(id)) {
            work.push_back(id);
        }
    }
    const std::size_t cap = 64 * std::max<std::size_t>(leaf_count_, 1);
    std::size_t count = 0;
    while (!work.empty()) {
        const Index id = work.back();
        work.pop_back();
        if (!triangles_[id].alive || !has_hanging_edge(id)) {
            continue;
        }
        if (count >= cap) {
            throw MeshError("complete: no termination after " + std::to_string(cap) +
                            " bisections; refinement-edge flags are not compatible");
        }
        const Index v0 = triangles_[id].v[0];
        const Index v1 = triangles_[id].v[1];
        const auto [c1, c2] = bisect(id);
        ++count;
        work.push_back(c1);
        work.push_back(c2);
        for (Index neighbour : leaves_on_edge(v0, v1)) {
            work.push_back(neighbour);
        }
    }
    return count;
}

bool Mesh::is_conforming() const
{
    for (const auto& [edge, incident] : edge_leaves_) {
        const std::size_t expected = boundary_.contains(edge) ? 1 : 2;
        if (incident.size() != expected) {
            return false;
        }
    }
    return true;
}

bool Mesh::check_flag_compatibility() const
{
    for (Index id = 0; id < triangles_.size(); ++id) {
        const Triangle& t = triangles_[id];
        if (!t.alive) {
            continue;
        }
        const EdgeKey ref(t.v[0], t.v[1]);
        for (Index other : leaves_on_edge(t.v[0], t.v[1])) {
            if (EdgeKey(triangles_[other].v[0], triangles_[other].v[1]) != ref) {
                return false;
            }
        }
    }
    return true;
}

double Mesh::min_angle() const
{
    double best = std::numbers::pi;
    for (Index id = 0; id < triangles_.size(); ++id) {
        if (triangles_[id].alive) {
            best = std::min(best, min_interior_angle(points(id)));
        }
    }
    return best;
}

double Mesh::leaf_area_sum() const
{
    double sum = 0.0;
    for (Index id = 0; id < triangles_.size(); ++id) {
        if (triangles_[id].alive) {
            sum += area(id);
        }
    }
    return sum;
}

namespace {

double descendant_min_angle(const TrianglePoints& t, int depth)
{
    double best = min_interior_angle(t);
    if (depth == 0) {
        return best;
    }
    const Point m = midpoint(t[0], t[1]);
    best = std::min(best, descendant_min_angle({t[2], t[0], m}, depth - 1));
    best = std::min(best, descendant_min_angle({t[1], t[2], m}, depth - 1));
    return best;
}

} // namespace

double descendant_min_angle(const Mesh& mesh, int generations)
{
    double best = std::numbers::pi;
    for (Index id = 0; id < mesh.triangles().size(); ++id) {
        if (mesh.triangle(id).generation == 0) {
            best = std::min(best, descendant_min_angle(mesh.points(id), generations));
        }
    }
    return best;
}

} // namespace nvb
