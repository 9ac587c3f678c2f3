#include <doctest.h>

#include <nvb/error_analysis.hpp>
#include <nvb/lagrange.hpp>
#include <nvb/presets.hpp>
#include <nvb/quadrature.hpp>
#include <nvb/singular.hpp>

#include <cmath>
#include <numbers>

using namespace nvb;

namespace {

constexpr double pi = std::numbers::pi;

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// 6-point Gauss-Legendre on [-1, 1], tabulated
constexpr double gl6_x[6] = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                             0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
constexpr double gl6_w[6] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                             0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

// degree-10 collapsed rule on t, written independently of the library
template <class F>
double oracle_rule(const TrianglePoints& t, F f)
{
    const double jac = 2.0 * area(t);
    double sum = 0.0;
    for (int i = 0; i < 6; ++i) {
        const double u = 0.5 * (gl6_x[i] + 1.0);
        for (int j = 0; j < 6; ++j) {
            const double v = 0.5 * (gl6_x[j] + 1.0) * (1.0 - u);
            const double w = 0.25 * gl6_w[i] * gl6_w[j] * (1.0 - u);
            const Point x = t[0] + u * (t[1] - t[0]) + v * (t[2] - t[0]);
            sum += w * jac * f(x);
        }
    }
    return sum;
}

std::vector<TrianglePoints> subdivide(const TrianglePoints& t, int levels)
{
    std::vector<TrianglePoints> out{t};
    for (int l = 0; l < levels; ++l) {
        std::vector<TrianglePoints> next;
        for (const auto& s : out) {
            for (const auto& c : red_split(s)) {
                next.push_back(c);
            }
        }
        out = std::move(next);
    }
    return out;
}

// gradient of the P1 interpolant from vertex values (2x2 solve)
Point p1_gradient(const TrianglePoints& t, const Field& f)
{
    const Point e1 = t[1] - t[0];
    const Point e2 = t[2] - t[0];
    const double d1 = f.value(t[1]) - f.value(t[0]);
    const double d2 = f.value(t[2]) - f.value(t[0]);
    const double det = e1.x * e2.y - e1.y * e2.x;
    return {(d1 * e2.y - d2 * e1.y) / det, (e1.x * d2 - e2.x * d1) / det};
}

Mesh sector_fan(double omega, int n)
{
    std::vector<Point> vertices{{0.0, 0.0}};
    for (int i = 0; i <= n; ++i) {
        const double phi = omega * i / n;
        vertices.push_back({std::cos(phi), std::sin(phi)});
    }
    std::vector<std::array<Index, 3>> triangles;
    for (int i = 0; i < n; ++i) {
        triangles.push_back({Index(i + 1), Index(i + 2), 0});
    }
    return Mesh::from_initial(std::move(vertices), triangles);
}

class Constant final : public Field
{
public:
    double value(Point) const override { return 2.5; }
    Point gradient(Point) const override { return {0.0, 0.0}; }
};

} // namespace

TEST_CASE("triangle rules integrate monomials exactly")
{
    for (int degree = 1; degree <= 14; ++degree) {
        const QuadratureRule& rule = triangle_rule(degree);
        CHECK(rule.degree >= degree);
        for (int a = 0; a <= degree; ++a) {
            for (int b = 0; a + b <= degree; ++b) {
                double sum = 0.0;
                for (std::size_t q = 0; q < rule.points.size(); ++q) {
                    sum += rule.weights[q] * std::pow(rule.points[q].x, a) * std::pow(rule.points[q].y, b);
                }
                const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                CHECK(std::abs(sum - exact) < 1e-13);
            }
        }
    }
}

TEST_CASE("Lagrange interpolation reproduces polynomials")
{
    Mesh m = initial_mesh(DomainPreset::l_shape);
    m.refine(m.leaves());
    m.complete();
    m.refine({m.leaves().front()});
    m.complete();

    const RegularField linear(RegularPreset::x_plus_y);
    const RegularField square(RegularPreset::x_squared);
    CHECK(h1_error(m, 1, linear).total() <= 1e-12 * h1_seminorm(m, linear).total());
    CHECK(h1_error(m, 2, square).total() <= 1e-12 * h1_seminorm(m, square).total());
    CHECK(h1_error(m, 1, square).total() > 1e-3);

    // values agree on shared edges
    const RegularField smooth(RegularPreset::sin_cos);
    for (int p : {2, 3}) {
        const Interpolant I = interpolate(m, p, smooth);
        for (std::size_t e = 0; e < I.elements.size(); ++e) {
            const Triangle& t = m.triangle(I.elements[e]);
            for (int k = 0; k < 3; ++k) {
                const Index a = t.v[k];
                const Index b = t.v[(k + 1) % 3];
                for (Index other : m.leaves_on_edge(a, b)) {
                    if (other == I.elements[e]) {
                        continue;
                    }
                    const auto pos = std::lower_bound(I.elements.begin(), I.elements.end(), other) - I.elements.begin();
                    const Point x = 0.3 * m.vertices()[a] + 0.7 * m.vertices()[b];
                    const ElementMap here(m.points(I.elements[e]));
                    const ElementMap there(m.points(other));
                    CHECK(I.value(e, here, x) == doctest::Approx(I.value(std::size_t(pos), there, x)).epsilon(1e-13));
                }
            }
        }
    }
}

TEST_CASE("element errors match the subdivision oracle")
{
    Mesh m = initial_mesh(DomainPreset::square);
    for (int i = 0; i < 4; ++i) {
        m.refine({m.leaves().back()});
        m.complete();
    }
    const RegularField f(RegularPreset::sin_cos);
    const ErrorReport report = h1_error(m, 1, f);
    double total = 0.0;
    for (std::size_t e = 0; e < report.elements.size(); ++e) {
        const TrianglePoints t = m.points(report.elements[e]);
        const Point gi = p1_gradient(t, f);
        double oracle = 0.0;
        for (const auto& piece : subdivide(t, 3)) {
            oracle += oracle_rule(piece, [&](Point x) {
                const Point d = f.gradient(x) - gi;
                return dot(d, d);
            });
        }
        CHECK(report.element_error_sq[e] == doctest::Approx(oracle).epsilon(1e-6));
        total += report.element_error_sq[e];
    }
    CHECK(report.total_sq == total);
}

TEST_CASE("sector seminorm reproduces the closed form")
{
    const double omega = 1.5 * pi;
    const double gamma = 2.0 / 3.0;
    const SingularTerm u = preset_poisson_corner(omega);
    const int n = 4096;
    const ErrorReport r = h1_seminorm(sector_fan(omega, n), u);
    CHECK(r.flagged.empty());

    // inscribed polygon: n * gamma/2 * cos(a)^{2 gamma} * int_{-a}^{a} cos(psi)^{-2 gamma} dpsi
    const double a = omega / (2.0 * n);
    const LineRule line = gauss_legendre(20);
    double integral = 0.0;
    for (std::size_t q = 0; q < line.points.size(); ++q) {
        const double psi = -a + 2 * a * line.points[q];
        integral += 2 * a * line.weights[q] * std::pow(std::cos(psi), -2 * gamma);
    }
    const double polygon = n * 0.5 * gamma * std::pow(std::cos(a), 2 * gamma) * integral;
    CHECK(r.total_sq == doctest::Approx(polygon).epsilon(1e-9));
    CHECK(std::abs(r.total_sq - pi / 2) < 1e-6 * pi / 2);
}

TEST_CASE("singular quadrature on coarse elements")
{
    // one apex element: compare with the polygon formula for a single wide triangle
    const SingularTerm u = preset_poisson_corner(1.5 * pi);
    const double gamma = 2.0 / 3.0;
    const Mesh fan = sector_fan(1.5 * pi, 3);
    const ErrorReport r = h1_seminorm(fan, u);
    const double a = 1.5 * pi / 6.0;
    const LineRule line = gauss_legendre(40);
    double integral = 0.0;
    for (std::size_t q = 0; q < line.points.size(); ++q) {
        const double psi = -a + 2 * a * line.points[q];
        integral += 2 * a * line.weights[q] * std::pow(std::cos(psi), -2 * gamma);
    }
    CHECK(r.total_sq == doctest::Approx(3 * 0.5 * gamma * std::pow(std::cos(a), 2 * gamma) * integral).epsilon(1e-7));

    // singular point in the middle of an edge and inside an element
    const TrianglePoints t{Point{-1, -1}, Point{1, -1}, Point{0, 1}};
    bool converged = true;
    const SingularTerm centered(1.0, 0, 0.5, {0.0, 0.0}, AngularFunction({{0, 2 * pi, 0.0, 0.0, 0.0, 1.0}}));
    const Point c[1] = {centered.center()};
    const double inside = integrate_element(
        t, [&](Point x) { return dot(centered.gradient(x), centered.gradient(x)); }, c, 10, {}, converged);
    CHECK(converged);
    // |grad r^{1/2}|^2 = 1/(4r); in polar form about the origin the integral is
    // sum over edges of (1/4) * int dphi R(phi), with R the distance to the edge
    // along direction phi: R = h / cos(phi - phi_n) for an edge at distance h
    double polar = 0.0;
    const LineRule fine = gauss_legendre(60);
    for (int i = 0; i < 3; ++i) {
        const Point a0 = t[i];
        const Point b0 = t[(i + 1) % 3];
        const double phi_a = std::atan2(a0.y, a0.x);
        double phi_b = std::atan2(b0.y, b0.x);
        while (phi_b < phi_a) {
            phi_b += 2 * pi;
        }
        const Point dir = b0 - a0;
        const Point normal{dir.y / norm(dir), -dir.x / norm(dir)};
        const double h = std::abs(dot(normal, a0));
        const double phi_n = std::atan2(dot(normal, a0) > 0 ? normal.y : -normal.y, dot(normal, a0) > 0 ? normal.x : -normal.x);
        for (std::size_t q = 0; q < fine.points.size(); ++q) {
            const double phi = phi_a + (phi_b - phi_a) * fine.points[q];
            polar += (phi_b - phi_a) * fine.weights[q] * 0.25 * h / std::cos(phi - phi_n);
        }
    }
    CHECK(inside == doctest::Approx(polar).epsilon(1e-7));

    // same point on an edge
    const TrianglePoints on_edge{Point{-1, 0}, Point{1, 0}, Point{0, 1}};
    converged = true;
    const double edge_value = integrate_element(
        on_edge, [&](Point x) { return dot(centered.gradient(x), centered.gradient(x)); }, c, 10, {}, converged);
    CHECK(converged);
    // two right-angled pieces; each edge seen from the origin at distance 1/sqrt(2)
    const double expected_edge = 2 * 0.25 * std::sqrt(0.5) * 2 * std::atanh(std::tan(pi / 8)) * 2;
    CHECK(edge_value == doctest::Approx(expected_edge).epsilon(1e-7));
}

TEST_CASE("ring decomposition")
{
    Mesh m = initial_mesh(DomainPreset::l_shape);
    auto terms = std::vector<SingularTerm>{preset_poisson_corner(1.5 * pi)};
    const GradingParams params = make_grading_params(m, 0.2, 1, terms);
    grade(m, params);
    const RingAssignment rings = ring_decomposition(m, {0, 0}, params.K, 2);
    CHECK(rings.ring.size() == m.leaf_count());
    CHECK(rings.ring_count == 2 * (params.K + 1) + 1);

    std::vector<std::size_t> counts(rings.ring_count, 0);
    const auto leaves = m.leaves();
    const Point c[1] = {{0, 0}};
    std::vector<std::pair<double, int>> by_distance;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        ++counts[rings.ring[i]];
        const double dist = element_distance(m, leaves[i], c);
        by_distance.push_back({dist, rings.ring[i]});
        if (dist == 0.0) {
            CHECK(rings.ring[i] == 2 * (params.K + 1));
        }
        if (dist > 0.5 && dist <= std::sqrt(0.5)) {
            CHECK(rings.ring[i] == 1);
        }
    }
    std::size_t total = 0;
    for (std::size_t n : counts) {
        total += n;
    }
    CHECK(total == m.leaf_count());
    std::sort(by_distance.begin(), by_distance.end());
    for (std::size_t i = 1; i < by_distance.size(); ++i) {
        CHECK(by_distance[i].second <= by_distance[i - 1].second);
    }
}

TEST_CASE("equidistribution: graded meshes balance element errors")
{
    const SingularTerm u = preset_poisson_corner(1.5 * pi);
    std::vector<SingularTerm> terms{u};

    Mesh graded = initial_mesh(DomainPreset::l_shape);
    const GradingParams gp = make_grading_params(graded, 0.05, 1, terms);
    grade(graded, gp);
    ErrorReport rg = h1_error(graded, 1, u);
    attach_rings(rg, ring_decomposition(graded, {0, 0}, gp.K, 2));
    const EquidistributionStats sg = equidistribution_stats(rg);

    // uniform mesh of comparable cardinality
    Mesh uniform = initial_mesh(DomainPreset::l_shape);
    while (uniform.leaf_count() < graded.leaf_count()) {
        uniform.refine(uniform.leaves());
        uniform.complete();
    }
    ErrorReport ru = h1_error(uniform, 1, u);
    attach_rings(ru, ring_decomposition(uniform, {0, 0}, gp.K, 2));
    const EquidistributionStats su = equidistribution_stats(ru);

    CHECK(su.spread > 100.0);
    CHECK(sg.spread * 10.0 <= su.spread);
    const RingStats* inner = nullptr;
    for (const RingStats& s : su.rings) {
        if (s.count > 0) {
            inner = &s;
        }
    }
    REQUIRE(inner != nullptr);
    CHECK(inner->mean > 10.0 * su.rings.front().mean);

    const Constant constant;
    ErrorReport rc = h1_error(graded, 1, constant);
    attach_rings(rc, ring_decomposition(graded, {0, 0}, gp.K, 2));
    const EquidistributionStats zero = equidistribution_stats(rc);
    CHECK(zero.max_error == 0.0);
    for (const RingStats& s : zero.rings) {
        CHECK(s.sum == 0.0);
    }
}

TEST_CASE("refining never increases the interpolation error")
{
    const SingularTerm u = preset_poisson_corner(1.5 * pi);
    Mesh m = initial_mesh(DomainPreset::l_shape);
    double previous = h1_error(m, 1, u).total();
    for (int round = 0; round < 6; ++round) {
        const auto leaves = m.leaves();
        MarkSet marks;
        for (std::size_t i = 0; i < leaves.size(); i += 3) {
            marks.push_back(leaves[i]);
        }
        m.refine(marks);
        m.complete();
        const double current = h1_error(m, 1, u).total();
        CHECK(current <= previous * (1 + 1e-8));
        previous = current;
    }
}

TEST_CASE("sweep input validation and slope fit")
{
    const Mesh m = initial_mesh(DomainPreset::l_shape);
    std::vector<SingularTerm> terms{preset_poisson_corner(1.5 * pi)};
    const std::vector<double> three{0.4, 0.2, 0.1};
    CHECK_THROWS_AS(convergence_sweep(m, terms, nullptr, 1, three), std::invalid_argument);
    const std::vector<double> unordered{0.4, 0.1, 0.2, 0.05};
    CHECK_THROWS_AS(convergence_sweep(m, terms, nullptr, 1, unordered), std::invalid_argument);

    const std::vector<double> x{1, 10, 100, 1000};
    const std::vector<double> y{2, 2 / std::sqrt(10.0), 0.2, 2 / std::sqrt(1000.0)};
    CHECK(fit_loglog_slope(x, y) == doctest::Approx(-0.5));
}
