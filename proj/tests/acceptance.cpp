// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <nvb/error_analysis.hpp>
#include <nvb/kellogg.hpp>
#include <nvb/lagrange.hpp>
#include <nvb/presets.hpp>
#include <nvb/quadrature.hpp>
#include <nvb/singular.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

using namespace nvb;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome
{
    bool passed = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o)
{
    std::printf("[%s] criterion %d: %s -- %s\n", o.passed ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += o.passed ? 0 : 1;
}

Outcome guarded(const std::function<Outcome()>& body)
{
    try {
        return body();
    } catch (const std::exception& e) {
        return {false, std::string("exception: ") + e.what()};
    }
}

std::string format(const char* fmt, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double spread(const std::vector<double>& v)
{
    return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
}

const std::vector<double> sweep_deltas{0.4, 0.2, 0.1, 0.05, 0.025, 0.0125};

struct SweepRun
{
    SweepResult result;
    double seconds = 0.0;
};

SweepRun run_sweep(int p, RefinementMode mode)
{
    const Mesh initial = initial_mesh(DomainPreset::l_shape);
    const std::vector<SingularTerm> terms{preset_poisson_corner(corner_angle(DomainPreset::l_shape))};
    const FieldPtr u0 = std::make_shared<RegularField>(RegularPreset::sin_cos);
    SweepOptions options;
    options.mode = mode;
    options.negative_control = mode == RefinementMode::graded;
    const auto t0 = std::chrono::steady_clock::now();
    SweepRun run;
    run.result = convergence_sweep(initial, terms, u0, p, sweep_deltas, options);
    run.seconds = seconds_since(t0);
    return run;
}

Outcome decay(const SweepRun& run, double threshold, double limit_seconds)
{
    bool ok = run.result.slope <= threshold && run.seconds < limit_seconds;
    std::size_t flagged = 0;
    for (const SweepRow& r : run.result.rows) {
        ok = ok && r.conforming;
        flagged += r.flagged_elements;
    }
    return {ok, format("slope %.4f (need <= %.2f), #T-#T0 up to %zu, %zu flagged elements, %.1f s (limit %.0f s)",
                       run.result.slope, threshold, run.result.rows.back().cardinality, flagged, run.seconds,
                       limit_seconds)};
}

// ---------------------------------------------------------------- criterion 4

Outcome kellogg_values()
{
    const auto t0 = std::chrono::steady_clock::now();
    const KelloggSolution s = kellogg_solve(0.1);
    const auto res = kellogg_residual(s.gamma, s.R, s.rho, s.sigma);
    const double residual = std::max({std::abs(res[0]), std::abs(res[1]), std::abs(res[2])});
    double seam = 0.0;
    const double eps = 1e-12;
    for (double theta : {pi / 2, pi, 1.5 * pi}) {
        seam = std::max(seam, std::abs(kellogg_mu(theta - eps, s) - kellogg_mu(theta, s)));
    }
    seam = std::max(seam, std::abs(kellogg_mu(0.0, s) - kellogg_mu(2 * pi - eps, s)));
    const double elapsed = seconds_since(t0);
    const bool ok = std::abs(s.R - 161.4476) < 1e-3 && std::abs(s.sigma + 14.92256) < 1e-4 && residual < 1e-10 &&
                    seam < 1e-9 && elapsed < 1.0 && kellogg_constraints_hold(s.gamma, s.rho, s.sigma);
    return {ok, format("R %.7f, rho %.7f, sigma %.7f, max residual %.2e, seam jump %.2e, %.4f s", s.R, s.rho, s.sigma,
                       residual, seam, elapsed)};
}

// ---------------------------------------------------------------- criterion 7

Outcome mesh_kernel()
{
    std::mt19937 rng(2024);
    const DomainPreset presets[] = {DomainPreset::square, DomainPreset::l_shape, DomainPreset::slit};
    constexpr int rounds = 10000;
    constexpr std::size_t episode_cap = 2500;

    int round = 0;
    int episodes = 0;
    double worst_area = 0.0;
    double min_margin = INFINITY;
    while (round < rounds) {
        const DomainPreset preset = presets[episodes % 3];
        Mesh m = initial_mesh(preset);
        const double floor_angle = descendant_min_angle(m, 2);
        std::size_t bisections = 0;
        ++episodes;
        while (round < rounds && m.leaf_count() < episode_cap) {
            ++round;
            const auto leaves = m.leaves();
            std::uniform_int_distribution<std::size_t> pick(0, leaves.size() - 1);
            std::uniform_int_distribution<int> how_many(1, 4);
            MarkSet marks;
            for (int k = how_many(rng); k > 0; --k) {
                const Index id = leaves[pick(rng)];
                if (std::find(marks.begin(), marks.end(), id) == marks.end()) {
                    marks.push_back(id);
                }
            }
            const std::size_t before = m.leaf_count();
            const std::size_t marked = m.refine(marks);
            const std::size_t after_refine = m.leaf_count();
            const std::size_t completed = m.complete();
            bisections += marked + completed;

            if (marked != marks.size() || after_refine != before + marked ||
                m.leaf_count() != after_refine + completed || m.leaf_count() != m.initial_count() + bisections) {
                return {false, format("cardinality identity broken in round %d", round)};
            }
            if (!m.is_conforming()) {
                return {false, format("non-conforming mesh after completion in round %d", round)};
            }
            const double area_error = std::abs(m.leaf_area_sum() - m.domain_area()) / m.domain_area();
            worst_area = std::max(worst_area, area_error);
            if (area_error > 1e-12) {
                return {false, format("area drift %.2e in round %d", area_error, round)};
            }
            const double margin = m.min_angle() - floor_angle;
            min_margin = std::min(min_margin, margin);
            if (margin < -1e-12) {
                return {false, format("min angle below the similarity-class floor in round %d", round)};
            }
        }
    }
    return {true, format("%d rounds over %d episodes; worst relative area drift %.1e; min angle margin %.2e rad", round,
                         episodes, worst_area, min_margin)};
}

// ---------------------------------------------------------------- criterion 8

constexpr double gl6_x[6] = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                             0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
constexpr double gl6_w[6] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                             0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

// tabulated 6x6 collapsed Gauss rule (degree 10), independent of the library rules
template <class F>
double oracle_rule(const TrianglePoints& t, F f)
{
    const double jac = 2.0 * area(t);
    double sum = 0.0;
    for (int i = 0; i < 6; ++i) {
        const double u = 0.5 * (gl6_x[i] + 1.0);
        for (int j = 0; j < 6; ++j) {
            const double v = 0.5 * (gl6_x[j] + 1.0) * (1.0 - u);
            sum += 0.25 * gl6_w[i] * gl6_w[j] * (1.0 - u) * jac * f(t[0] + u * (t[1] - t[0]) + v * (t[2] - t[0]));
        }
    }
    return sum;
}

// 64 congruent pieces (three red levels)
double oracle_element(const TrianglePoints& t, const std::function<double(Point)>& f)
{
    std::vector<TrianglePoints> pieces{t};
    for (int level = 0; level < 3; ++level) {
        std::vector<TrianglePoints> next;
        for (const auto& s : pieces) {
            for (const auto& c : red_split(s)) {
                next.push_back(c);
            }
        }
        pieces = std::move(next);
    }
    double sum = 0.0;
    for (const auto& s : pieces) {
        sum += oracle_rule(s, f);
    }
    return sum;
}

Outcome quadrature_oracle()
{
    double worst = 0.0;
    std::size_t compared = 0;
    for (int p : {1, 2}) {
        for (RegularPreset preset : {RegularPreset::sin_cos, RegularPreset::sin_pi}) {
            Mesh m = initial_mesh(DomainPreset::square);
            for (int i = 0; i < 5; ++i) {
                m.refine({m.leaves().back(), m.leaves().front()});
                m.complete();
            }
            const RegularField f(preset);
            const ErrorReport report = h1_error(m, p, f);
            const Interpolant I = interpolate(m, p, f);
            for (std::size_t e = 0; e < report.elements.size(); ++e) {
                const TrianglePoints t = m.points(report.elements[e]);
                const ElementMap map(t);
                const double oracle = oracle_element(t, [&](Point x) {
                    const Point d = f.gradient(x) - I.gradient(e, map, x);
                    return dot(d, d);
                });
                worst = std::max(worst, std::abs(report.element_error_sq[e] - oracle) / oracle);
                ++compared;
            }
        }
    }

    // inscribed 4096-triangle fan of the 3pi/2 sector
    const double omega = 1.5 * pi;
    const int n = 4096;
    std::vector<Point> vertices{{0.0, 0.0}};
    for (int i = 0; i <= n; ++i) {
        vertices.push_back({std::cos(omega * i / n), std::sin(omega * i / n)});
    }
    std::vector<std::array<Index, 3>> triangles;
    for (int i = 0; i < n; ++i) {
        triangles.push_back({Index(i + 1), Index(i + 2), 0});
    }
    const Mesh fan = Mesh::from_initial(std::move(vertices), triangles);
    const ErrorReport sector = h1_seminorm(fan, preset_poisson_corner(omega));
    const double closed_form = (2.0 / 3.0) * omega / 2.0;
    const double sector_error = std::abs(sector.total_sq - closed_form) / closed_form;

    const bool ok = worst < 1e-6 && sector_error < 1e-6 && sector.flagged.empty();
    return {ok, format("%zu elements, worst relative deviation from the 64-piece oracle %.2e; sector |u|^2 = %.10f vs "
                       "pi/2 (relative %.2e)",
                       compared, worst, sector.total_sq, sector_error)};
}

// ---------------------------------------------------------------- criterion 9

Outcome gradient_checks()
{
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    double worst = 0.0;
    int checked = 0;
    for (int k : {0, 1}) {
        for (const Cutoff& cutoff : {Cutoff{}, Cutoff::smooth_radial(0.25, 0.85, 3)}) {
            const SingularTerm u(0.8, k, 2.0 / 3.0, {0.05, 0.1}, AngularFunction::poisson_corner(1.5 * pi), cutoff);
            int here = 0;
            while (here < 100) {
                const Point x{coord(rng), coord(rng)};
                const double r = norm(x - u.center());
                const double theta = u.angle(x);
                // g has kinks at theta = 0 and 3pi/2; the stencil must not straddle them
                const double to_kink = std::min({theta, 2 * pi - theta, std::abs(theta - 1.5 * pi)});
                if (r <= 1e-2 || r * to_kink < 1e-5) {
                    continue;
                }
                const double h = 1e-6;
                const Point fd{(u.value({x.x + h, x.y}) - u.value({x.x - h, x.y})) / (2 * h),
                               (u.value({x.x, x.y + h}) - u.value({x.x, x.y - h})) / (2 * h)};
                const Point g = u.gradient(x);
                const double scale = std::max(norm(g), 1e-2);
                worst = std::max(worst, norm(g - fd) / scale);
                ++here;
                ++checked;
            }
        }
    }
    return {worst < 1e-6, format("%d points over k in {0,1} and both cutoff kinds, worst relative error %.2e", checked,
                                 worst)};
}

} // namespace

int main()
{
    std::printf("acceptance suite\n");

    SweepRun graded_p1;
    report(1, "optimal decay p=1", guarded([&] {
               graded_p1 = run_sweep(1, RefinementMode::graded);
               return decay(graded_p1, -0.45, 60.0);
           }));

    SweepRun graded_p2;
    report(2, "optimal decay p=2", guarded([&] {
               graded_p2 = run_sweep(2, RefinementMode::graded);
               return decay(graded_p2, -0.90, 300.0);
           }));

    report(3, "uniform baseline", guarded([&] {
               const SweepRun uniform = run_sweep(1, RefinementMode::uniform);
               const bool ok = uniform.result.slope >= -0.40 && !graded_p1.result.rows.empty() &&
                               uniform.result.slope > graded_p1.result.slope;
               return Outcome{ok, format("uniform slope %.4f (need >= -0.40) vs graded %.4f", uniform.result.slope,
                                         graded_p1.result.slope)};
           }));

    report(4, "Kellogg values", guarded(kellogg_values));

    report(5, "size lemma and negative control", guarded([&] {
               std::size_t violations = 0;
               std::size_t weakest = SIZE_MAX;
               std::size_t meshes = 0;
               for (const SweepRun* run : {&graded_p1, &graded_p2}) {
                   for (const SweepRow& r : run->result.rows) {
                       violations += r.size_violations;
                       weakest = std::min(weakest, r.mutated_violations);
                       ++meshes;
                   }
               }
               const bool ok = meshes == 2 * sweep_deltas.size() && violations == 0 && weakest >= 1;
               return Outcome{ok, format("%zu graded meshes, %zu violations; mutated grading gives >= %zu violations "
                                         "on every mesh",
                                         meshes, violations, weakest == SIZE_MAX ? 0 : weakest)};
           }));

    report(6, "complexity boundedness", guarded([&] {
               std::vector<double> complexity;
               std::vector<double> bdd;
               for (const SweepRow& r : graded_p1.result.rows) {
                   complexity.push_back(r.complexity_constant);
                   bdd.push_back(r.bdd_constant);
               }
               if (complexity.empty()) {
                   return Outcome{false, "criterion 1 sweep unavailable"};
               }
               const bool ok = spread(complexity) < 4.0 && spread(bdd) < 3.0;
               return Outcome{ok, format("(#T-#T0) delta^2 in [%.3f, %.3f] (ratio %.2f < 4); completion ratio in "
                                         "[%.4f, %.4f] (ratio %.2f < 3)",
                                         *std::min_element(complexity.begin(), complexity.end()),
                                         *std::max_element(complexity.begin(), complexity.end()), spread(complexity),
                                         *std::min_element(bdd.begin(), bdd.end()),
                                         *std::max_element(bdd.begin(), bdd.end()), spread(bdd))};
           }));

    report(7, "mesh kernel properties", guarded(mesh_kernel));
    report(8, "quadrature oracle", guarded(quadrature_oracle));
    report(9, "gradient checks", guarded(gradient_checks));

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
