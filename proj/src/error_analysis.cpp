#include <nvb/error_analysis.hpp>

#include <nvb/singular.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace nvb {

namespace {

double integrate_smooth(const TrianglePoints& t, const PointIntegrand& f, std::span<const Point> singular, int degree,
                        int levels_left)
{
    if (levels_left > 0 && !singular.empty() && min_distance(t, singular) < diameter(t)) {
        double sum = 0.0;
        for (const auto& child : red_split(t)) {
            sum += integrate_smooth(child, f, singular, degree, levels_left - 1);
        }
        return sum;
    }
    const WeightedPoints rule = map_rule(triangle_rule(degree), t);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        sum += rule.weights[q] * f(rule.points[q]);
    }
    return sum;
}

double integrate_apex(const TrianglePoints& t, const PointIntegrand& f, int levels, const QuadratureOptions& options)
{
    const WeightedPoints rule = apex_graded_rule(t, levels, options.radial_points, options.angular_points);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        sum += rule.weights[q] * f(rule.points[q]);
    }
    return sum;
}

/// Splits (apex, a, b) at the midpoint of ab until the apex angle is at most
/// max_angle, so the angular Gauss rule sees a mildly varying integrand.
void split_apex(const TrianglePoints& piece, double max_angle, std::vector<TrianglePoints>& out)
{
    if (interior_angles(piece)[0] <= max_angle) {
        out.push_back(piece);
        return;
    }
    const Point m = midpoint(piece[1], piece[2]);
    split_apex({piece[0], piece[1], m}, max_angle, out);
    split_apex({piece[0], m, piece[2]}, max_angle, out);
}

/// Sub-triangles of t with apex s (degenerate pieces dropped).
std::vector<TrianglePoints> fan_around(const TrianglePoints& t, Point s)
{
    constexpr double max_apex_angle = std::numbers::pi / 6;
    std::vector<TrianglePoints> out;
    const double scale = diameter(t);
    for (int i = 0; i < 3; ++i) {
        if (norm(t[i] - s) <= 1e-14 * scale) {
            split_apex({t[i], t[(i + 1) % 3], t[(i + 2) % 3]}, max_apex_angle, out);
            return out;
        }
    }
    const double whole = area(t);
    for (int i = 0; i < 3; ++i) {
        TrianglePoints piece{s, t[i], t[(i + 1) % 3]};
        if (area(piece) > 1e-14 * whole) {
            split_apex(piece, max_apex_angle, out);
        }
    }
    return out;
}

double integrate_singular(const TrianglePoints& t, const PointIntegrand& f, Point s, const QuadratureOptions& options,
                          bool& converged)
{
    double total = 0.0;
    for (const TrianglePoints& piece : fan_around(t, s)) {
        int levels = std::min(options.initial_levels, options.max_levels);
        double previous = integrate_apex(piece, f, levels, options);
        bool settled = false;
        while (levels < options.max_levels) {
            levels = std::min(2 * levels, options.max_levels);
            const double current = integrate_apex(piece, f, levels, options);
            const bool close = std::abs(current - previous) <= options.relative_tolerance * std::abs(current);
            previous = current;
            if (close) {
                settled = true;
                break;
            }
        }
        if (!settled && previous != 0.0) {
            converged = false;
        }
        total += previous;
    }
    return total;
}

double integrate_recursive(const TrianglePoints& t, const PointIntegrand& f, std::span<const Point> singular, int degree,
                           const QuadratureOptions& options, bool& converged, int depth)
{
    std::vector<Point> inside;
    for (const Point& s : singular) {
        if (contains(t, s, 1e-12)) {
            inside.push_back(s);
        }
    }
    if (inside.empty()) {
        return integrate_smooth(t, f, singular, degree, options.near_levels);
    }
    if (inside.size() == 1) {
        return integrate_singular(t, f, inside.front(), options, converged);
    }
    if (depth >= 12) {
        converged = false;
        return integrate_smooth(t, f, {}, degree, 0);
    }
    double sum = 0.0;
    for (const auto& child : red_split(t)) {
        sum += integrate_recursive(child, f, singular, degree, options, converged, depth + 1);
    }
    return sum;
}

ErrorReport empty_report(const Mesh& mesh, int p)
{
    ErrorReport report;
    report.p = p;
    report.elements = mesh.leaves();
    report.leaf_count = mesh.leaf_count();
    report.added = mesh.leaf_count() - mesh.initial_count();
    report.element_error_sq.resize(report.elements.size());
    return report;
}

} // namespace

double integrate_element(const TrianglePoints& t, const PointIntegrand& integrand, std::span<const Point> singular,
                         int degree, const QuadratureOptions& options, bool& converged)
{
    return integrate_recursive(t, integrand, singular, degree, options, converged, 0);
}

ErrorReport h1_error(const Mesh& mesh, int p, const Field& u, const QuadratureOptions& options)
{
    if (!mesh.is_conforming()) {
        throw MeshError("h1_error requires a conforming mesh");
    }
    ErrorReport report = empty_report(mesh, p);
    const Interpolant interpolant = interpolate(mesh, p, u);
    const std::vector<Point> singular = u.singular_points();
    const int degree = options.degree_for(p);
    for (std::size_t e = 0; e < report.elements.size(); ++e) {
        const TrianglePoints t = mesh.points(report.elements[e]);
        const ElementMap map(t);
        const PointIntegrand integrand = [&](Point x) {
            const Point diff = u.gradient(x) - interpolant.gradient(e, map, x);
            return dot(diff, diff);
        };
        bool converged = true;
        report.element_error_sq[e] = integrate_element(t, integrand, singular, degree, options, converged);
        if (!converged) {
            report.flagged.push_back(report.elements[e]);
        }
        report.total_sq += report.element_error_sq[e];
    }
    return report;
}

ErrorReport h1_seminorm(const Mesh& mesh, const Field& u, const QuadratureOptions& options)
{
    ErrorReport report = empty_report(mesh, 0);
    const std::vector<Point> singular = u.singular_points();
    const int degree = options.degree_for(1);
    const PointIntegrand integrand = [&](Point x) {
        const Point g = u.gradient(x);
        return dot(g, g);
    };
    for (std::size_t e = 0; e < report.elements.size(); ++e) {
        bool converged = true;
        report.element_error_sq[e] =
            integrate_element(mesh.points(report.elements[e]), integrand, singular, degree, options, converged);
        if (!converged) {
            report.flagged.push_back(report.elements[e]);
        }
        report.total_sq += report.element_error_sq[e];
    }
    return report;
}

RingAssignment ring_decomposition(const Mesh& mesh, Point center, int K, int d)
{
    RingAssignment out;
    const int innermost = d * (K + 1);
    out.ring_count = innermost + 1;
    const Point c[1] = {center};
    const double inner_radius = std::exp2(-(K + 1.0));
    for (Index id : mesh.leaves()) {
        const double dist = element_distance(mesh, id, c);
        int ring = 0;
        if (dist <= inner_radius) {
            ring = innermost;
        } else if (dist <= std::exp2(-1.0 / d)) {
            ring = std::clamp(static_cast<int>(std::floor(-d * std::log2(dist))), 0, innermost - 1);
            // settle floating-point edge cases against the defining inequalities
            while (ring + 1 < innermost && dist <= std::exp2(-(ring + 1.0) / d)) {
                ++ring;
            }
            while (ring > 0 && dist > std::exp2(-static_cast<double>(ring) / d)) {
                --ring;
            }
        }
        out.ring.push_back(ring);
    }
    return out;
}

void attach_rings(ErrorReport& report, const RingAssignment& rings)
{
    if (rings.ring.size() != report.elements.size()) {
        throw std::invalid_argument("ring assignment does not match the report's elements");
    }
    report.ring = rings.ring;
    report.ring_sums.assign(static_cast<std::size_t>(rings.ring_count), 0.0);
    for (std::size_t e = 0; e < report.elements.size(); ++e) {
        report.ring_sums[static_cast<std::size_t>(report.ring[e])] += report.element_error_sq[e];
    }
}

EquidistributionStats equidistribution_stats(const ErrorReport& report)
{
    EquidistributionStats stats;
    std::vector<double> errors(report.element_error_sq.size());
    for (std::size_t e = 0; e < errors.size(); ++e) {
        errors[e] = std::sqrt(std::max(report.element_error_sq[e], 0.0));
    }
    if (!report.ring.empty()) {
        stats.rings.resize(report.ring_sums.size());
        for (std::size_t r = 0; r < stats.rings.size(); ++r) {
            stats.rings[r].ring = static_cast<int>(r);
        }
        for (std::size_t e = 0; e < errors.size(); ++e) {
            RingStats& s = stats.rings[static_cast<std::size_t>(report.ring[e])];
            s.count += 1;
            s.sum += report.element_error_sq[e];
            s.max = std::max(s.max, errors[e]);
            s.mean += errors[e];
        }
        for (RingStats& s : stats.rings) {
            s.mean = s.count > 0 ? s.mean / static_cast<double>(s.count) : 0.0;
        }
    }
    if (!errors.empty()) {
        stats.max_error = *std::max_element(errors.begin(), errors.end());
        std::vector<double> sorted = errors;
        const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
        std::nth_element(sorted.begin(), mid, sorted.end());
        stats.median_error = *mid;
        if (sorted.size() % 2 == 0) {
            const double lower = *std::max_element(sorted.begin(), mid);
            stats.median_error = 0.5 * (stats.median_error + lower);
        }
    }
    if (stats.median_error > 0.0) {
        stats.spread = stats.max_error / stats.median_error;
    } else {
        stats.spread = stats.max_error > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return stats;
}

void write_ring_stats_csv(std::ostream& out, const EquidistributionStats& stats)
{
    out << "ring,count,sum,max,mean\n";
    char line[160];
    for (const RingStats& s : stats.rings) {
        std::snprintf(line, sizeof line, "%d,%zu,%.17g,%.17g,%.17g\n", s.ring, s.count, s.sum, s.max, s.mean);
        out << line;
    }
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    return denom == 0.0 ? std::numeric_limits<double>::quiet_NaN() : (n * sxy - sx * sy) / denom;
}

SweepResult convergence_sweep(const Mesh& initial, std::span<const SingularTerm> terms, const FieldPtr& u0, int p,
                              std::span<const double> deltas, const SweepOptions& options)
{
    if (deltas.size() < 4) {
        throw std::invalid_argument("convergence sweep needs at least four delta values");
    }
    for (std::size_t i = 1; i < deltas.size(); ++i) {
        if (!(deltas[i] < deltas[i - 1])) {
            throw std::invalid_argument("delta values must be strictly decreasing");
        }
    }

    FieldSum singular_part;
    for (const SingularTerm& t : terms) {
        singular_part.add(std::make_shared<SingularTerm>(t));
    }
    FieldSum total = singular_part;
    if (u0) {
        total.add(u0);
    }

    SweepResult result;
    std::vector<double> cards;
    std::vector<double> errors;
    for (double delta : deltas) {
        Mesh mesh = initial;
        const GradingParams params = make_grading_params(mesh, delta, p, terms, options.gamma_rule);
        const ComplexityLedger ledger =
            options.mode == RefinementMode::graded ? grade(mesh, params) : grade_uniform(mesh, params);

        SweepRow row;
        row.delta = delta;
        row.K = params.K;
        row.leaves = mesh.leaf_count();
        row.cardinality = mesh.leaf_count() - mesh.initial_count();
        row.conforming = mesh.is_conforming();

        ErrorReport all = h1_error(mesh, p, total, options.quadrature);
        all.delta = delta;
        row.error_total = all.total();
        row.flagged_elements = all.flagged.size();
        if (options.on_run) {
            options.on_run(mesh, params, all);
        }
        if (u0) {
            row.error_regular = h1_error(mesh, p, *u0, options.quadrature).total();
        }
        if (!terms.empty()) {
            row.error_singular = h1_error(mesh, p, singular_part, options.quadrature).total();
        }

        if (options.mode == RefinementMode::graded) {
            row.size_violations = verify_size_lemma(mesh, params).violations.size();
            if (options.negative_control) {
                Mesh mutated = initial;
                GradingParams weakened = params;
                weakened.threshold_exponent_scale = options.mutation_scale;
                grade(mutated, weakened);
                row.mutated_violations = verify_size_lemma(mutated, params).violations.size();
            }
        }
        const MarkedBoundReport marked = verify_marked_bound(ledger, params);
        row.complexity_constant = marked.complexity_constant;
        row.marked_constant = marked.max_constant;
        row.bdd_constant = bdd_ledger_check(ledger).constant;

        cards.push_back(static_cast<double>(row.cardinality));
        errors.push_back(row.error_total);
        if (cards.size() >= options.skip_coarsest + 2) {
            row.slope_running = fit_loglog_slope(std::span(cards).subspan(options.skip_coarsest),
                                                 std::span(errors).subspan(options.skip_coarsest));
        }
        result.rows.push_back(row);
    }
    result.slope = result.rows.back().slope_running;
    return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result)
{
    out << "delta,cardinality,error_total,error_regular,error_singular,slope_running\n";
    char line[256];
    for (const SweepRow& r : result.rows) {
        std::snprintf(line, sizeof line, "%.17g,%zu,%.17g,%.17g,%.17g,%.17g\n", r.delta, r.cardinality, r.error_total,
                      r.error_regular, r.error_singular, r.slope_running);
        out << line;
    }
}

} // namespace nvb
