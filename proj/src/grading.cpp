#include <nvb/grading.hpp>

#include <nvb/singular.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace nvb {

namespace {

double exponent_rate(double gamma, int p, int d)
{
    return (2.0 * gamma + d - 2.0) / (2.0 * p + d);
}

void validate_scalars(double delta, double gamma, int p, int d)
{
    if (!(delta > 0.0 && delta < 1.0)) {
        throw GradingError("delta must lie in (0, 1) so that some K >= 0 exists, got " + std::to_string(delta));
    }
    if (!(gamma > 0.0)) {
        throw GradingError("grading exponent gamma must be positive");
    }
    if (p < 1) {
        throw GradingError("polynomial degree p must be at least 1");
    }
    if (d != 2 && d != 3) {
        throw GradingError("dimension d must be 2 or 3");
    }
}

} // namespace

int compute_K(double delta, double gamma, int p, int d)
{
    validate_scalars(delta, gamma, p, d);
    const double a = exponent_rate(gamma, p, d);
    constexpr double slack = 1e-12;
    // equality belongs to the left inequality
    auto left = [&](int k) { return std::exp2(-(k + 1) * a) <= delta * (1.0 + slack); };
    auto right = [&](int k) { return delta < std::exp2(-k * a) * (1.0 - slack); };

    int K = std::max(0, static_cast<int>(std::ceil(std::log2(1.0 / delta) / a)) - 1);
    while (!left(K)) {
        ++K;
    }
    while (K > 0 && !right(K)) {
        --K;
    }
    if (!left(K) || !right(K)) {
        throw GradingError("no K satisfies the grading inequalities for delta = " + std::to_string(delta));
    }
    return K;
}

GradingParams GradingParams::make(double delta, int p, double gamma, std::vector<Point> singular_points, int d)
{
    GradingParams params;
    params.delta = delta;
    params.p = p;
    params.d = d;
    params.gamma = gamma;
    params.singular_points = std::move(singular_points);
    params.K = compute_K(delta, gamma, p, d);
    return params;
}

GradingParams make_grading_params(const Mesh& mesh, double delta, int p, std::span<const SingularTerm> terms,
                                  GammaRule rule)
{
    constexpr int d = 2;
    double gamma = 1.0;
    std::vector<Point> points;
    if (!terms.empty()) {
        double min_gamma = std::numeric_limits<double>::infinity();
        bool has_logs = false;
        for (const SingularTerm& t : terms) {
            min_gamma = std::min(min_gamma, t.exponent());
            has_logs = has_logs || t.log_power() > 0;
            if (std::find(points.begin(), points.end(), t.center()) == points.end()) {
                points.push_back(t.center());
            }
        }
        if (rule == GammaRule::min && has_logs) {
            throw GradingError("gamma = min gamma_i requires every log power to be zero");
        }
        gamma = rule == GammaRule::min ? min_gamma : 0.5 * min_gamma;
    }

    if (delta > 0.0 && static_cast<double>(mesh.initial_count()) > std::pow(delta, -d) * (1.0 + 1e-12)) {
        throw GradingError("delta too large: #T0 = " + std::to_string(mesh.initial_count()) + " exceeds delta^-d");
    }

    for (const Point& x : points) {
        bool found = false;
        for (Index id = 0; id < mesh.triangles().size() && !found; ++id) {
            const Triangle& t = mesh.triangle(id);
            if (t.generation != 0) {
                continue;
            }
            for (Index v : t.v) {
                found = found || norm(mesh.vertices()[v] - x) <= 1e-12 * (1.0 + norm(x));
            }
        }
        if (!found) {
            throw GradingError("singular point (" + std::to_string(x.x) + ", " + std::to_string(x.y) +
                               ") is not a vertex of the initial mesh");
        }
    }
    return GradingParams::make(delta, p, gamma, std::move(points), d);
}

double second_loop_threshold(const GradingParams& params, int level)
{
    const int p = params.p;
    const int d = params.d;
    return params.delta * std::exp2(params.threshold_exponent_scale * 2.0 * level * (params.gamma - p - 1.0) / (d * (2.0 * p + d)));
}

double size_bound(const GradingParams& params, int level, double exponent_scale)
{
    const int p = params.p;
    const int d = params.d;
    return std::pow(params.delta, d) *
           std::exp2(exponent_scale * 2.0 * level * (params.gamma - p - 1.0) / (2.0 * p + d));
}

double element_distance(const Mesh& mesh, Index element, std::span<const Point> points)
{
    return min_distance(mesh.points(element), points);
}

std::size_t ComplexityLedger::total_marks(Loop loop) const
{
    std::size_t sum = 0;
    for (const LedgerRow& r : rows) {
        if (r.loop == loop) {
            sum += r.marks;
        }
    }
    return sum;
}

std::size_t ComplexityLedger::total_marks() const { return total_marks(Loop::first) + total_marks(Loop::second); }

std::size_t ComplexityLedger::final_leaves() const
{
    return rows.empty() ? initial_leaves : rows.back().leaves_after_complete;
}

std::size_t ComplexityLedger::iterations(Loop loop) const
{
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [&](const LedgerRow& r) { return r.loop == loop; }));
}

void write_ledger_csv(std::ostream& out, const ComplexityLedger& ledger)
{
    out << "loop,iter,marks,leaves_before,leaves_after_refine,leaves_after_complete\n";
    for (const LedgerRow& r : ledger.rows) {
        out << static_cast<int>(r.loop) << ',' << r.iteration << ',' << r.marks << ',' << r.leaves_before << ','
            << r.leaves_after_refine << ',' << r.leaves_after_complete << '\n';
    }
}

namespace {

LedgerRow refine_and_complete(Mesh& mesh, Loop loop, int iteration, const MarkSet& marks)
{
    LedgerRow row;
    row.loop = loop;
    row.iteration = iteration;
    row.leaves_before = mesh.leaf_count();
    row.marks = mesh.refine(marks);
    row.leaves_after_refine = mesh.leaf_count();
    mesh.complete();
    row.leaves_after_complete = mesh.leaf_count();
    return row;
}

} // namespace

std::vector<LedgerRow> first_loop(Mesh& mesh, const GradingParams& params)
{
    std::vector<LedgerRow> rows;
    for (int j = 0;; ++j) {
        MarkSet marks;
        for (Index id : mesh.leaves()) {
            if (mesh.element_size(id) > params.delta) {
                marks.push_back(id);
            }
        }
        rows.push_back(refine_and_complete(mesh, Loop::first, j, marks));
        if (marks.empty()) {
            break;
        }
    }
    return rows;
}

std::vector<LedgerRow> second_loop(Mesh& mesh, const GradingParams& params)
{
    std::vector<LedgerRow> rows;
    for (int level = 1; level < params.d * (params.K + 1); ++level) {
        const double radius = std::exp2(-static_cast<double>(level) / params.d);
        const double threshold = second_loop_threshold(params, level);
        MarkSet marks;
        if (!params.singular_points.empty()) {
            for (Index id : mesh.leaves()) {
                if (element_distance(mesh, id, params.singular_points) <= radius &&
                    mesh.element_size(id) > threshold) {
                    marks.push_back(id);
                }
            }
        }
        rows.push_back(refine_and_complete(mesh, Loop::second, level, marks));
    }
    return rows;
}

ComplexityLedger grade(Mesh& mesh, const GradingParams& params)
{
    ComplexityLedger ledger;
    ledger.initial_leaves = mesh.leaf_count();
    auto first = first_loop(mesh, params);
    ledger.rows.insert(ledger.rows.end(), first.begin(), first.end());
    auto second = second_loop(mesh, params);
    ledger.rows.insert(ledger.rows.end(), second.begin(), second.end());
    return ledger;
}

ComplexityLedger grade_uniform(Mesh& mesh, const GradingParams& params)
{
    ComplexityLedger ledger;
    ledger.initial_leaves = mesh.leaf_count();
    ledger.rows = first_loop(mesh, params);
    return ledger;
}

FirstLoopReport verify_first_loop(const Mesh& mesh, const ComplexityLedger& ledger, const GradingParams& params)
{
    FirstLoopReport report;
    double max_initial = 0.0;
    for (Index id = 0; id < mesh.triangles().size(); ++id) {
        if (mesh.triangle(id).generation == 0) {
            max_initial = std::max(max_initial, mesh.area(id));
        }
    }
    const double vol = std::pow(params.delta, params.d);
    for (const LedgerRow& r : ledger.rows) {
        if (r.loop != Loop::first) {
            continue;
        }
        report.iterations += 1;
        report.refining_iterations += r.marks > 0 ? 1 : 0;
        report.total_marks += r.marks;
    }
    report.iteration_bound = std::log2(max_initial / vol) + 1.0;
    report.marks_bound = 2.0 * mesh.domain_area() / vol;
    for (Index id : mesh.leaves()) {
        report.max_leaf_area = std::max(report.max_leaf_area, mesh.area(id));
    }
    report.passed = static_cast<double>(report.refining_iterations) <= std::max(report.iteration_bound, 0.0) &&
                    static_cast<double>(report.total_marks) <= report.marks_bound &&
                    report.max_leaf_area <= vol * (1.0 + 1e-12);
    return report;
}

SizeLemmaReport verify_size_lemma(const Mesh& mesh, const GradingParams& params, double exponent_scale,
                                  std::optional<int> max_level)
{
    SizeLemmaReport report;
    const int top = max_level.value_or(params.d * (params.K + 1));
    for (Index id : mesh.leaves()) {
        const double r = element_distance(mesh, id, params.singular_points);
        const double a = mesh.area(id);
        for (int level = 0; level <= top; ++level) {
            if (!(r < std::exp2(-static_cast<double>(level) / params.d))) {
                break;
            }
            ++report.checked;
            const double bound = size_bound(params, level, exponent_scale);
            if (a > bound * (1.0 + 1e-12)) {
                report.violations.push_back({id, level, a, bound, r});
            }
        }
    }
    return report;
}

MarkedBoundReport verify_marked_bound(const ComplexityLedger& ledger, const GradingParams& params)
{
    MarkedBoundReport report;
    const double vol = std::pow(params.delta, params.d);
    const double rate = exponent_rate(params.gamma, params.p, params.d);
    for (const LedgerRow& r : ledger.rows) {
        if (r.loop != Loop::second) {
            continue;
        }
        const double c = static_cast<double>(r.marks) * vol * std::exp2(r.iteration * rate);
        report.levels.push_back(r.iteration);
        report.constants.push_back(c);
        report.max_constant = std::max(report.max_constant, c);
    }
    report.complexity_constant = static_cast<double>(ledger.final_leaves() - ledger.initial_leaves) * vol;
    return report;
}

BddReport bdd_ledger_check(const ComplexityLedger& ledger)
{
    BddReport report;
    report.added = ledger.final_leaves() - ledger.initial_leaves;
    report.marks = ledger.total_marks();
    report.constant = report.marks == 0 ? 0.0 : static_cast<double>(report.added) / static_cast<double>(report.marks);
    return report;
}

} // namespace nvb
