#pragma once

#include <nvb/field.hpp>
#include <nvb/grading.hpp>
#include <nvb/lagrange.hpp>
#include <nvb/mesh.hpp>
#include <nvb/quadrature.hpp>

#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace nvb {

class SingularTerm;

struct QuadratureOptions
{
    int standard_degree = 0;   ///< 0 selects max(2p, 6) + 4
    int near_levels = 3;       ///< red subdivisions for elements closer to a singular point than their diameter
    int radial_points = 8;     ///< per geometric layer of the apex rule
    int angular_points = 8;
    int initial_levels = 10;   ///< geometric layers; doubled until converged
    int max_levels = 40;
    double relative_tolerance = 1e-8;

    int degree_for(int p) const { return standard_degree > 0 ? standard_degree : std::max(2 * p, 6) + 4; }
};

using PointIntegrand = std::function<double(Point)>;

/// Integral of `integrand` over t, splitting toward any singular point in the
/// closed triangle and subdividing elements that are close to one. `converged`
/// is cleared when the geometric layers did not settle within max_levels.
double integrate_element(const TrianglePoints& t, const PointIntegrand& integrand, std::span<const Point> singular,
                         int degree, const QuadratureOptions& options, bool& converged);

struct ErrorReport
{
    int p = 1;
    std::vector<Index> elements;            ///< leaf ids, ascending
    std::vector<double> element_error_sq;   ///< |u - I u|^2_{1,T}
    std::vector<Index> flagged;             ///< elements whose singular quadrature did not converge
    double total_sq = 0.0;
    std::size_t leaf_count = 0;
    std::size_t added = 0;                  ///< #T - #T0
    double delta = std::numeric_limits<double>::quiet_NaN();

    std::vector<int> ring;                  ///< ring index per element, empty until attached
    std::vector<double> ring_sums;

    double total() const { return std::sqrt(total_sq); }
    double element_error(std::size_t e) const { return std::sqrt(element_error_sq[e]); }
};

/// |u - I_T u|_{1,T}^2 for every leaf, with I_T the degree-p Lagrange interpolant.
ErrorReport h1_error(const Mesh& mesh, int p, const Field& u, const QuadratureOptions& options = {});

/// |u|_{1,T}^2 per leaf through the same quadrature path.
ErrorReport h1_seminorm(const Mesh& mesh, const Field& u, const QuadratureOptions& options = {});

struct RingAssignment
{
    std::vector<int> ring; ///< per leaf in leaves() order
    int ring_count = 0;    ///< d(K+1) + 1
};

/// D_l = {T : 2^{-(l+1)/d} < dist(center, T) <= 2^{-l/d}} for l < d(K+1), and the
/// innermost ring D_{d(K+1)} = {T : dist <= 2^{-(K+1)}}. Leaves farther than
/// 2^{-1/d} go to ring 0.
RingAssignment ring_decomposition(const Mesh& mesh, Point center, int K, int d = 2);

/// Stores the ring of each report element and the per-ring sums of squared errors.
void attach_rings(ErrorReport& report, const RingAssignment& rings);

struct RingStats
{
    int ring = 0;
    std::size_t count = 0;
    double sum = 0.0;  ///< squared errors
    double max = 0.0;  ///< element error
    double mean = 0.0; ///< element error
};

struct EquidistributionStats
{
    std::vector<RingStats> rings;
    double max_error = 0.0;
    double median_error = 0.0;
    double spread = 0.0; ///< max / median of element errors
};

EquidistributionStats equidistribution_stats(const ErrorReport& report);

void write_ring_stats_csv(std::ostream& out, const EquidistributionStats& stats);

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

enum class RefinementMode { graded, uniform };

struct SweepOptions
{
    RefinementMode mode = RefinementMode::graded;
    GammaRule gamma_rule = GammaRule::half_min;
    QuadratureOptions quadrature;
    std::size_t skip_coarsest = 2; ///< pre-asymptotic rows excluded from the fit
    double mutation_scale = 0.9;   ///< threshold exponent scale of the negative-control regrading
    bool negative_control = true;
    /// Called after each delta with the refined mesh and the total-error report.
    std::function<void(const Mesh&, const GradingParams&, const ErrorReport&)> on_run;
};

struct SweepRow
{
    double delta = 0.0;
    int K = 0;
    std::size_t leaves = 0;
    std::size_t cardinality = 0; ///< #T - #T0
    double error_total = 0.0;
    double error_regular = 0.0;
    double error_singular = 0.0;
    double slope_running = std::numeric_limits<double>::quiet_NaN();
    std::size_t size_violations = 0;
    std::size_t mutated_violations = 0;
    double complexity_constant = 0.0; ///< (#T - #T0) delta^d
    double bdd_constant = 0.0;
    double marked_constant = 0.0;
    std::size_t flagged_elements = 0;
    bool conforming = false;
};

struct SweepResult
{
    std::vector<SweepRow> rows;
    double slope = std::numeric_limits<double>::quiet_NaN();
};

/// Grades (or uniformly refines) the initial mesh for each delta and measures
/// the H1 interpolation error of u = u0 + sum of terms. Requires at least four
/// strictly decreasing deltas.
SweepResult convergence_sweep(const Mesh& initial, std::span<const SingularTerm> terms, const FieldPtr& u0, int p,
                              std::span<const double> deltas, const SweepOptions& options = {});

/// CSV with header delta,cardinality,error_total,error_regular,error_singular,slope_running.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

} // namespace nvb
