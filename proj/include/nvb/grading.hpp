#pragma once

#include <nvb/mesh.hpp>

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace nvb {

class SingularTerm;

class GradingError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// How the grading exponent is derived from the singular exponents.
enum class GammaRule {
    half_min, ///< gamma = min_i gamma_i / 2 (always valid)
    min,      ///< gamma = min_i gamma_i (only when every log power is zero)
};

struct GradingParams
{
    double delta = 0.0;
    int p = 1;
    int d = 2;
    double gamma = 0.0;
    std::vector<Point> singular_points;
    int K = 0;
    /// Multiplies the second-loop threshold exponent; values != 1 only for mutation tests.
    double threshold_exponent_scale = 1.0;

    /// Validates the scalar parameters and derives K.
    static GradingParams make(double delta, int p, double gamma, std::vector<Point> singular_points, int d = 2);

    /// Number of second-loop iterations, d(K+1) - 1.
    int second_loop_iterations() const { return d * (K + 1) - 1; }
};

/// Parameters for grading `mesh` towards the centers of `terms`. Rejects a delta
/// with #T0 > delta^-d and centers that are not vertices of the initial mesh.
GradingParams make_grading_params(const Mesh& mesh, double delta, int p, std::span<const SingularTerm> terms,
                                  GammaRule rule = GammaRule::half_min);

/// The integer K with 2^{-(K+1)a} <= delta < 2^{-Ka}, a = (2 gamma + d - 2)/(2p + d).
/// Throws GradingError when delta is outside (0, 1) or the other arguments are
/// out of range.
int compute_K(double delta, double gamma, int p, int d);

/// h_T threshold of the second loop at iteration l: delta 2^{2l(gamma-p-1)/(d(2p+d))}
/// (exponent multiplied by threshold_exponent_scale).
double second_loop_threshold(const GradingParams& params, int level);

/// Area bound delta^d 2^{scale * 2l(gamma-p-1)/(2p+d)}; scale = 1 is the grading target.
double size_bound(const GradingParams& params, int level, double exponent_scale = 1.0);

/// r_T: distance from a leaf to the nearest singular point (+inf if none).
double element_distance(const Mesh& mesh, Index element, std::span<const Point> points);

enum class Loop { first = 1, second = 2 };

struct LedgerRow
{
    Loop loop = Loop::first;
    int iteration = 0;
    std::size_t marks = 0;
    std::size_t leaves_before = 0;
    std::size_t leaves_after_refine = 0;
    std::size_t leaves_after_complete = 0;
};

struct ComplexityLedger
{
    std::size_t initial_leaves = 0;
    std::vector<LedgerRow> rows;

    std::size_t total_marks(Loop loop) const;
    std::size_t total_marks() const;
    std::size_t final_leaves() const;
    std::size_t iterations(Loop loop) const;
};

/// CSV with header loop,iter,marks,leaves_before,leaves_after_refine,leaves_after_complete.
void write_ledger_csv(std::ostream& out, const ComplexityLedger& ledger);

/// Marks every leaf with h_T > delta, refines, completes; repeats until nothing
/// is marked. The final (empty) iteration is recorded too.
std::vector<LedgerRow> first_loop(Mesh& mesh, const GradingParams& params);

/// For l = 1 .. d(K+1)-1 marks leaves with r_T <= 2^{-l/d} and
/// h_T > second_loop_threshold(l), refines, completes.
std::vector<LedgerRow> second_loop(Mesh& mesh, const GradingParams& params);

/// Both loops on `mesh`; returns the full ledger.
ComplexityLedger grade(Mesh& mesh, const GradingParams& params);

/// Uniform baseline: the first loop only, ignoring the singular points.
ComplexityLedger grade_uniform(Mesh& mesh, const GradingParams& params);

struct FirstLoopReport
{
    std::size_t iterations = 0;           ///< all iterations, including the final empty one
    std::size_t refining_iterations = 0;  ///< iterations with at least one mark
    double iteration_bound = 0.0;         ///< log2(max|T0| / delta^d) + 1
    std::size_t total_marks = 0;
    double marks_bound = 0.0;             ///< 2 |Omega| delta^-d
    double max_leaf_area = 0.0;           ///< over leaves after the first loop
    bool passed = false;
};

/// Checks iteration count, the marked-count bound and |T| <= delta^d right after
/// the first loop (call before the second loop runs).
FirstLoopReport verify_first_loop(const Mesh& mesh, const ComplexityLedger& ledger, const GradingParams& params);

struct SizeViolation
{
    Index element = 0;
    int level = 0;
    double area = 0.0;
    double bound = 0.0;
    double distance = 0.0;
};

struct SizeLemmaReport
{
    std::size_t checked = 0;
    std::vector<SizeViolation> violations;
    bool passed() const { return violations.empty(); }
};

/// For every leaf and 0 <= l <= max_level: r_T < 2^{-l/d} implies
/// |T| <= size_bound(l, exponent_scale) (relative slack 1e-12). max_level
/// defaults to d(K+1).
SizeLemmaReport verify_size_lemma(const Mesh& mesh, const GradingParams& params, double exponent_scale = 1.0,
                                  std::optional<int> max_level = std::nullopt);

struct MarkedBoundReport
{
    std::vector<int> levels;
    std::vector<double> constants; ///< #M_l delta^d 2^{l(2gamma+d-2)/(2p+d)}
    double max_constant = 0.0;
    double complexity_constant = 0.0; ///< (#T - #T0) delta^d
};

MarkedBoundReport verify_marked_bound(const ComplexityLedger& ledger, const GradingParams& params);

struct BddReport
{
    std::size_t added = 0;
    std::size_t marks = 0;
    double constant = 0.0; ///< added / marks, 0 when nothing was marked
};

BddReport bdd_ledger_check(const ComplexityLedger& ledger);

} // namespace nvb
