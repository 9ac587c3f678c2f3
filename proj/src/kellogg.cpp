#include <nvb/kellogg.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace nvb {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double half_pi = std::numbers::pi / 2;

double cot(double x) { return std::cos(x) / std::sin(x); }
double sec2(double x) { return 1.0 / (std::cos(x) * std::cos(x)); }
double csc2(double x) { return 1.0 / (std::sin(x) * std::sin(x)); }

double residual_norm(const std::array<double, 3>& f)
{
    return std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]);
}

using Matrix3 = std::array<std::array<double, 3>, 3>;

Matrix3 jacobian(double g, double R, double rho, double sigma)
{
    const double a = (half_pi - sigma) * g;
    const double b = (half_pi - rho) * g;
    Matrix3 J{};
    // R + tan((pi/2 - sigma) g) cot(rho g)
    J[0] = {1.0, -g * std::tan(a) * csc2(rho * g), -g * sec2(a) * cot(rho * g)};
    // 1/R + tan(rho g) cot(sigma g)
    J[1] = {-1.0 / (R * R), g * sec2(rho * g) * cot(sigma * g), -g * std::tan(rho * g) * csc2(sigma * g)};
    // R + tan(sigma g) cot((pi/2 - rho) g)
    J[2] = {1.0, g * std::tan(sigma * g) * csc2(b), g * sec2(sigma * g) * cot(b)};
    return J;
}

/// Gaussian elimination with partial pivoting.
std::array<double, 3> solve3(Matrix3 A, std::array<double, 3> rhs)
{
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row) {
            if (std::abs(A[row][col]) > std::abs(A[pivot][col])) {
                pivot = row;
            }
        }
        std::swap(A[col], A[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        if (A[col][col] == 0.0) {
            throw KelloggError("singular Newton Jacobian", {});
        }
        for (int row = col + 1; row < 3; ++row) {
            const double f = A[row][col] / A[col][col];
            for (int k = col; k < 3; ++k) {
                A[row][k] -= f * A[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    std::array<double, 3> x{};
    for (int row = 2; row >= 0; --row) {
        double s = rhs[row];
        for (int k = row + 1; k < 3; ++k) {
            s -= A[row][k] * x[k];
        }
        x[row] = s / A[row][row];
    }
    return x;
}

} // namespace

std::array<double, 3> kellogg_residual(double g, double R, double rho, double sigma)
{
    return {R + std::tan((half_pi - sigma) * g) * cot(rho * g),
            1.0 / R + std::tan(rho * g) * cot(sigma * g),
            R + std::tan(sigma * g) * cot((half_pi - rho) * g)};
}

bool kellogg_constraints_hold(double g, double rho, double sigma)
{
    if (!(g > 0.0 && g < 2.0)) {
        return false;
    }
    const double two_g_rho = 2.0 * g * rho;
    const double minus_two_g_sigma = -2.0 * g * sigma;
    return std::max(0.0, pi * g - pi) < two_g_rho && two_g_rho < std::min(pi * g, pi) &&
           std::max(0.0, pi - pi * g) < minus_two_g_sigma && minus_two_g_sigma < std::min(pi, 2.0 * pi - pi * g);
}

namespace {

struct NewtonResult
{
    KelloggSolution solution;
    double norm = 0.0;
};

NewtonResult newton(double g, double R, double rho, double sigma)
{
    constexpr int max_iterations = 100;
    constexpr double tolerance = 1e-10;
    KelloggSolution s;
    s.gamma = g;
    s.R = R;
    s.rho = rho;
    s.sigma = sigma;
    auto f = kellogg_residual(g, s.R, s.rho, s.sigma);
    double norm = residual_norm(f);
    for (int it = 0; it < max_iterations; ++it) {
        s.residual_trace.push_back(norm);
        if (norm < tolerance) {
            break;
        }
        std::array<double, 3> step{};
        try {
            step = solve3(jacobian(g, s.R, s.rho, s.sigma), {-f[0], -f[1], -f[2]});
        } catch (const KelloggError&) {
            break;
        }
        double t = 1.0;
        std::array<double, 3> trial_f{};
        double trial_norm = 0.0;
        for (int halving = 0; halving < 40; ++halving) {
            trial_f = kellogg_residual(g, s.R + t * step[0], s.rho + t * step[1], s.sigma + t * step[2]);
            trial_norm = residual_norm(trial_f);
            if (std::isfinite(trial_norm) && trial_norm < norm) {
                break;
            }
            t *= 0.5;
        }
        if (!(std::isfinite(trial_norm) && trial_norm < norm)) {
            break;
        }
        s.R += t * step[0];
        s.rho += t * step[1];
        s.sigma += t * step[2];
        f = trial_f;
        norm = trial_norm;
        s.iterations = it + 1;
    }
    if (s.residual_trace.empty() || s.residual_trace.back() != norm) {
        s.residual_trace.push_back(norm);
    }
    return {s, norm};
}

} // namespace

KelloggSolution kellogg_solve(double g)
{
    if (!(g > 0.0 && g < 2.0)) {
        throw std::invalid_argument("kellogg_solve: gamma must lie in (0, 2), got " + std::to_string(g));
    }
    constexpr double tolerance = 1e-10;
    // First start: rho and sigma at the midpoints of their admissible intervals.
    const double rho_lo = std::max(0.0, pi * g - pi);
    const double rho_hi = std::min(pi * g, pi);
    const double sig_lo = std::max(0.0, pi - pi * g);
    const double sig_hi = std::min(pi, 2.0 * pi - pi * g);
    std::vector<std::array<double, 3>> starts{
        {1.0 + 10.0 / g, 0.5 * (rho_lo + rho_hi) / (2.0 * g), -0.5 * (sig_lo + sig_hi) / (2.0 * g)}};
    // Second start for gamma < 1: rho = pi/4 reduces the system to
    // sigma = pi/4 - pi/(2 gamma), R = cot^2(pi gamma / 4).
    if (g < 1.0) {
        const double c = 1.0 / std::tan(pi * g / 4.0);
        starts.push_back({c * c, pi / 4.0, pi / 4.0 - pi / (2.0 * g)});
    }

    std::vector<double> trace;
    for (const auto& start : starts) {
        NewtonResult r = newton(g, start[0], start[1], start[2]);
        trace.insert(trace.end(), r.solution.residual_trace.begin(), r.solution.residual_trace.end());
        // R + tan(.)cot(.) cancels terms of size R, so the floor scales with R
        if (r.norm < tolerance * std::max(1.0, std::abs(r.solution.R)) && kellogg_constraints_hold(g, r.solution.rho, r.solution.sigma)) {
            return r.solution;
        }
    }
    throw KelloggError("Newton iteration did not reach an admissible root for gamma = " + std::to_string(g), trace);
}

double kellogg_mu(double theta, const KelloggSolution& s)
{
    const double g = s.gamma;
    if (theta < half_pi) {
        return std::cos((half_pi - s.sigma) * g) * std::cos((theta - half_pi + s.rho) * g);
    }
    if (theta < pi) {
        return std::cos(s.rho * g) * std::cos((theta - pi + s.sigma) * g);
    }
    if (theta < 1.5 * pi) {
        return std::cos(s.sigma * g) * std::cos((theta - pi - s.rho) * g);
    }
    return std::cos((half_pi - s.rho) * g) * std::cos((theta - 1.5 * pi - s.sigma) * g);
}

} // namespace nvb
