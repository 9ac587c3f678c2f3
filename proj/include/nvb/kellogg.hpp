#pragma once

#include <array>
#include <stdexcept>
#include <vector>

namespace nvb {

/// Parameters of the checkerboard interface solution u = r^gamma mu(theta)
/// on (-1,1)^2 with coefficient a1 in quadrants I and III, a2 in II and IV.
struct KelloggSolution
{
    double gamma = 0.0;
    double R = 0.0; ///< a1 / a2
    double rho = 0.0;
    double sigma = 0.0;
    int iterations = 0;
    std::vector<double> residual_trace; ///< residual norm before each Newton step and at exit
};

class KelloggError : public std::runtime_error
{
public:
    KelloggError(const std::string& what, std::vector<double> trace)
        : std::runtime_error(what), trace_(std::move(trace))
    {
    }

    const std::vector<double>& residual_trace() const { return trace_; }

private:
    std::vector<double> trace_;
};

/// Residuals of the three trigonometric relations between R, rho and sigma.
std::array<double, 3> kellogg_residual(double gamma, double R, double rho, double sigma);

/// Whether 0 < gamma < 2 and rho, sigma lie in their admissible open intervals.
bool kellogg_constraints_hold(double gamma, double rho, double sigma);

/// Damped Newton iteration for (R, rho, sigma). Starts from the midpoints of the
/// admissible rho/sigma intervals and, for gamma < 1, retries from the rho = pi/4
/// branch. Iterates until the residual is below 1e-10 or stops decreasing, and
/// accepts residuals below 1e-10 max(1, R). Throws
/// std::invalid_argument unless 0 < gamma < 2, KelloggError when no start
/// reaches an admissible root within 100 iterations.
KelloggSolution kellogg_solve(double gamma);

/// mu(theta), branch chosen by quadrant; theta in [0, 2pi).
double kellogg_mu(double theta, const KelloggSolution& solution);

} // namespace nvb
