#include <nvb/singular.hpp>

#include <nvb/kellogg.hpp>
#include <nvb/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace nvb {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

double angle_distance(double a, double b)
{
    double d = std::fmod(std::abs(a - b), two_pi);
    return std::min(d, two_pi - d);
}

} // namespace

double SinePiece::value(double theta) const
{
    return amplitude * std::sin(frequency * theta + phase) + offset;
}

double SinePiece::derivative(double theta) const
{
    return amplitude * frequency * std::cos(frequency * theta + phase);
}

AngularFunction::AngularFunction(std::vector<SinePiece> pieces) : pieces_(std::move(pieces))
{
    if (pieces_.empty()) {
        throw std::invalid_argument("angular function needs at least one piece");
    }
    if (std::abs(pieces_.front().start) > 1e-12 || std::abs(pieces_.back().end - two_pi) > 1e-12) {
        throw std::invalid_argument("angular pieces must cover [0, 2pi]");
    }
    double scale = 1.0;
    for (const SinePiece& p : pieces_) {
        if (!(p.end > p.start)) {
            throw std::invalid_argument("angular piece has empty range");
        }
        scale = std::max(scale, std::abs(p.amplitude) + std::abs(p.offset));
    }
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
        if (std::abs(pieces_[i].end - pieces_[i + 1].start) > 1e-12) {
            throw std::invalid_argument("angular pieces are not contiguous");
        }
        const double b = pieces_[i].end;
        if (std::abs(pieces_[i].value(b) - pieces_[i + 1].value(b)) > 1e-9 * scale) {
            throw std::invalid_argument("angular function is discontinuous at theta = " + std::to_string(b));
        }
    }
    if (std::abs(pieces_.front().value(0.0) - pieces_.back().value(two_pi)) > 1e-9 * scale) {
        throw std::invalid_argument("angular function is not periodic: g(0) != g(2pi)");
    }
}

AngularFunction AngularFunction::poisson_corner(double omega)
{
    if (!(omega > 0.0 && omega <= two_pi)) {
        throw std::invalid_argument("corner angle must lie in (0, 2pi]");
    }
    const double lambda = std::numbers::pi / omega;
    std::vector<SinePiece> pieces{{0.0, omega, 1.0, lambda, 0.0, 0.0}};
    if (omega < two_pi) {
        pieces.push_back({omega, two_pi, 0.0, 0.0, 0.0, 0.0});
    }
    return AngularFunction(std::move(pieces));
}

AngularFunction AngularFunction::kellogg(const KelloggSolution& s)
{
    constexpr double pi = std::numbers::pi;
    const double g = s.gamma;
    // C cos(g (theta - theta0)) == C sin(g theta - g theta0 + pi/2)
    auto branch = [&](double start, double end, double amplitude, double theta0) {
        return SinePiece{start, end, amplitude, g, -g * theta0 + pi / 2, 0.0};
    };
    return AngularFunction({branch(0.0, pi / 2, std::cos((pi / 2 - s.sigma) * g), pi / 2 - s.rho),
                            branch(pi / 2, pi, std::cos(s.rho * g), pi - s.sigma),
                            branch(pi, 1.5 * pi, std::cos(s.sigma * g), pi + s.rho),
                            branch(1.5 * pi, two_pi, std::cos((pi / 2 - s.rho) * g), 1.5 * pi + s.sigma)});
}

const SinePiece& AngularFunction::piece(double theta) const
{
    for (const SinePiece& p : pieces_) {
        if (theta < p.end) {
            return p;
        }
    }
    return pieces_.back();
}

double AngularFunction::value(double theta) const { return piece(theta).value(theta); }

double AngularFunction::derivative(double theta) const { return piece(theta).derivative(theta); }

std::vector<double> AngularFunction::kinks(double tol) const
{
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
        const double b = pieces_[i].end;
        if (std::abs(pieces_[i].derivative(b) - pieces_[i + 1].derivative(b)) > tol) {
            out.push_back(b);
        }
    }
    if (std::abs(pieces_.back().derivative(two_pi) - pieces_.front().derivative(0.0)) > tol) {
        out.push_back(0.0);
    }
    return out;
}

Cutoff Cutoff::smooth_radial(double r1, double r2, int order)
{
    if (!(r1 > 0.0 && r2 > r1)) {
        throw std::invalid_argument("cutoff radii must satisfy 0 < r1 < r2");
    }
    if (order < 1) {
        throw std::invalid_argument("cutoff order must be at least 1");
    }
    Cutoff c;
    c.kind_ = Kind::smooth_radial;
    c.r1_ = r1;
    c.r2_ = r2;
    c.order_ = order;
    return c;
}

double Cutoff::value(double r) const
{
    if (kind_ == Kind::one || r <= r1_) {
        return 1.0;
    }
    if (r >= r2_) {
        return 0.0;
    }
    const double t = (r - r1_) / (r2_ - r1_);
    const int m = order_;
    double sum = 0.0;
    for (int j = 0; j <= m; ++j) {
        sum += binomial(m + j, j) * std::pow(1.0 - t, j);
    }
    return 1.0 - std::pow(t, m + 1) * sum;
}

double Cutoff::derivative(double r) const
{
    if (kind_ == Kind::one || r <= r1_ || r >= r2_) {
        return 0.0;
    }
    const double t = (r - r1_) / (r2_ - r1_);
    const int m = order_;
    // d/dt smoothstep = (2m+1)!/(m!)^2 t^m (1-t)^m
    const double factor = (2 * m + 1) * binomial(2 * m, m);
    return -factor * std::pow(t * (1.0 - t), m) / (r2_ - r1_);
}

SingularTerm::SingularTerm(double c, int k, double gamma, Point center, AngularFunction angular, Cutoff cutoff,
                           Point reference_direction)
    : c_(c), k_(k), gamma_(gamma), center_(center), angular_(std::move(angular)), cutoff_(cutoff)
{
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("singular exponent must be positive");
    }
    if (k < 0) {
        throw std::invalid_argument("log power must be nonnegative");
    }
    const double len = norm(reference_direction);
    if (!(len > 0.0) || !std::isfinite(len)) {
        throw std::invalid_argument("reference direction must be a nonzero vector");
    }
    reference_ = (1.0 / len) * reference_direction;
}

double SingularTerm::angle(Point x) const
{
    const Point d = x - center_;
    double theta = std::atan2(cross(reference_, d), dot(reference_, d));
    if (theta < 0.0) {
        theta += two_pi;
    }
    return theta >= two_pi ? 0.0 : theta;
}

double SingularTerm::value(Point x) const
{
    const double r = norm(x - center_);
    if (r == 0.0) {
        return 0.0;
    }
    const double chi = cutoff_.value(r);
    if (chi == 0.0) {
        return 0.0;
    }
    return c_ * std::pow(std::log(r), k_) * std::pow(r, gamma_) * angular_.value(angle(x)) * chi;
}

Point SingularTerm::gradient(Point x) const
{
    const Point d = x - center_;
    const double r = norm(d);
    if (r == 0.0) {
        throw SingularityError("gradient of a singular term evaluated at its center");
    }
    const double theta = angle(x);
    const double chi = cutoff_.value(r);
    const double dchi = cutoff_.derivative(r);
    if (chi == 0.0 && dchi == 0.0) {
        return {0.0, 0.0};
    }
    const double L = std::log(r);
    const double rg = std::pow(r, gamma_);
    const double logk = std::pow(L, k_);
    // radial profile f(r) = (ln r)^k r^gamma and its derivative
    const double f = logk * rg;
    double df = gamma_ * logk * rg / r;
    if (k_ > 0) {
        df += k_ * std::pow(L, k_ - 1) * rg / r;
    }
    const double g = angular_.value(theta);
    const double dg = angular_.derivative(theta);

    const double du_dr = c_ * g * (df * chi + f * dchi);
    const double du_dtheta_over_r = c_ * f * dg * chi / r;

    const Point er = (1.0 / r) * d;
    const Point etheta{-er.y, er.x};
    return du_dr * er + du_dtheta_over_r * etheta;
}

SingularTerm preset_poisson_corner(double omega, Point center, Point reference_direction)
{
    return SingularTerm(1.0, 0, std::numbers::pi / omega, center, AngularFunction::poisson_corner(omega), Cutoff{},
                        reference_direction);
}

BoundCheckResult bound_check(const SingularTerm& term, double gamma_bar, const std::vector<double>& radii,
                             int angle_samples)
{
    BoundCheckResult out;
    out.radii = radii;
    const Point ref = term.reference_direction();
    const Point normal{-ref.y, ref.x};
    for (double r : radii) {
        double vmax = 0.0;
        double gmax = 0.0;
        for (int i = 0; i < angle_samples; ++i) {
            const double theta = two_pi * (i + 0.5) / angle_samples;
            const Point x = term.center() + (r * std::cos(theta)) * ref + (r * std::sin(theta)) * normal;
            vmax = std::max(vmax, std::abs(term.value(x)) / std::pow(r, gamma_bar));
            gmax = std::max(gmax, norm(term.gradient(x)) / std::pow(r, gamma_bar - 1.0));
        }
        out.value_ratio.push_back(vmax);
        out.gradient_ratio.push_back(gmax);
        out.max_value_ratio = std::max(out.max_value_ratio, vmax);
        out.max_gradient_ratio = std::max(out.max_gradient_ratio, gmax);
    }
    return out;
}

std::vector<double> misaligned_kinks(const SingularTerm& term, const Mesh& mesh, double tol)
{
    std::vector<double> edge_angles;
    for (Index id = 0; id < mesh.triangles().size(); ++id) {
        const Triangle& t = mesh.triangle(id);
        if (t.generation != 0) {
            continue;
        }
        for (int i = 0; i < 3; ++i) {
            if (norm(mesh.vertices()[t.v[i]] - term.center()) > tol) {
                continue;
            }
            for (int j = 0; j < 3; ++j) {
                if (j != i) {
                    edge_angles.push_back(term.angle(mesh.vertices()[t.v[j]]));
                }
            }
        }
    }
    std::vector<double> out;
    for (double kink : term.angular().kinks()) {
        const bool aligned = std::any_of(edge_angles.begin(), edge_angles.end(),
                                         [&](double a) { return angle_distance(a, kink) <= 1e-9; });
        if (!aligned) {
            out.push_back(kink);
        }
    }
    return out;
}

} // namespace nvb
