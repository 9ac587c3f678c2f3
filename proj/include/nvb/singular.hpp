#pragma once

#include <nvb/field.hpp>
#include <nvb/geometry.hpp>

#include <stdexcept>
#include <vector>

namespace nvb {

class Mesh;
struct KelloggSolution;

class SingularityError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// amplitude * sin(frequency * theta + phase) + offset on [start, end].
struct SinePiece
{
    double start = 0.0;
    double end = 0.0;
    double amplitude = 1.0;
    double frequency = 1.0;
    double phase = 0.0;
    double offset = 0.0;

    double value(double theta) const;
    double derivative(double theta) const;
};

/// Continuous, 2pi-periodic, piecewise smooth angular factor g(theta).
class AngularFunction
{
public:
    /// Pieces must cover [0, 2pi] contiguously; continuity at every breakpoint
    /// (including the 0/2pi seam) is checked to 1e-9.
    explicit AngularFunction(std::vector<SinePiece> pieces);

    /// sin(pi theta / omega) on [0, omega], zero on (omega, 2pi).
    static AngularFunction poisson_corner(double omega);
    /// The four-branch interface factor mu(theta).
    static AngularFunction kellogg(const KelloggSolution& solution);

    double value(double theta) const;
    double derivative(double theta) const;

    const std::vector<SinePiece>& pieces() const { return pieces_; }
    /// Breakpoints where g' has a jump.
    std::vector<double> kinks(double tol = 1e-9) const;

private:
    const SinePiece& piece(double theta) const;

    std::vector<SinePiece> pieces_;
};

/// chi(r): identically one, or a C^m radial ramp from 1 (r <= r1) to 0 (r >= r2)
/// built from the order-(2m+1) smoothstep polynomial.
class Cutoff
{
public:
    enum class Kind { one, smooth_radial };

    Cutoff() = default;
    static Cutoff smooth_radial(double r1, double r2, int order);

    Kind kind() const { return kind_; }
    double inner() const { return r1_; }
    double outer() const { return r2_; }
    int order() const { return order_; }

    double value(double r) const;
    double derivative(double r) const;

private:
    Kind kind_ = Kind::one;
    double r1_ = 0.0;
    double r2_ = 0.0;
    int order_ = 0;
};

/// u(x) = c (ln r)^k r^gamma g(theta) chi(r), polar coordinates about `center`
/// with theta measured counter-clockwise from `reference_direction`.
class SingularTerm final : public Field
{
public:
    SingularTerm(double c, int k, double gamma, Point center, AngularFunction angular, Cutoff cutoff = {},
                 Point reference_direction = {1.0, 0.0});

    double value(Point x) const override;
    /// Throws SingularityError at the center.
    Point gradient(Point x) const override;
    std::vector<Point> singular_points() const override { return {center_}; }

    double coefficient() const { return c_; }
    int log_power() const { return k_; }
    double exponent() const { return gamma_; }
    Point center() const { return center_; }
    Point reference_direction() const { return reference_; }
    const AngularFunction& angular() const { return angular_; }
    const Cutoff& cutoff() const { return cutoff_; }

    /// Angle of x about the center in [0, 2pi).
    double angle(Point x) const;

private:
    double c_;
    int k_;
    double gamma_;
    Point center_;
    AngularFunction angular_;
    Cutoff cutoff_;
    Point reference_;
};

/// r^(pi/omega) sin(pi theta/omega) about the origin: the leading corner
/// singularity of the Laplacian at an interior angle omega.
SingularTerm preset_poisson_corner(double omega, Point center = {0.0, 0.0}, Point reference_direction = {1.0, 0.0});

struct BoundCheckResult
{
    std::vector<double> radii;
    std::vector<double> value_ratio;    ///< max over angles of |u| / r^gamma_bar, per radius
    std::vector<double> gradient_ratio; ///< max over angles of |grad u| / r^(gamma_bar-1), per radius
    double max_value_ratio = 0.0;
    double max_gradient_ratio = 0.0;
};

/// Samples |u| / r^gamma_bar and |grad u| / r^(gamma_bar-1) on circles of the
/// given radii about the center.
BoundCheckResult bound_check(const SingularTerm& term, double gamma_bar, const std::vector<double>& radii,
                             int angle_samples = 64);

/// Angles (about the term's center, relative to its reference direction) at
/// which g' jumps but no initial-mesh edge leaves the center. Empty when the
/// gradient jumps are aligned with the mesh.
std::vector<double> misaligned_kinks(const SingularTerm& term, const Mesh& mesh, double tol = 1e-9);

} // namespace nvb
