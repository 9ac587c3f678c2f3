#pragma once

#include <nvb/geometry.hpp>

#include <memory>
#include <string_view>
#include <vector>

namespace nvb {

/// Scalar function on the plane with its gradient.
class Field
{
public:
    virtual ~Field() = default;

    virtual double value(Point x) const = 0;
    virtual Point gradient(Point x) const = 0;

    /// Points where the gradient may be unbounded. Quadrature treats elements
    /// touching them specially.
    virtual std::vector<Point> singular_points() const { return {}; }
};

using FieldPtr = std::shared_ptr<const Field>;

/// Smooth regular part u0, chosen from a fixed expression library.
enum class RegularPreset { zero, x_plus_y, x_squared, sin_cos, sin_pi };

class RegularField final : public Field
{
public:
    explicit RegularField(RegularPreset preset) : preset_(preset) {}

    double value(Point x) const override;
    Point gradient(Point x) const override;

    RegularPreset preset() const { return preset_; }

private:
    RegularPreset preset_;
};

RegularPreset parse_regular_preset(std::string_view name);

class FieldSum final : public Field
{
public:
    FieldSum() = default;
    explicit FieldSum(std::vector<FieldPtr> parts) : parts_(std::move(parts)) {}

    void add(FieldPtr part) { parts_.push_back(std::move(part)); }
    const std::vector<FieldPtr>& parts() const { return parts_; }

    double value(Point x) const override;
    Point gradient(Point x) const override;
    std::vector<Point> singular_points() const override;

private:
    std::vector<FieldPtr> parts_;
};

} // namespace nvb
