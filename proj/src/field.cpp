#include <nvb/field.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nvb {

double RegularField::value(Point x) const
{
    switch (preset_) {
    case RegularPreset::zero:
        return 0.0;
    case RegularPreset::x_plus_y:
        return x.x + x.y;
    case RegularPreset::x_squared:
        return x.x * x.x;
    case RegularPreset::sin_cos:
        return std::sin(x.x) * std::cos(x.y);
    case RegularPreset::sin_pi:
        return std::sin(std::numbers::pi * x.x) * std::sin(std::numbers::pi * x.y);
    }
    return 0.0;
}

Point RegularField::gradient(Point x) const
{
    constexpr double pi = std::numbers::pi;
    switch (preset_) {
    case RegularPreset::zero:
        return {0.0, 0.0};
    case RegularPreset::x_plus_y:
        return {1.0, 1.0};
    case RegularPreset::x_squared:
        return {2.0 * x.x, 0.0};
    case RegularPreset::sin_cos:
        return {std::cos(x.x) * std::cos(x.y), -std::sin(x.x) * std::sin(x.y)};
    case RegularPreset::sin_pi:
        return {pi * std::cos(pi * x.x) * std::sin(pi * x.y), pi * std::sin(pi * x.x) * std::cos(pi * x.y)};
    }
    return {0.0, 0.0};
}

RegularPreset parse_regular_preset(std::string_view name)
{
    if (name == "zero") {
        return RegularPreset::zero;
    }
    if (name == "x_plus_y") {
        return RegularPreset::x_plus_y;
    }
    if (name == "x_squared") {
        return RegularPreset::x_squared;
    }
    if (name == "sin_cos") {
        return RegularPreset::sin_cos;
    }
    if (name == "sin_pi") {
        return RegularPreset::sin_pi;
    }
    throw std::invalid_argument("unknown regular preset '" + std::string(name) + "'");
}

double FieldSum::value(Point x) const
{
    double sum = 0.0;
    for (const auto& p : parts_) {
        sum += p->value(x);
    }
    return sum;
}

Point FieldSum::gradient(Point x) const
{
    Point sum;
    for (const auto& p : parts_) {
        sum = sum + p->gradient(x);
    }
    return sum;
}

std::vector<Point> FieldSum::singular_points() const
{
    std::vector<Point> out;
    for (const auto& p : parts_) {
        for (const Point& s : p->singular_points()) {
            bool seen = false;
            for (const Point& q : out) {
                seen = seen || q == s;
            }
            if (!seen) {
                out.push_back(s);
            }
        }
    }
    return out;
}

} // namespace nvb
