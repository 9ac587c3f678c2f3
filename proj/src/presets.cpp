#include <nvb/presets.hpp>

#include <numbers>
#include <string>

namespace nvb {

Mesh initial_mesh(DomainPreset preset)
{
    switch (preset) {
    case DomainPreset::square:
        return Mesh::from_initial({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{2, 0, 1}, {0, 2, 3}});
    case DomainPreset::l_shape:
        return Mesh::from_initial({{-1, -1}, {0, -1}, {-1, 0}, {0, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}},
                                  {{0, 3, 2}, {3, 0, 1}, {3, 5, 2}, {5, 3, 6}, {3, 7, 6}, {7, 3, 4}});
    case DomainPreset::slit:
        // Vertex 5 is (1,0) on the upper side of the slit, vertex 9 the lower copy.
        return Mesh::from_initial({{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {0, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}},
                                  {{0, 4, 3}, {4, 0, 1}, {4, 6, 3}, {6, 4, 7}, {4, 8, 7}, {8, 4, 5}, {2, 4, 1}, {4, 2, 9}});
    }
    throw MeshError("unknown domain preset");
}

DomainPreset parse_domain_preset(std::string_view name)
{
    if (name == "square") {
        return DomainPreset::square;
    }
    if (name == "l_shape") {
        return DomainPreset::l_shape;
    }
    if (name == "slit") {
        return DomainPreset::slit;
    }
    throw MeshError("unknown domain preset '" + std::string(name) + "'");
}

std::string_view to_string(DomainPreset preset)
{
    switch (preset) {
    case DomainPreset::square:
        return "square";
    case DomainPreset::l_shape:
        return "l_shape";
    case DomainPreset::slit:
        return "slit";
    }
    return "unknown";
}

double corner_angle(DomainPreset preset)
{
    switch (preset) {
    case DomainPreset::square:
        return std::numbers::pi / 2;
    case DomainPreset::l_shape:
        return 1.5 * std::numbers::pi;
    case DomainPreset::slit:
        return 2.0 * std::numbers::pi;
    }
    return 0.0;
}

} // namespace nvb
