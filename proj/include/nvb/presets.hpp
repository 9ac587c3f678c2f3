#pragma once

#include <nvb/mesh.hpp>

#include <string_view>

namespace nvb {

enum class DomainPreset { square, l_shape, slit };

/// Initial meshes with compatible refinement-edge flags: every square cell is
/// split by a diagonal that is the common refinement edge of its two halves.
///
///   square  (0,1)^2, 2 triangles
///   l_shape (-1,1)^2 \ [0,1)x(-1,0], 6 triangles, reentrant corner at the origin
///   slit    (-1,1)^2 \ [0,1)x{0}, 8 triangles, slit vertices duplicated
Mesh initial_mesh(DomainPreset preset);

DomainPreset parse_domain_preset(std::string_view name);
std::string_view to_string(DomainPreset preset);

/// Interior angle of the domain at its singular corner (origin) for presets
/// that have one.
double corner_angle(DomainPreset preset);

} // namespace nvb
