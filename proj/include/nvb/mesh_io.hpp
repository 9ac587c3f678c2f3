#pragma once

#include <nvb/mesh.hpp>

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>

namespace nvb {

class ParseError : public std::runtime_error
{
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Plain-text forest format:
///
///   nvb-mesh 1 <nv> <nt>
///   <x> <y>                                   (nv lines, 17 significant digits)
///   <v0> <v1> <v2> <generation> <alive>       (nt lines, 0-based)
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);

void save_mesh(const std::string& path, const Mesh& mesh);
Mesh load_mesh(const std::string& path);

/// Legacy VTK ASCII unstructured grid of the leaf set (cell type 5), with the
/// generation as cell data and, optionally, one extra scalar per leaf in
/// leaves() order.
void write_vtk(std::ostream& out, const Mesh& mesh, std::span<const double> leaf_scalars = {},
               const std::string& scalar_name = "value");

} // namespace nvb
