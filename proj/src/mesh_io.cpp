#include <nvb/mesh_io.hpp>

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nvb {

namespace {

std::string format_double(double value)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

class LineReader
{
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    /// Next non-empty line; throws naming the line that was expected.
    std::istringstream next(const char* expected)
    {
        std::string line;
        while (std::getline(in_, line)) {
            ++number_;
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                return std::istringstream(line);
            }
        }
        throw ParseError(number_ + 1, std::string("unexpected end of file, expected ") + expected);
    }

    std::size_t number() const { return number_; }

private:
    std::istream& in_;
    std::size_t number_ = 0;
};

void expect_end(std::istringstream& fields, std::size_t line)
{
    std::string extra;
    if (fields >> extra) {
        throw ParseError(line, "unexpected trailing field '" + extra + "'");
    }
}

} // namespace

void write_mesh(std::ostream& out, const Mesh& mesh)
{
    out << "nvb-mesh 1 " << mesh.vertices().size() << ' ' << mesh.triangles().size() << '\n';
    for (const Point& p : mesh.vertices()) {
        out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
    }
    for (const Triangle& t : mesh.triangles()) {
        out << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << t.generation << ' ' << (t.alive ? 1 : 0) << '\n';
    }
}

Mesh read_mesh(std::istream& in)
{
    LineReader reader(in);
    auto header = reader.next("header");
    std::string magic;
    int version = 0;
    long long nv = -1;
    long long nt = -1;
    if (!(header >> magic >> version >> nv >> nt) || magic != "nvb-mesh") {
        throw ParseError(reader.number(), "expected header 'nvb-mesh 1 <nv> <nt>'");
    }
    if (version != 1) {
        throw ParseError(reader.number(), "unsupported format version " + std::to_string(version));
    }
    if (nv < 0 || nt < 0) {
        throw ParseError(reader.number(), "negative counts in header");
    }
    expect_end(header, reader.number());

    std::vector<Point> vertices;
    vertices.reserve(static_cast<std::size_t>(nv));
    for (long long i = 0; i < nv; ++i) {
        auto fields = reader.next("vertex");
        Point p;
        if (!(fields >> p.x >> p.y)) {
            throw ParseError(reader.number(), "expected '<x> <y>' for vertex " + std::to_string(i));
        }
        expect_end(fields, reader.number());
        vertices.push_back(p);
    }

    std::vector<Triangle> triangles;
    triangles.reserve(static_cast<std::size_t>(nt));
    for (long long i = 0; i < nt; ++i) {
        auto fields = reader.next("triangle");
        long long v0, v1, v2;
        int generation, alive;
        if (!(fields >> v0 >> v1 >> v2 >> generation >> alive)) {
            throw ParseError(reader.number(),
                             "expected '<v0> <v1> <v2> <generation> <alive>' for triangle " + std::to_string(i));
        }
        expect_end(fields, reader.number());
        for (long long v : {v0, v1, v2}) {
            if (v < 0 || v >= nv) {
                throw ParseError(reader.number(), "vertex index " + std::to_string(v) + " out of range");
            }
        }
        if (generation < 0 || (alive != 0 && alive != 1)) {
            throw ParseError(reader.number(), "invalid generation or alive flag");
        }
        Triangle t;
        t.v = {static_cast<Index>(v0), static_cast<Index>(v1), static_cast<Index>(v2)};
        t.generation = generation;
        t.alive = alive == 1;
        triangles.push_back(t);
    }
    return Mesh::from_forest(std::move(vertices), std::move(triangles));
}

void save_mesh(const std::string& path, const Mesh& mesh)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_mesh(out, mesh);
}

Mesh load_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    return read_mesh(in);
}

void write_vtk(std::ostream& out, const Mesh& mesh, std::span<const double> leaf_scalars, const std::string& scalar_name)
{
    const std::vector<Index> leaves = mesh.leaves();
    if (!leaf_scalars.empty() && leaf_scalars.size() != leaves.size()) {
        throw std::invalid_argument("write_vtk: one scalar per leaf required");
    }
    out << "# vtk DataFile Version 2.0\n";
    out << "nvb leaf mesh\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.vertices().size() << " double\n";
    for (const Point& p : mesh.vertices()) {
        out << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
    }
    out << "CELLS " << leaves.size() << ' ' << 4 * leaves.size() << '\n';
    for (Index id : leaves) {
        const auto& v = mesh.triangle(id).v;
        out << "3 " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    }
    out << "CELL_TYPES " << leaves.size() << '\n';
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        out << "5\n";
    }
    out << "CELL_DATA " << leaves.size() << '\n';
    out << "SCALARS generation int 1\nLOOKUP_TABLE default\n";
    for (Index id : leaves) {
        out << mesh.triangle(id).generation << '\n';
    }
    if (!leaf_scalars.empty()) {
        out << "SCALARS " << scalar_name << " double 1\nLOOKUP_TABLE default\n";
        for (double s : leaf_scalars) {
            out << format_double(s) << '\n';
        }
    }
}

} // namespace nvb
