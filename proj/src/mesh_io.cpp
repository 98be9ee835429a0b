#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "bvc/error.hpp"
#include "bvc/mesh.hpp"

namespace bvc {

namespace {

std::string fmt17(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_mesh(const Mesh& mesh, std::ostream& out) {
  const bool tri = mesh.kind() == CellKind::triangle;
  out << "vertices " << mesh.num_vertices() << " cells " << mesh.num_cells() << " facets "
      << mesh.num_facets() << " kind " << (tri ? "tri" : "quad") << "\n";
  for (const Vec2& v : mesh.vertices()) out << fmt17(v.x()) << " " << fmt17(v.y()) << "\n";
  for (const auto& cell : mesh.cells()) {
    for (int i = 0; i < mesh.vertices_per_cell(); ++i) out << (i ? " " : "") << cell[i];
    out << "\n";
  }
  for (const auto& f : mesh.facets())
    out << f.cell << " " << f.local_edge << " " << f.endpoints[0] << " " << f.endpoints[1] << " "
        << fmt17(f.normal.x()) << " " << fmt17(f.normal.y()) << "\n";
  if (!out) throw IoError("write_mesh: stream failure");
}

Mesh read_mesh(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("read_mesh: missing header");
  std::istringstream header(line);
  std::string w_vertices, w_cells, w_facets, w_kind, kind;
  long nv = -1, nc = -1, nf = -1;
  header >> w_vertices >> nv >> w_cells >> nc >> w_facets >> nf >> w_kind >> kind;
  if (!header || w_vertices != "vertices" || w_cells != "cells" || w_facets != "facets" ||
      w_kind != "kind" || (kind != "tri" && kind != "quad") || nv < 0 || nc < 0 || nf < 0)
    throw IoError("read_mesh: malformed header '" + line + "'");
  const CellKind cell_kind = kind == "tri" ? CellKind::triangle : CellKind::quad;
  const int per_cell = cell_kind == CellKind::triangle ? 3 : 4;

  std::vector<Vec2> vertices(nv);
  for (auto& v : vertices)
    if (!(in >> v.x() >> v.y())) throw IoError("read_mesh: truncated vertex block");
  std::vector<Mesh::Cell> cells(nc, Mesh::Cell{-1, -1, -1, -1});
  for (auto& c : cells)
    for (int i = 0; i < per_cell; ++i)
      if (!(in >> c[i])) throw IoError("read_mesh: truncated cell block");
  std::set<std::pair<int, int>> facets;
  for (long f = 0; f < nf; ++f) {
    int cell, local, a, b;
    double nx, ny;
    if (!(in >> cell >> local >> a >> b >> nx >> ny)) throw IoError("read_mesh: truncated facet block");
    facets.insert({cell, local});
  }
  Mesh mesh(std::move(vertices), std::move(cells), cell_kind);
  mesh.retain_facets([&](const BoundaryFacet& f) { return facets.count({f.cell, f.local_edge}) > 0; });
  if (mesh.num_facets() != nf) throw IoError("read_mesh: facet list does not match mesh boundary");
  return mesh;
}

}  // namespace bvc
