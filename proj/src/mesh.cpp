#include "polyvem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace polyvem {

namespace {

double polygon_signed_area(const std::vector<Vector2>& nodes, const std::vector<int>& poly) {
  double acc = 0.0;
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Vector2& p = nodes[poly[i]];
    const Vector2& q = nodes[poly[(i + 1) % n]];
    acc += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * acc;
}

// splitmix64; used for all mesh jitter so runs are reproducible across
// platforms (std::uniform_real_distribution is implementation-defined).
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_double(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Displacement uniform on the disc of radius `amp` for node `index`,
/// decorrelated from traversal order. The norm bound keeps jittered element
/// diameters within amp-controlled limits.
Vector2 node_jitter(std::uint64_t seed, std::uint64_t index, double amp) {
  const std::uint64_t base = splitmix64(seed ^ (0x517cc1b727220a95ULL * (index + 1)));
  const double radius = amp * std::sqrt(unit_double(splitmix64(base)));
  const double angle = 2.0 * M_PI * unit_double(splitmix64(base + 1));
  return radius * Vector2(std::cos(angle), std::sin(angle));
}

}  // namespace

int PolygonalMesh::boundary_edge_count() const {
  int n = 0;
  for (const MeshEdge& e : edges)
    if (e.boundary) ++n;
  return n;
}

PolygonalMesh mesh_from_polygons(std::vector<Vector2> nodes,
                                 const std::vector<std::vector<int>>& polygons) {
  PolygonalMesh mesh;
  mesh.nodes = std::move(nodes);
  const int nn = mesh.node_count();

  std::map<std::pair<int, int>, int> edge_of;
  mesh.elements.reserve(polygons.size());
  for (std::size_t p = 0; p < polygons.size(); ++p) {
    const std::vector<int>& poly = polygons[p];
    if (poly.size() < 3)
      throw std::runtime_error("mesh: element " + std::to_string(p) + " has fewer than 3 vertices");
    for (int v : poly)
      if (v < 0 || v >= nn)
        throw std::runtime_error("mesh: element " + std::to_string(p) + " references node " +
                                 std::to_string(v) + " out of range");
    for (std::size_t i = 0; i < poly.size(); ++i)
      for (std::size_t j = i + 1; j < poly.size(); ++j)
        if (poly[i] == poly[j])
          throw std::runtime_error("mesh: element " + std::to_string(p) + " repeats node " +
                                   std::to_string(poly[i]));
    if (polygon_signed_area(mesh.nodes, poly) <= 0.0)
      throw std::runtime_error("mesh: element " + std::to_string(p) +
                               " is clockwise or degenerate (signed area <= 0)");

    MeshElement elem;
    elem.vertices = poly;
    const int d = static_cast<int>(poly.size());
    elem.edges.resize(d);
    elem.edge_positive.resize(d);
    for (int i = 0; i < d; ++i) {
      const int va = poly[i];
      const int vb = poly[(i + 1) % d];
      const bool positive = va < vb;
      const std::pair<int, int> key = positive ? std::make_pair(va, vb) : std::make_pair(vb, va);
      auto it = edge_of.find(key);
      int idx;
      if (it == edge_of.end()) {
        idx = mesh.edge_count();
        edge_of.emplace(key, idx);
        MeshEdge edge;
        edge.a = key.first;
        edge.b = key.second;
        mesh.edges.push_back(edge);
      } else {
        idx = it->second;
      }
      MeshEdge& edge = mesh.edges[idx];
      int& side = positive ? edge.left : edge.right;
      if (side != -1) {
        // A repeated traversal direction means either a non-manifold edge or
        // inconsistent element orientation.
        throw std::runtime_error("mesh: edge (" + std::to_string(key.first) + "," +
                                 std::to_string(key.second) +
                                 ") is shared by more than two elements or traversed twice in "
                                 "the same direction");
      }
      side = static_cast<int>(p);
      elem.edges[i] = idx;
      elem.edge_positive[i] = positive;
    }
    mesh.elements.push_back(std::move(elem));
  }

  for (MeshEdge& e : mesh.edges) e.boundary = (e.left == -1 || e.right == -1);
  return mesh;
}

PolygonalMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mesh: cannot open " + path);
  std::vector<std::string> lines;
  std::string raw;
  while (std::getline(in, raw)) {
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::size_t begin = raw.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    lines.push_back(raw);
  }
  std::size_t cursor = 0;
  auto next_line = [&]() -> std::istringstream {
    if (cursor >= lines.size()) throw std::runtime_error("load_mesh: unexpected end of file");
    return std::istringstream(lines[cursor++]);
  };

  {
    std::istringstream header = next_line();
    std::string magic;
    int version = 0;
    header >> magic >> version;
    if (magic != "polyvem-mesh" || version != 1)
      throw std::runtime_error("load_mesh: expected header 'polyvem-mesh 1'");
  }
  int nnodes = 0, nelems = 0;
  {
    std::istringstream counts = next_line();
    if (!(counts >> nnodes >> nelems) || nnodes <= 0 || nelems <= 0)
      throw std::runtime_error("load_mesh: bad node/element counts");
  }
  std::vector<Vector2> nodes(nnodes);
  for (int i = 0; i < nnodes; ++i) {
    std::istringstream line = next_line();
    if (!(line >> nodes[i].x() >> nodes[i].y()))
      throw std::runtime_error("load_mesh: bad node line " + std::to_string(i));
  }
  std::vector<std::vector<int>> polys(nelems);
  for (int e = 0; e < nelems; ++e) {
    std::istringstream line = next_line();
    int d = 0;
    if (!(line >> d) || d < 3)
      throw std::runtime_error("load_mesh: bad vertex count in element " + std::to_string(e));
    polys[e].resize(d);
    for (int i = 0; i < d; ++i)
      if (!(line >> polys[e][i]))
        throw std::runtime_error("load_mesh: bad element line " + std::to_string(e));
  }
  return mesh_from_polygons(std::move(nodes), polys);
}

void save_mesh(const PolygonalMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mesh: cannot open " + path);
  out << "polyvem-mesh 1\n";
  out << mesh.node_count() << " " << mesh.element_count() << "\n";
  char buf[64];
  for (const Vector2& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x(), p.y());
    out << buf;
  }
  for (const MeshElement& e : mesh.elements) {
    out << e.vertices.size();
    for (int v : e.vertices) out << " " << v;
    out << "\n";
  }
}

MeshKind mesh_kind_from_string(const std::string& name) {
  if (name == "triangles") return MeshKind::Triangles;
  if (name == "quads" || name == "distorted-quads") return MeshKind::DistortedQuads;
  if (name == "hexagons" || name == "distorted-hexagons") return MeshKind::DistortedHexagons;
  throw std::invalid_argument("unknown mesh kind: " + name);
}

std::string to_string(MeshKind kind) {
  switch (kind) {
    case MeshKind::Triangles: return "triangles";
    case MeshKind::DistortedQuads: return "quads";
    case MeshKind::DistortedHexagons: return "hexagons";
  }
  return "?";
}

namespace {

PolygonalMesh generate_grid(MeshKind kind, const Rect& dom, double h,
                            std::uint64_t seed, double distortion) {
  const double target = h / std::sqrt(2.0);
  const int nx = std::max(1, static_cast<int>(std::ceil(dom.width() / target)));
  const int ny = std::max(1, static_cast<int>(std::ceil(dom.height() / target)));
  const double dx = dom.width() / nx;
  const double dy = dom.height() / ny;

  std::vector<Vector2> nodes((nx + 1) * (ny + 1));
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  // Displacement capped so jittered quads stay simple and diameters stay
  // below 1.5 * target_h.
  const double amp = (kind == MeshKind::DistortedQuads)
                         ? std::min(distortion * h, 0.25 * std::min(dx, dy))
                         : 0.0;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      Vector2 p(dom.x0 + i * dx, dom.y0 + j * dy);
      if (amp > 0.0 && i > 0 && i < nx && j > 0 && j < ny)
        p += node_jitter(seed, static_cast<std::uint64_t>(id(i, j)), amp);
      nodes[id(i, j)] = p;
    }

  std::vector<std::vector<int>> polys;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
      if (kind == MeshKind::Triangles) {
        polys.push_back({v00, v10, v11});
        polys.push_back({v00, v11, v01});
      } else {
        polys.push_back({v00, v10, v11, v01});
      }
    }
  return mesh_from_polygons(std::move(nodes), polys);
}

struct PointWelder {
  double tol;
  std::vector<Vector2> points;
  std::unordered_map<std::int64_t, std::vector<int>> cells;

  explicit PointWelder(double tolerance) : tol(tolerance) {}

  std::int64_t key(long cx, long cy) const {
    const std::uint64_t h =
        static_cast<std::uint64_t>(cx) * 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(cy);
    return static_cast<std::int64_t>(h);
  }

  int insert(const Vector2& p) {
    const double cell = 4.0 * tol;
    const long cx = std::lround(std::floor(p.x() / cell));
    const long cy = std::lround(std::floor(p.y() / cell));
    for (long ix = cx - 1; ix <= cx + 1; ++ix)
      for (long iy = cy - 1; iy <= cy + 1; ++iy) {
        auto it = cells.find(key(ix, iy));
        if (it == cells.end()) continue;
        for (int idx : it->second)
          if ((points[idx] - p).norm() <= tol) return idx;
      }
    const int idx = static_cast<int>(points.size());
    points.push_back(p);
    cells[key(cx, cy)].push_back(idx);
    return idx;
  }
};

std::vector<Vector2> clip_to_rect(std::vector<Vector2> poly, const Rect& dom, double tol) {
  struct HalfPlane {
    Vector2 n;
    double c;
  };
  const HalfPlane planes[4] = {{{1, 0}, dom.x0}, {{-1, 0}, -dom.x1}, {{0, 1}, dom.y0}, {{0, -1}, -dom.y1}};
  for (const HalfPlane& hp : planes) {
    std::vector<Vector2> out;
    const int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) {
      const Vector2& p = poly[i];
      const Vector2& q = poly[(i + 1) % n];
      const double dp = hp.n.dot(p) - hp.c;
      const double dq = hp.n.dot(q) - hp.c;
      const bool pin = dp >= -tol;
      const bool qin = dq >= -tol;
      if (pin) out.push_back(p);
      if (pin != qin && std::abs(dp - dq) > tol) {
        const double t = dp / (dp - dq);
        if (t > tol && t < 1.0 - tol) out.push_back(p + t * (q - p));
      }
    }
    poly = std::move(out);
    if (poly.empty()) break;
  }
  return poly;
}

// Stretched honeycomb aligned so the rectangle boundary cuts hexagons
// through their center lines: boundary cells come out as pentagons and
// quads with no hanging nodes.
PolygonalMesh generate_hexagons(const Rect& dom, double h, std::uint64_t seed, double distortion) {
  const double target = 0.75 * h;  // hexagon height is 4b/3
  const int nx = std::max(1, static_cast<int>(std::ceil(dom.width() / target)));
  const int ny = std::max(2, static_cast<int>(std::ceil(dom.height() / target)));
  const double a = dom.width() / nx;
  const double b = dom.height() / ny;
  const double c = b / 3.0;
  const double tol = 1e-9 * std::max(dom.width(), dom.height());

  PointWelder welder(tol);
  std::vector<std::vector<int>> polys;
  for (int j = 0; j <= ny; ++j) {
    const double cy = dom.y0 + j * b;
    const bool shifted = (j % 2 == 1);
    const int iend = shifted ? nx : nx - 1;
    for (int i = 0; i <= iend; ++i) {
      const double cx = shifted ? dom.x0 + i * a : dom.x0 + (i + 0.5) * a;
      std::vector<Vector2> hex = {{cx, cy + 2 * c}, {cx - 0.5 * a, cy + c}, {cx - 0.5 * a, cy - c},
                                  {cx, cy - 2 * c}, {cx + 0.5 * a, cy - c}, {cx + 0.5 * a, cy + c}};
      std::vector<Vector2> cell = clip_to_rect(std::move(hex), dom, tol);
      if (cell.size() < 3) continue;
      std::vector<int> poly;
      for (const Vector2& p : cell) {
        const int idx = welder.insert(p);
        if (poly.empty() || (poly.back() != idx && poly.front() != idx)) poly.push_back(idx);
      }
      if (poly.size() >= 3) polys.push_back(std::move(poly));
    }
  }

  std::vector<Vector2> nodes = welder.points;
  const double amp = std::min(distortion * h, 0.5 * c);
  if (amp > 0.0) {
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      Vector2& p = nodes[n];
      const bool on_boundary = std::abs(p.x() - dom.x0) <= tol || std::abs(p.x() - dom.x1) <= tol ||
                               std::abs(p.y() - dom.y0) <= tol || std::abs(p.y() - dom.y1) <= tol;
      if (!on_boundary) p += node_jitter(seed, n, amp);
    }
  }
  return mesh_from_polygons(std::move(nodes), polys);
}

}  // namespace

PolygonalMesh generate_mesh(MeshKind kind, const Rect& domain, double target_h,
                            std::uint64_t seed, double distortion) {
  if (!(target_h > 0.0)) throw std::invalid_argument("generate_mesh: target_h must be positive");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw std::invalid_argument("generate_mesh: empty domain");
  distortion = std::clamp(distortion, 0.0, 0.2);
  switch (kind) {
    case MeshKind::Triangles:
    case MeshKind::DistortedQuads:
      return generate_grid(kind, domain, target_h, seed, distortion);
    case MeshKind::DistortedHexagons:
      return generate_hexagons(domain, target_h, seed, distortion);
  }
  throw std::invalid_argument("generate_mesh: unknown kind");
}

ElementGeometry element_geometry(const PolygonalMesh& mesh, int element) {
  const MeshElement& elem = mesh.elements.at(element);
  ElementGeometry g;
  g.edge_count = static_cast<int>(elem.vertices.size());
  g.vertices.resize(g.edge_count);
  for (int i = 0; i < g.edge_count; ++i) g.vertices[i] = mesh.nodes[elem.vertices[i]];

  double area2 = 0.0;
  Vector2 first_moment = Vector2::Zero();
  for (int i = 0; i < g.edge_count; ++i) {
    const Vector2& p = g.vertices[i];
    const Vector2& q = g.vertices[(i + 1) % g.edge_count];
    const double cross = p.x() * q.y() - q.x() * p.y();
    area2 += cross;
    first_moment += cross * (p + q);
  }
  g.area = 0.5 * area2;
  if (!(g.area > 0.0))
    throw std::runtime_error("element_geometry: element " + std::to_string(element) +
                             " has non-positive area");
  g.barycenter = first_moment / (6.0 * g.area);

  g.diameter = 0.0;
  for (int i = 0; i < g.edge_count; ++i)
    for (int j = i + 1; j < g.edge_count; ++j)
      g.diameter = std::max(g.diameter, (g.vertices[i] - g.vertices[j]).norm());

  g.edge_length.resize(g.edge_count);
  g.edge_midpoint.resize(g.edge_count);
  g.edge_normal.resize(g.edge_count);
  for (int i = 0; i < g.edge_count; ++i) {
    const Vector2& p = g.vertices[i];
    const Vector2& q = g.vertices[(i + 1) % g.edge_count];
    const Vector2 d = q - p;
    g.edge_length[i] = d.norm();
    if (!(g.edge_length[i] > 0.0))
      throw std::runtime_error("element_geometry: element " + std::to_string(element) +
                               " has a zero-length edge");
    g.edge_midpoint[i] = 0.5 * (p + q);
    g.edge_normal[i] = Vector2(d.y(), -d.x()) / g.edge_length[i];
  }
  return g;
}

double mesh_size(const PolygonalMesh& mesh) {
  double h = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e)
    h = std::max(h, element_geometry(mesh, e).diameter);
  return h;
}

}  // namespace polyvem
