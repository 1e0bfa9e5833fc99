#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polyvem/linalg.hpp"

namespace polyvem {

/// Undirected mesh edge. Endpoints are stored canonically with a < b
/// (global node indices); `left` is the element that traverses the edge in
/// the canonical direction (positive orientation), `right` the other one,
/// -1 when absent.
struct MeshEdge {
  int a = -1;
  int b = -1;
  int left = -1;
  int right = -1;
  bool boundary = false;
};

struct MeshElement {
  std::vector<int> vertices;       // counterclockwise global node indices
  std::vector<int> edges;          // global edge index per local edge (v_i, v_{i+1})
  std::vector<bool> edge_positive; // true iff vertices[i] < vertices[i+1] globally
};

struct PolygonalMesh {
  std::vector<Vector2> nodes;
  std::vector<MeshEdge> edges;
  std::vector<MeshElement> elements;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  int element_count() const { return static_cast<int>(elements.size()); }
  int boundary_edge_count() const;
};

/// Per-element geometry. Edge quantities are listed in local traversal
/// order; normals are the unit outward normals of this element.
struct ElementGeometry {
  int edge_count = 0;
  Vector2 barycenter = Vector2::Zero();  // area centroid
  double diameter = 0.0;                 // max pairwise vertex distance
  double area = 0.0;
  std::vector<Vector2> vertices;
  std::vector<double> edge_length;
  std::vector<Vector2> edge_midpoint;
  std::vector<Vector2> edge_normal;
};

/// Builds the edge/adjacency structure from counterclockwise polygons.
/// Throws on clockwise or degenerate polygons, out-of-range indices, and
/// non-manifold edges (shared by more than two elements).
PolygonalMesh mesh_from_polygons(std::vector<Vector2> nodes,
                                 const std::vector<std::vector<int>>& polygons);

/// Text format v1: line 1 "polyvem-mesh 1"; line 2 "<#nodes> <#elements>";
/// then node lines "x y"; then element lines "<d> <v_1> ... <v_d>" with
/// 0-based counterclockwise vertex indices. '#' starts a comment.
PolygonalMesh load_mesh(const std::string& path);
void save_mesh(const PolygonalMesh& mesh, const std::string& path);

enum class MeshKind { Triangles, DistortedQuads, DistortedHexagons };

MeshKind mesh_kind_from_string(const std::string& name);
std::string to_string(MeshKind kind);

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

/// Structured generators covering `domain` exactly with max element diameter
/// <= 1.5 * target_h, deterministic for a fixed seed. `distortion` is the
/// interior-node jitter amplitude as a fraction of target_h (capped at 0.2;
/// triangles are never jittered, matching the reference meshes).
PolygonalMesh generate_mesh(MeshKind kind, const Rect& domain, double target_h,
                            std::uint64_t seed, double distortion = 0.2);

ElementGeometry element_geometry(const PolygonalMesh& mesh, int element);

/// Largest element diameter.
double mesh_size(const PolygonalMesh& mesh);

}  // namespace polyvem
