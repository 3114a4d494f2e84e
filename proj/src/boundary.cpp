#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "gdl/format.hpp"
#include "gdl/parallel.hpp"
#include "gdl/spectral_curve.hpp"

namespace gdl {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Marching-squares lattice. Corner k of a cell and edge k joining corners k and k+1:
//
//   c3 --e2-- c2
//   |          |
//   e3        e1
//   |          |
//   c0 --e0-- c1
struct Lattice {
  Window window;
  std::size_t nx = 0, ny = 0;
  double hx = 0.0, hy = 0.0;

  cplx node(std::size_t i, std::size_t j) const {
    return {window.re_min + hx * static_cast<double>(i), window.im_min + hy * static_cast<double>(j)};
  }
  std::size_t horizontal_edges() const { return (nx - 1) * ny; }
  std::size_t edge_count() const { return horizontal_edges() + nx * (ny - 1); }
  std::size_t h_edge(std::size_t i, std::size_t j) const { return j * (nx - 1) + i; }
  std::size_t v_edge(std::size_t i, std::size_t j) const { return horizontal_edges() + j * nx + i; }

  // Node pair (as flat indices) of an edge.
  std::pair<std::size_t, std::size_t> edge_nodes(std::size_t e) const {
    if (e < horizontal_edges()) {
      const std::size_t i = e % (nx - 1), j = e / (nx - 1);
      return {j * nx + i, j * nx + i + 1};
    }
    const std::size_t k = e - horizontal_edges();
    const std::size_t i = k % nx, j = k / nx;
    return {j * nx + i, (j + 1) * nx + i};
  }
  cplx node(std::size_t flat) const { return node(flat % nx, flat / nx); }
};

double level_function(const DeformationModel& model, cplx z) {
  return model.verdict(z).inv_trace - 1.0;
}

bool inside(double f) { return !(f < 0.0); }

cplx refine_crossing(const DeformationModel& model, cplx z_in, cplx z_out, double tol) {
  cplx best = z_in;
  double best_f = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const cplx mid = 0.5 * (z_in + z_out);
    if (mid == z_in || mid == z_out) break;
    const double f = level_function(model, mid);
    if (std::abs(f) < best_f) {
      best_f = std::abs(f);
      best = mid;
    }
    if (best_f <= 0.01 * tol) break;
    (inside(f) ? z_in : z_out) = mid;
  }
  return best;
}

}  // namespace

BoundaryPolyline trace_boundary(const DeformationModel& model, const Window& window,
                                std::size_t resolution, double boundary_tol) {
  if (!(window.re_max > window.re_min) || !(window.im_max > window.im_min)) {
    throw ConfigError("boundary window is empty");
  }
  if (resolution < 16) throw ConfigError("boundary resolution must be at least 16");

  Lattice lat{window, resolution, resolution,
              (window.re_max - window.re_min) / static_cast<double>(resolution - 1),
              (window.im_max - window.im_min) / static_cast<double>(resolution - 1)};

  std::vector<double> f(lat.nx * lat.ny);
  parallel_for(f.size(), 0, [&](std::size_t k) { f[k] = level_function(model, lat.node(k)); });

  // Crossing vertices, one per sign-changing edge.
  std::vector<std::size_t> crossing_edges;
  for (std::size_t e = 0; e < lat.edge_count(); ++e) {
    const auto [p, q] = lat.edge_nodes(e);
    if (inside(f[p]) != inside(f[q])) crossing_edges.push_back(e);
  }
  if (crossing_edges.empty()) {
    throw EmptyBoundary("tr_n Y0^{-1} - 1 has constant sign on the window");
  }
  std::vector<std::size_t> vertex_of_edge(lat.edge_count(), kNone);
  for (std::size_t v = 0; v < crossing_edges.size(); ++v) vertex_of_edge[crossing_edges[v]] = v;
  std::vector<cplx> position(crossing_edges.size());
  parallel_for(crossing_edges.size(), 0, [&](std::size_t v) {
    const auto [p, q] = lat.edge_nodes(crossing_edges[v]);
    const bool p_in = inside(f[p]);
    position[v] = refine_crossing(model, lat.node(p_in ? p : q), lat.node(p_in ? q : p),
                                  boundary_tol);
  });

  // Directed segments with the inside on the left.
  std::vector<std::size_t> next(crossing_edges.size(), kNone);
  std::vector<bool> has_prev(crossing_edges.size(), false);
  auto link = [&](std::size_t from, std::size_t to) {
    next[from] = to;
    has_prev[to] = true;
  };
  for (std::size_t j = 0; j + 1 < lat.ny; ++j) {
    for (std::size_t i = 0; i + 1 < lat.nx; ++i) {
      const std::size_t corner[4] = {j * lat.nx + i, j * lat.nx + i + 1, (j + 1) * lat.nx + i + 1,
                                     (j + 1) * lat.nx + i};
      const std::size_t edge[4] = {lat.h_edge(i, j), lat.v_edge(i + 1, j), lat.h_edge(i, j + 1),
                                   lat.v_edge(i, j)};
      bool in[4];
      for (int k = 0; k < 4; ++k) in[k] = inside(f[corner[k]]);

      std::vector<std::pair<int, int>> pairs;
      std::vector<int> cut;
      for (int k = 0; k < 4; ++k)
        if (in[k] != in[(k + 1) % 4]) cut.push_back(k);
      if (cut.size() == 2) {
        pairs.emplace_back(cut[0], cut[1]);
      } else if (cut.size() == 4) {
        const cplx centre = lat.node(i, j) + cplx(0.5 * lat.hx, 0.5 * lat.hy);
        if (inside(level_function(model, centre)) == in[0]) {
          pairs = {{0, 1}, {2, 3}};
        } else {
          pairs = {{3, 0}, {1, 2}};
        }
      }
      for (const auto& [a, b] : pairs) {
        // Walking counterclockwise around the cell from edge a to edge b passes the
        // corners a+1, ..., b, which lie to the right of the segment a -> b.
        const bool right_side_inside = in[(a + 1) % 4];
        const std::size_t va = vertex_of_edge[edge[a]], vb = vertex_of_edge[edge[b]];
        if (right_side_inside) {
          link(vb, va);
        } else {
          link(va, vb);
        }
      }
    }
  }

  BoundaryPolyline out;
  out.window = window;
  out.resolution = resolution;
  out.boundary_tol = boundary_tol;
  std::vector<bool> used(crossing_edges.size(), false);
  auto walk = [&](std::size_t start) {
    BoundaryLoop loop;
    std::size_t v = start;
    while (v != kNone && !used[v]) {
      used[v] = true;
      loop.points.push_back(position[v]);
      v = next[v];
    }
    loop.closed = v == start;
    out.loops.push_back(std::move(loop));
  };
  for (std::size_t v = 0; v < crossing_edges.size(); ++v)
    if (!has_prev[v] && !used[v]) walk(v);
  for (std::size_t v = 0; v < crossing_edges.size(); ++v)
    if (!used[v]) walk(v);
  return out;
}

BoundaryPolyline trace_boundary(const ComplexMatrix& a, const Window& window,
                                std::size_t resolution) {
  return trace_boundary(DeformationModel(a), window, resolution);
}

std::string boundary_csv(const BoundaryPolyline& boundary) {
  std::ostringstream out;
  out << "loop_id,re,im\n";
  for (std::size_t id = 0; id < boundary.loops.size(); ++id)
    for (const cplx& p : boundary.loops[id].points)
      out << id << ',' << format_double(p.real()) << ',' << format_double(p.imag()) << '\n';
  return out.str();
}

std::string boundary_metadata_json(const BoundaryPolyline& boundary) {
  nlohmann::ordered_json j;
  const Window& w = boundary.window;
  j["window"] = {w.re_min, w.re_max, w.im_min, w.im_max};
  j["resolution"] = boundary.resolution;
  j["boundary_tol"] = boundary.boundary_tol;
  j["orientation"] = "support on the left";
  auto loops = nlohmann::ordered_json::array();
  for (std::size_t id = 0; id < boundary.loops.size(); ++id) {
    loops.push_back({{"id", id},
                     {"closed", boundary.loops[id].closed},
                     {"points", boundary.loops[id].points.size()}});
  }
  j["loops"] = loops;
  return j.dump(2) + "\n";
}

}  // namespace gdl
