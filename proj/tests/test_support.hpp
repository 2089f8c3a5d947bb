#ifndef PATCHFORGE_TEST_SUPPORT_HPP
#define PATCHFORGE_TEST_SUPPORT_HPP

// Test-only oracles and fixtures. Nothing here calls into the geometry
// implementation it is used to check.

#include "patchforge/geometry.hpp"
#include "patchforge/image.hpp"
#include "patchforge/oracle.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace patchforge::testing {

using Pt = std::pair<double, double>;

/// Vertex position computed straight from the lattice layout.
inline Pt lattice_point(int cell, double u, double v) {
  static const int ox[8] = {0, 1, 2, 2, 2, 1, 0, 0};
  static const int oy[8] = {0, 0, 0, 1, 2, 2, 2, 1};
  return {(ox[cell] + u) / 3.0, (oy[cell] + v) / 3.0};
}

inline std::vector<Pt> lattice_polygon(const PolygonPatch& p) {
  std::vector<Pt> out;
  for (const auto& v : p.vertices()) out.push_back(lattice_point(v.cell, v.u, v.v));
  return out;
}

inline double shoelace(const std::vector<Pt>& pts) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& [x0, y0] = pts[i];
    const auto& [x1, y1] = pts[(i + 1) % pts.size()];
    s += x0 * y1 - x1 * y0;
  }
  return std::abs(s) / 2.0;
}

/// Classic crossing-number test (W. R. Franklin's pnpoly).
inline bool pnpoly(const std::vector<Pt>& poly, double x, double y) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& [xi, yi] = poly[i];
    const auto& [xj, yj] = poly[j];
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) inside = !inside;
  }
  return inside;
}

/// Brute-force count of pixel centers inside the polygon.
inline long brute_force_pixels(const std::vector<Pt>& poly, int w, int h) {
  std::vector<Pt> scaled;
  for (const auto& [x, y] : poly) scaled.emplace_back(x * w, y * h);
  long n = 0;
  for (int py = 0; py < h; ++py)
    for (int px = 0; px < w; ++px) n += pnpoly(scaled, px + 0.5, py + 0.5);
  return n;
}

inline PolygonPatch random_patch(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GridCellVertex> vs;
  for (int c : default_cells(n)) vs.push_back({c, unit(rng), unit(rng)});
  return PolygonPatch(std::move(vs));
}

inline double perimeter(const std::vector<Pt>& pts) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& [x0, y0] = pts[i];
    const auto& [x1, y1] = pts[(i + 1) % pts.size()];
    s += std::hypot(x1 - x0, y1 - y0);
  }
  return s;
}

inline double orient(const Pt& a, const Pt& b, const Pt& c) {
  return (b.first - a.first) * (c.second - a.second) - (b.second - a.second) * (c.first - a.first);
}

inline bool on_segment(const Pt& a, const Pt& b, const Pt& p) {
  return std::min(a.first, b.first) <= p.first && p.first <= std::max(a.first, b.first) &&
         std::min(a.second, b.second) <= p.second && p.second <= std::max(a.second, b.second);
}

/// Closed-segment intersection, touching and collinear overlap included.
inline bool segments_intersect(const Pt& p1, const Pt& p2, const Pt& q1, const Pt& q2) {
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

/// Number of non-adjacent edge pairs that meet.
inline int crossing_pairs(const std::vector<Pt>& poly) {
  const std::size_t n = poly.size();
  int hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      hits += segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]);
    }
  }
  return hits;
}

/// Uniform noise image; exact ties with patch values have probability zero.
inline Image noise_image(std::mt19937_64& rng, int w, int h, int channels) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Image img(w, h, channels);
  for (int c = 0; c < channels; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) img(x, y, c) = unit(rng);
  return img;
}

/// Reports one detection with a fixed confidence at a fixed box.
class ConstantOracle final : public DetectorOracle {
 public:
  ConstantOracle(Modality m, double confidence, BoundingBox box, std::string label = "car")
      : DetectorOracle(m), confidence_(confidence), box_(box), label_(std::move(label)) {}
  bool concurrent_safe() const override { return true; }

 protected:
  std::vector<Detection> do_detect(const Image&) override { return {Detection{label_, confidence_, box_}}; }

 private:
  double confidence_;
  BoundingBox box_;
  std::string label_;
};

/// Reports full confidence at `box` until the n-th query (1-based), which fails.
class FailingOracle final : public DetectorOracle {
 public:
  FailingOracle(Modality m, int fail_at, BoundingBox box = {})
      : DetectorOracle(m), fail_at_(fail_at), box_(box) {}

 protected:
  std::vector<Detection> do_detect(const Image&) override {
    if (++calls_ >= fail_at_) throw std::runtime_error("backend down");
    return {Detection{"car", 1.0, box_}};
  }

 private:
  int fail_at_;
  BoundingBox box_;
  int calls_ = 0;
};

/// A loopback port that was free a moment ago and has nothing listening.
inline int closed_local_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

}  // namespace patchforge::testing

#endif  // PATCHFORGE_TEST_SUPPORT_HPP
