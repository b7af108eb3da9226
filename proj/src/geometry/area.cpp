#include "gscm/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace gscm {

namespace {

struct Segment {
  Point a;  // a.x() < b.x()
  Point b;
  int weight;

  double y_at(double x) const {
    const double t = std::clamp((x - a.x()) / (b.x() - a.x()), 0.0, 1.0);
    return a.y() + t * (b.y() - a.y());
  }
};

void collect(std::span<const Point> ring, int sign, std::vector<Segment>& out, std::vector<double>& events) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& u = ring[i];
    const Point& v = ring[(i + 1) % n];
    events.push_back(u.x());
    if (u.x() == v.x()) continue;
    if (u.x() < v.x()) {
      out.push_back({u, v, sign});
    } else {
      out.push_back({v, u, -sign});
    }
  }
}

// x coordinates where a segment of one ring properly crosses one of the other.
void crossing_events(const std::vector<Segment>& ps, const std::vector<Segment>& qs, std::vector<double>& events) {
  std::vector<const Segment*> sorted;
  sorted.reserve(qs.size());
  for (const auto& q : qs) sorted.push_back(&q);
  std::sort(sorted.begin(), sorted.end(), [](const Segment* l, const Segment* r) { return l->a.x() < r->a.x(); });
  for (const auto& p : ps) {
    const double pylo = std::min(p.a.y(), p.b.y());
    const double pyhi = std::max(p.a.y(), p.b.y());
    const Point r = p.b - p.a;
    for (const Segment* q : sorted) {
      if (q->a.x() > p.b.x()) break;
      if (q->b.x() < p.a.x()) continue;
      if (std::max(q->a.y(), q->b.y()) < pylo || std::min(q->a.y(), q->b.y()) > pyhi) continue;
      const Point s = q->b - q->a;
      const double denom = cross(r, s);
      if (denom == 0) continue;
      const Point w = q->a - p.a;
      const double t = cross(w, s) / denom;
      const double u = cross(w, r) / denom;
      if (t > 0 && t < 1 && u > 0 && u < 1) events.push_back(p.a.x() + t * r.x());
    }
  }
}

}  // namespace

double winding_difference_area(std::span<const Point> p, std::span<const Point> q) {
  std::vector<Segment> ps, qs;
  std::vector<double> events;
  collect(p, +1, ps, events);
  collect(q, -1, qs, events);
  crossing_events(ps, qs, events);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  std::vector<Segment> segs = std::move(ps);
  segs.insert(segs.end(), qs.begin(), qs.end());
  std::sort(segs.begin(), segs.end(), [](const Segment& l, const Segment& r) { return l.a.x() < r.a.x(); });

  struct Active {
    double ya, yb, ym;
    int weight;
  };
  std::vector<const Segment*> active;
  std::vector<Active> slab;
  std::size_t next = 0;
  double total = 0.0;
  for (std::size_t e = 0; e + 1 < events.size(); ++e) {
    const double xa = events[e];
    const double xb = events[e + 1];
    while (next < segs.size() && segs[next].a.x() <= xa) active.push_back(&segs[next++]);
    std::erase_if(active, [xa](const Segment* s) { return s->b.x() <= xa; });
    if (active.empty()) continue;
    const double xm = 0.5 * (xa + xb);
    slab.clear();
    for (const Segment* s : active) slab.push_back({s->y_at(xa), s->y_at(xb), s->y_at(xm), s->weight});
    std::sort(slab.begin(), slab.end(), [](const Active& l, const Active& r) { return l.ym < r.ym; });
    int w = 0;
    double strip = 0.0;
    for (std::size_t k = 0; k + 1 < slab.size(); ++k) {
      w += slab[k].weight;
      if (w == 0) continue;
      strip += std::abs(w) * ((slab[k + 1].ya - slab[k].ya) + (slab[k + 1].yb - slab[k].yb));
    }
    total += 0.5 * strip * (xb - xa);
  }
  return total;
}

double symmetric_difference_area(const Polygon& p, const Polygon& q) {
  if (p.size() < 3 || q.size() < 3) throw GeometryError("degenerate polygon");
  return winding_difference_area(p.vertices(), q.vertices());
}

}  // namespace gscm
