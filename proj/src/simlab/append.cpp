#include "gscm/simlab.hpp"

namespace gscm {

void AppendSpec::validate() const {
  if (loops_lo < 0 || loops_hi < loops_lo) throw ModelError("loop count range must satisfy 0 <= lo <= hi");
  if (!(offset_lo > 0 && offset_hi >= offset_lo)) throw ModelError("offset range must be positive and ordered");
  if (!(width_lo > 0 && width_hi >= width_lo)) throw ModelError("width range must be positive and ordered");
  if (max_retries < 1) throw ModelError("at least one attempt is needed");
}

Polygon append_strip(const LineSet& lines, const VecX& lengths, int start, int loops, double offset, double width) {
  const int p = lines.size();
  if (lengths.size() != p) throw ModelError("length vector does not match the line set");
  if (loops < 1 || loops + 2 > p) throw ModelError("loop count must lie in [1, p - 2]");
  auto wrap = [p](int k) { return ((k % p) + p) % p; };
  auto at = [&](int k, double extra) {
    const int i = wrap(k);
    return Point(lines.center() + (lengths[i] + extra) * lines.direction(i));
  };
  const int a = start + loops;  // connector lies between lines a and a + 1

  std::vector<Point> pts;
  pts.reserve(p + 2 * (loops + 2));
  for (int k = a + 1; k <= a + p; ++k) pts.push_back(at(k, 0.0));
  for (int k = a; k >= start; --k) pts.push_back(at(k, offset));
  for (int k = start; k <= a + 1; ++k) pts.push_back(at(k, offset + width));
  return Polygon(std::move(pts));
}

Polygon append_section(const LineSet& lines, const VecX& lengths, const AppendSpec& spec, Rng& rng) {
  spec.validate();
  const int p = lines.size();
  for (int attempt = 0; attempt < spec.max_retries; ++attempt) {
    const int loops = static_cast<int>(rng.uniform_int(spec.loops_lo, spec.loops_hi));
    if (loops == 0) return points_from_lengths(lines, lengths);
    int start = spec.fixed_index >= 0 ? spec.fixed_index : p / 4;
    if (!spec.fixed_location) start = static_cast<int>(rng.uniform_int(0, p - 1));
    const double offset = rng.uniform(spec.offset_lo, spec.offset_hi);
    const double width = rng.uniform(spec.width_lo, spec.width_hi);
    try {
      Polygon out = append_strip(lines, lengths, start, loops, offset, width);
      if (spec.window.covers(out.bounds())) return out;
    } catch (const GeometryError&) {
    }
  }
  throw GeometryError("could not place an appended section inside the window");
}

}  // namespace gscm
