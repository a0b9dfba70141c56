#include "railyard/covering.hpp"

#include "railyard/error.hpp"

#include <algorithm>
#include <cmath>

namespace railyard {

bool DimerCovering::pure() const {
  return !reference_ && seq_.front().empty() && seq_.back().empty();
}

bool slot_relation(SlotKind kind, const Partition& lambda, const Partition& mu) {
  const bool conj = kind.a == Letter::R;
  if (kind.b == Sign::Plus) return interlaces(mu, lambda, conj);
  return interlaces(lambda, mu, conj);
}

DimerCovering base_covering(const RailYardSpec& spec) {
  DimerCovering c;
  c.reference_ = true;
  c.l_ = spec.l();
  c.r_ = spec.r();
  c.ylo_ = -1;
  c.yhi_ = 1;
  return c;
}

DimerCovering empty_covering(const RailYardSpec& spec) {
  return covering_from_partitions(spec, std::vector<Partition>(spec.columns() + 1));
}

DimerCovering covering_from_partitions(const RailYardSpec& spec, std::vector<Partition> seq) {
  if (static_cast<int>(seq.size()) != spec.columns() + 1)
    throw InvalidInput("covering: expected r - l + 2 partitions");
  for (int m = spec.l(); m <= spec.r(); ++m) {
    const auto& lam = seq[m - spec.l()];
    const auto& mu = seq[m - spec.l() + 1];
    if (!slot_relation(spec.kind(m), lam, mu))
      throw InvalidInput("covering: partitions " + lam.str() + " and " + mu.str() +
                         " violate the relation of slot " + std::to_string(m));
  }
  DimerCovering c;
  c.l_ = spec.l();
  c.r_ = spec.r();
  int len = 0, top = 0;
  for (const auto& p : seq) {
    len = std::max(len, p.length());
    top = std::max(top, p[0]);
  }
  c.ylo_ = -len - 2;
  c.yhi_ = top + 2;
  c.seq_ = std::move(seq);
  return c;
}

namespace {

void check_same_graph(const RailYardSpec& spec, const DimerCovering& cov) {
  if (cov.l() != spec.l() || cov.r() != spec.r()) throw InvalidInput("covering does not belong to this graph");
}

// True at index k if height lo + 1/2 + k carries a particle.
std::vector<bool> occupancy(const Partition& lam, int lo, int hi) {
  std::vector<bool> occ(hi - lo, false);
  for (int i = 1;; ++i) {
    const int k = lam[i - 1] - i - lo; // height lam_i - i + 1/2
    if (k < 0) break;
    if (k < hi - lo) occ[k] = true;
  }
  return occ;
}

} // namespace

std::vector<EvenState> even_states(const RailYardSpec& spec, const DimerCovering& cov, int m, int y_lo,
                                   int y_hi) {
  check_same_graph(spec, cov);
  if (m < spec.l() || m > spec.r()) throw InvalidInput("even_states: column out of range");
  const int n = y_hi - y_lo;
  std::vector<EvenState> st(n, EvenState::HRight);
  if (cov.reference()) return st;

  // Work on a window that contains both the requested range and the
  // covering's own window so that counts balance.
  const int lo = std::min(y_lo, cov.y_min());
  const int hi = std::max(y_hi, cov.y_max());
  const auto left = occupancy(cov.partitions()[m - spec.l()], lo, hi);
  const auto right = occupancy(cov.partitions()[m - spec.l() + 1], lo, hi);
  std::vector<EvenState> full(hi - lo, EvenState::HRight);
  const SlotKind kind = spec.kind(m);
  const int shift = kind.b == Sign::Plus ? 1 : -1;

  std::vector<int> ls, rs;
  if (kind.a == Letter::L) {
    // right particles go horizontal; left holes pair with right holes
    for (int k = hi - lo - 1; k >= 0; --k) {
      if (!left[k]) ls.push_back(k);
      if (!right[k]) rs.push_back(k);
    }
  } else {
    // left holes go horizontal; left particles pair with right particles
    for (int k = hi - lo - 1; k >= 0; --k) {
      if (!left[k]) full[k] = EvenState::HLeft;
      if (left[k]) ls.push_back(k);
      if (right[k]) rs.push_back(k);
    }
  }
  if (ls.size() != rs.size()) throw InvalidInput("even_states: unbalanced column");
  for (std::size_t q = 0; q < ls.size(); ++q) {
    const int a = ls[q], b = rs[q];
    if (kind.a == Letter::L) {
      // even vertex sits at the right hole b
      if (a == b) full[b] = EvenState::HLeft;
      else if (a - b == shift) full[b] = EvenState::Diag;
      else throw InvalidInput("even_states: left hole cannot be matched");
    } else {
      // even vertex sits at the left particle a
      if (a == b) full[a] = EvenState::HRight;
      else if (b - a == shift) full[a] = EvenState::Diag;
      else throw InvalidInput("even_states: right particle cannot be matched");
    }
  }
  for (int k = 0; k < n; ++k) st[k] = full[k + y_lo - lo];
  return st;
}

std::vector<DiagonalEdge> diagonal_edges(const RailYardSpec& spec, const DimerCovering& cov) {
  std::vector<DiagonalEdge> out;
  if (cov.reference()) return out;
  for (int m = spec.l(); m <= spec.r(); ++m) {
    const auto st = even_states(spec, cov, m, cov.y_min(), cov.y_max());
    for (std::size_t k = 0; k < st.size(); ++k)
      if (st[k] == EvenState::Diag) out.push_back({m, cov.y_min() + 0.5 + static_cast<double>(k)});
  }
  return out;
}

std::vector<int> diagonal_counts(const RailYardSpec& spec, const DimerCovering& cov) {
  std::vector<int> d(spec.columns(), 0);
  for (const auto& e : diagonal_edges(spec, cov)) ++d[e.column - spec.l()];
  return d;
}

double covering_weight(const RailYardSpec& spec, const std::vector<int>& counts) {
  if (static_cast<int>(counts.size()) != spec.columns()) throw InvalidInput("covering_weight: wrong count vector");
  double w = 1.0;
  for (int i = spec.l(); i <= spec.r(); ++i) {
    const int d = counts[i - spec.l()];
    if (d < 0) throw InvalidInput("covering_weight: negative count");
    w *= std::pow(spec.x(i), d);
  }
  return w;
}

double covering_weight(const RailYardSpec& spec, const DimerCovering& cov) {
  return covering_weight(spec, diagonal_counts(spec, cov));
}

namespace {

bool is_half_integer(double y) { return std::abs(y - std::floor(y) - 0.5) < 1e-12; }
bool is_integer(double y) { return std::abs(y - std::round(y)) < 1e-12; }

// Resolve x = 2m - 1/2 (odd_left) or 2m + 1/2.
struct Line {
  int m;
  bool odd_left;
};

Line resolve_line(const RailYardSpec& spec, double x) {
  const double u = x + 0.5;
  if (is_integer(u) && static_cast<long>(std::llround(u)) % 2 == 0) {
    const int m = static_cast<int>(std::llround(u)) / 2;
    if (m >= spec.l() && m <= spec.r()) return {m, true};
  }
  const double v = x - 0.5;
  if (is_integer(v) && static_cast<long>(std::llround(v)) % 2 == 0) {
    const int m = static_cast<int>(std::llround(v)) / 2;
    if (m >= spec.l() && m <= spec.r()) return {m, false};
  }
  throw InvalidInput("height: x must be 2m - 1/2 or 2m + 1/2 with m in [l..r]");
}

void check_face(const RailYardSpec& spec, const Line& line, double y) {
  if (is_half_integer(y)) throw InvalidInput("height: point lies on a horizontal edge");
  const Letter diag_letter = line.odd_left ? Letter::L : Letter::R;
  if (spec.a(line.m) == diag_letter && is_integer(y))
    throw InvalidInput("height: point lies on a diagonal edge");
}

} // namespace

int height(const RailYardSpec& spec, const DimerCovering& cov, double x, double y) {
  check_same_graph(spec, cov);
  const Line line = resolve_line(spec, x);
  check_face(spec, line, y);
  if (cov.reference()) return 0;
  const int lo = cov.y_min();
  const int hi = std::max(cov.y_max(), static_cast<int>(std::ceil(y)) + 1);
  const auto st = even_states(spec, cov, line.m, lo, hi);
  const SlotKind kind = spec.kind(line.m);
  const double diag_offset = kind.b == Sign::Plus ? 0.5 : -0.5;
  int horiz = 0, diag = 0;
  for (std::size_t k = 0; k < st.size(); ++k) {
    const double ye = lo + 0.5 + static_cast<double>(k);
    if (line.odd_left) {
      if (ye < y && st[k] == EvenState::HLeft) ++horiz;
      if (kind.a == Letter::L && st[k] == EvenState::Diag && ye + diag_offset < y) ++diag;
    } else {
      if (ye < y && st[k] != EvenState::HRight) ++horiz; // absent right edge
      if (kind.a == Letter::R && st[k] == EvenState::Diag && ye + diag_offset < y) ++diag;
    }
  }
  return line.odd_left ? 2 * (horiz + diag) : 2 * (horiz - diag);
}

namespace {

struct Pt {
  double x, y;
};

// Signed increment of the preliminary height when crossing an edge.
int crossing_increment(bool present, bool diagonal, bool odd_on_left) {
  int v = present ? (diagonal ? 2 : 1) : (diagonal ? 0 : -1);
  return odd_on_left ? v : -v;
}

// Intersection parameter s along segment a->b with edge p->q, if any.
bool intersect(Pt a, Pt b, Pt p, Pt q, double& s, Pt& c) {
  const double rx = b.x - a.x, ry = b.y - a.y;
  const double ex = q.x - p.x, ey = q.y - p.y;
  const double den = rx * ey - ry * ex;
  if (std::abs(den) < 1e-15) return false;
  const double wx = p.x - a.x, wy = p.y - a.y;
  s = (wx * ey - wy * ex) / den;
  const double t = (wx * ry - wy * rx) / den;
  if (s <= 0.0 || s >= 1.0 || t < 0.0 || t > 1.0) return false;
  if (t < 1e-12 || t > 1.0 - 1e-12) throw InvalidInput("height_incremental: path hits a vertex");
  c = {a.x + s * rx, a.y + s * ry};
  return true;
}

} // namespace

int height_incremental(const RailYardSpec& spec, const DimerCovering& cov, double x, double y) {
  check_same_graph(spec, cov);
  const Line line = resolve_line(spec, x);
  check_face(spec, line, y);
  const Line first{spec.l(), true};
  check_face(spec, first, y);

  const double x0 = 2.0 * spec.l() - 0.5;
  const double y0 = std::min<double>(cov.y_min(), std::floor(y)) - 0.25;
  const Pt path[3] = {{x0, y0}, {x0, y}, {x, y}};

  const int lo = static_cast<int>(std::floor(y0)) - 2;
  const int hi = std::max(cov.y_max(), static_cast<int>(std::ceil(y))) + 2;
  int h = 0;
  for (int m = spec.l(); m <= spec.r(); ++m) {
    const auto st = even_states(spec, cov, m, lo, hi);
    const SlotKind kind = spec.kind(m);
    const double dy = kind.b == Sign::Plus ? 1.0 : -1.0;
    const double dx = kind.a == Letter::L ? -1.0 : 1.0;
    for (int k = 0; k < hi - lo; ++k) {
      const double ye = lo + 0.5 + k;
      const Pt even{2.0 * m, ye};
      struct E {
        Pt odd;
        bool diagonal, present, ref_present;
      };
      const E edges[3] = {
          {{2.0 * m - 1, ye}, false, st[k] == EvenState::HLeft, false},
          {{2.0 * m + 1, ye}, false, st[k] == EvenState::HRight, true},
          {{2.0 * m + dx, ye + dy}, true, st[k] == EvenState::Diag, false},
      };
      for (const auto& e : edges) {
        for (int seg = 0; seg < 2; ++seg) {
          double s;
          Pt c;
          if (!intersect(path[seg], path[seg + 1], even, e.odd, s, c)) continue;
          const double mx = path[seg + 1].x - path[seg].x, my = path[seg + 1].y - path[seg].y;
          const double cross = mx * (e.odd.y - c.y) - my * (e.odd.x - c.x);
          const bool left = cross > 0;
          h += crossing_increment(e.present, e.diagonal, left) - crossing_increment(e.ref_present, e.diagonal, left);
        }
      }
    }
  }
  return h;
}

ColumnProfile profile_of(const Partition& lambda, int m, int y_lo, int y_hi) {
  ColumnProfile p;
  p.m = m;
  p.y_lo = y_lo;
  p.particle = occupancy(lambda, y_lo, y_hi);
  // everything below the window must be particles: require the window to reach
  if (lambda.length() + 1 > -y_lo || lambda[0] + 1 > y_hi)
    throw InvalidInput("profile_of: window too small for partition " + lambda.str());
  return p;
}

Partition partition_of(const ColumnProfile& profile) {
  // parts: holes below the i-th highest particle
  std::vector<int> parts;
  int holes = 0;
  std::vector<int> below; // holes counted from the bottom
  for (std::size_t k = 0; k < profile.particle.size(); ++k) {
    if (profile.particle[k]) below.push_back(holes);
    else ++holes;
  }
  for (auto it = below.rbegin(); it != below.rend(); ++it) parts.push_back(*it);
  return Partition(std::move(parts));
}

int charge(const ColumnProfile& profile) {
  int c = 0;
  for (std::size_t k = 0; k < profile.particle.size(); ++k) {
    const double y = profile.y_lo + 0.5 + static_cast<double>(k);
    if (y > 0 && profile.particle[k]) ++c;
    if (y < 0 && !profile.particle[k]) --c;
  }
  return c;
}

ColumnProfile column_profile(const RailYardSpec& spec, const DimerCovering& cov, int m) {
  check_same_graph(spec, cov);
  if (cov.reference()) throw InvalidInput("column_profile: the reference pattern has no partition encoding");
  if (m < spec.l() || m > spec.r() + 1) throw InvalidInput("column_profile: m out of [l..r+1]");
  return profile_of(cov.partitions()[m - spec.l()], m, cov.y_min(), cov.y_max());
}

Partition column_partition(const RailYardSpec& spec, const DimerCovering& cov, int m) {
  return partition_of(column_profile(spec, cov, m));
}

int charge(const RailYardSpec& spec, const DimerCovering& cov, int m) { return charge(column_profile(spec, cov, m)); }

} // namespace railyard
