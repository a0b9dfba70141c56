#include "railyard/model.hpp"

#include "railyard/error.hpp"

#include <algorithm>
#include <cmath>

namespace railyard {

AsymptoticModel::AsymptoticModel(std::vector<double> V, std::vector<std::vector<PeriodicSlot>> segments)
    : V_(std::move(V)), segments_(std::move(segments)) {
  if (segments_.empty() || V_.size() != segments_.size() + 1)
    throw InvalidInput("model: need m >= 1 segments and m + 1 breakpoints");
  for (std::size_t p = 0; p + 1 < V_.size(); ++p)
    if (!(V_[p] < V_[p + 1])) throw InvalidInput("model: breakpoints must increase");
  for (auto& seg : segments_) {
    if (seg.empty()) throw InvalidInput("model: empty segment");
    for (auto& s : seg) {
      if (!(s.x >= 0.0)) throw InvalidInput("model: weights must be nonnegative");
      if (s.zeta < 0.0) s.zeta = 1.0 / static_cast<double>(seg.size());
    }
  }
}

AsymptoticModel AsymptoticModel::single(const std::string& letters, const std::string& signs,
                                        const std::vector<double>& x) {
  if (letters.size() != signs.size() || letters.size() != x.size())
    throw InvalidInput("model: pattern lengths differ");
  std::vector<PeriodicSlot> seg;
  for (std::size_t i = 0; i < x.size(); ++i)
    seg.push_back({letter_from_char(letters[i]), sign_from_char(signs[i]), x[i], 1.0 / static_cast<double>(x.size())});
  return AsymptoticModel({0.0, 1.0}, {seg});
}

ObservationPoint observe(const AsymptoticModel& model, double chi) {
  if (chi < model.V(0) - 1e-12 || chi > model.V(model.m()) + 1e-12)
    throw InvalidInput("observe: chi outside [V_0, V_m]");
  for (int p = 1; p <= model.m(); ++p) {
    if (chi <= model.V(p) || p == model.m()) {
      const double a = (chi - model.V(p - 1)) / (model.V(p) - model.V(p - 1));
      return {p, std::clamp(a, 0.0, 1.0)};
    }
  }
  return {model.m(), 1.0};
}

RailYardSpec realize(const AsymptoticModel& model, int N, double tiny) {
  if (N < 1) throw InvalidInput("realize: N must be positive");
  const double v0 = model.V(0), span = model.V(model.m()) - v0;
  std::vector<Letter> a;
  std::vector<Sign> b;
  std::vector<double> x;
  int seg_start = 0, cur = 1;
  for (int i = 0; i <= N; ++i) {
    const double pos = v0 + span * i / N;
    int p = 1;
    while (p < model.m() && pos >= model.V(p) - 1e-12) ++p;
    if (p != cur) {
      cur = p;
      seg_start = i;
    }
    const auto& s = model.segment(p)[(i - seg_start) % model.n(p)];
    a.push_back(s.a);
    b.push_back(s.b);
    x.push_back(s.x > 0.0 ? s.x : tiny);
  }
  return build(0, N, std::move(a), std::move(b), std::move(x));
}

int realized_column(const AsymptoticModel& model, int N, double chi) {
  const double f = (chi - model.V(0)) / (model.V(model.m()) - model.V(0));
  return static_cast<int>(std::lround(f * N));
}

} // namespace railyard
