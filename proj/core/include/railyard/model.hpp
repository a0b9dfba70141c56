#pragma once

#include "railyard/spec.hpp"

#include <vector>

namespace railyard {

struct PeriodicSlot {
  Letter a;
  Sign b;
  double x;    // 0 stands for a weight that vanishes in the limit
  double zeta; // density of this slot within its segment
};

// Periodic scaling data: segment p in [1..m] covers the scaled interval
// [V_{p-1}, V_p] and repeats its n_p slots.
class AsymptoticModel {
public:
  AsymptoticModel() = default;
  // Canonical model: zeta = 1/n_p for every slot.
  AsymptoticModel(std::vector<double> V, std::vector<std::vector<PeriodicSlot>> segments);

  int m() const { return static_cast<int>(segments_.size()); }
  double V(int p) const { return V_.at(p); }
  int n(int p) const { return static_cast<int>(segments_.at(p - 1).size()); }
  const std::vector<PeriodicSlot>& segment(int p) const { return segments_.at(p - 1); }
  // (V_p - V_{p-1}) / (V_m - V_0)
  double segment_weight(int p) const { return (V_[p] - V_[p - 1]) / (V_.back() - V_.front()); }

  // Single segment on [0, 1] with the given slots.
  static AsymptoticModel single(const std::string& letters, const std::string& signs, const std::vector<double>& x);

private:
  std::vector<double> V_;
  std::vector<std::vector<PeriodicSlot>> segments_;
};

// A column position: segment p_t in [1..m] and the fraction alpha in [0,1]
// travelled through it.
struct ObservationPoint {
  int pt = 1;
  double alpha = 0.0;
  double chi(const AsymptoticModel& model) const {
    return model.V(pt - 1) + alpha * (model.V(pt) - model.V(pt - 1));
  }
};

ObservationPoint observe(const AsymptoticModel& model, double chi);

// Finite graph with slots indexed [0..N]; slot i lies in the segment
// containing V_0 + (V_m - V_0) i / N and takes pattern entry
// (i - first slot of the segment) mod n_p. Zero weights become `tiny`.
RailYardSpec realize(const AsymptoticModel& model, int N, double tiny = 1e-8);
// Column index in the realized graph closest to chi.
int realized_column(const AsymptoticModel& model, int N, double chi);

} // namespace railyard
