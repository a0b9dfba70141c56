#pragma once

#include "railyard/partitions.hpp"
#include "railyard/spec.hpp"

#include <unordered_map>
#include <vector>

namespace railyard {

// Finite linear combination of basis vectors |lambda> with |lambda| <= cap.
class FockVector {
public:
  using Map = std::unordered_map<Partition, double, PartitionHash>;

  explicit FockVector(int cap = 40) : cap_(cap) {}
  static FockVector basis(const Partition& lambda, int cap);

  int cap() const { return cap_; }
  double operator[](const Partition& lambda) const;
  // Adds c to the coefficient of lambda; ignored when |lambda| > cap.
  void add(const Partition& lambda, double c);
  const Map& coefficients() const { return coef_; }
  std::size_t size() const { return coef_.size(); }

private:
  int cap_;
  Map coef_;
};

// Partitions mu with mu < lambda (lambda / mu a horizontal strip), or the
// conjugate relation when `conjugated`.
std::vector<Partition> strips_below(const Partition& lambda, bool conjugated);
// Partitions mu > lambda with |mu| <= cap.
std::vector<Partition> strips_above(const Partition& lambda, bool conjugated, int cap);

// <lambda| Gamma_{a,b}(x) |mu>.
double matrix_element(SlotKind kind, double x, const Partition& lambda, const Partition& mu);

// Gamma_{a,b}(x) acting on a ket, truncated to v.cap().
FockVector gamma_apply(SlotKind kind, double x, const FockVector& v);

} // namespace railyard
