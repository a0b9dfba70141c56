#include "railyard/fock.hpp"

#include "railyard/covering.hpp"

#include <algorithm>
#include <cmath>

namespace railyard {

FockVector FockVector::basis(const Partition& lambda, int cap) {
  FockVector v(cap);
  v.add(lambda, 1.0);
  return v;
}

double FockVector::operator[](const Partition& lambda) const {
  auto it = coef_.find(lambda);
  return it == coef_.end() ? 0.0 : it->second;
}

void FockVector::add(const Partition& lambda, double c) {
  if (lambda.size() > cap_) return;
  coef_[lambda] += c;
}

namespace {

// mu_i in [lambda_{i+1}, lambda_i]
void below_rec(const Partition& lam, std::size_t i, std::vector<int>& cur, std::vector<Partition>& out) {
  if (static_cast<int>(i) >= lam.length()) {
    out.emplace_back(cur);
    return;
  }
  for (int v = lam[i + 1]; v <= lam[i]; ++v) {
    cur.push_back(v);
    below_rec(lam, i + 1, cur, out);
    cur.pop_back();
  }
}

// mu_1 >= lambda_1, mu_i in [lambda_i, lambda_{i-1}], total size <= budget
void above_rec(const Partition& lam, std::size_t i, int budget, std::vector<int>& cur, std::vector<Partition>& out) {
  const int n = lam.length();
  if (static_cast<int>(i) > n) {
    out.emplace_back(cur);
    return;
  }
  const int lo = lam[i];
  const int hi = i == 0 ? lo + budget : std::min(lam[i - 1], lo + budget);
  for (int v = lo; v <= hi; ++v) {
    cur.push_back(v);
    above_rec(lam, i + 1, budget - (v - lo), cur, out);
    cur.pop_back();
  }
}

} // namespace

std::vector<Partition> strips_below(const Partition& lambda, bool conjugated) {
  std::vector<Partition> out;
  std::vector<int> cur;
  if (conjugated) {
    below_rec(conjugate(lambda), 0, cur, out);
    for (auto& p : out) p = conjugate(p);
  } else {
    below_rec(lambda, 0, cur, out);
  }
  return out;
}

std::vector<Partition> strips_above(const Partition& lambda, bool conjugated, int cap) {
  std::vector<Partition> out;
  const int budget = cap - lambda.size();
  if (budget < 0) return out;
  std::vector<int> cur;
  if (conjugated) {
    above_rec(conjugate(lambda), 0, budget, cur, out);
    for (auto& p : out) p = conjugate(p);
  } else {
    above_rec(lambda, 0, budget, cur, out);
  }
  return out;
}

double matrix_element(SlotKind kind, double x, const Partition& lambda, const Partition& mu) {
  if (!slot_relation(kind, lambda, mu)) return 0.0;
  return std::pow(x, std::abs(mu.size() - lambda.size()));
}

FockVector gamma_apply(SlotKind kind, double x, const FockVector& v) {
  FockVector out(v.cap());
  const bool conj = kind.a == Letter::R;
  for (const auto& [lam, c] : v.coefficients()) {
    if (c == 0.0) continue;
    // As a ket operator, a + slot removes a strip and a - slot adds one.
    const auto targets = kind.b == Sign::Plus ? strips_below(lam, conj) : strips_above(lam, conj, v.cap());
    for (const auto& mu : targets) out.add(mu, c * std::pow(x, std::abs(lam.size() - mu.size())));
  }
  return out;
}

} // namespace railyard
