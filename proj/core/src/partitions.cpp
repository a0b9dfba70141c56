#include "railyard/partitions.hpp"

#include "railyard/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <sstream>

namespace railyard {

Partition::Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 0) throw InvalidInput("partition has a negative part");
    if (i > 0 && parts_[i] > parts_[i - 1]) throw InvalidInput("partition is not weakly decreasing");
    size_ += parts_[i];
  }
}

std::string Partition::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < parts_.size(); ++i) os << (i ? "," : "") << parts_[i];
  os << ')';
  return os.str();
}

std::size_t PartitionHash::operator()(const Partition& p) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (int v : p.parts()) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Partition conjugate(const Partition& lambda) {
  std::vector<int> c(lambda.empty() ? 0 : lambda[0], 0);
  for (int v : lambda.parts())
    for (int j = 0; j < v; ++j) ++c[j];
  return Partition(std::move(c));
}

bool interlaces(const Partition& lambda, const Partition& mu, bool conjugated) {
  if (conjugated) return interlaces(conjugate(lambda), conjugate(mu), false);
  const int n = std::max(lambda.length(), mu.length()) + 1;
  for (int i = 0; i < n; ++i) {
    if (lambda[i] < mu[i]) return false;
    if (mu[i] < lambda[i + 1]) return false;
  }
  return true;
}

bool contains(const Partition& lambda, const Partition& mu) {
  if (mu.length() > lambda.length()) return false;
  for (int i = 0; i < mu.length(); ++i)
    if (mu[i] > lambda[i]) return false;
  return true;
}

namespace {

void gen_partitions(int remaining, int max_part, int max_len, std::vector<int>& cur,
                    std::vector<Partition>& out) {
  if (remaining == 0) {
    out.emplace_back(cur);
    return;
  }
  if (max_len == 0) return;
  for (int v = std::min(remaining, max_part); v >= 1; --v) {
    cur.push_back(v);
    gen_partitions(remaining - v, v, max_len - 1, cur, out);
    cur.pop_back();
  }
}

} // namespace

std::vector<Partition> partitions_of(int n, int max_length) {
  std::vector<Partition> out;
  if (n < 0) return out;
  std::vector<int> cur;
  gen_partitions(n, n, max_length < 0 ? n + 1 : max_length, cur, out);
  return out;
}

std::vector<Partition> partitions_up_to(int n, int max_length) {
  std::vector<Partition> out;
  for (int k = 0; k <= n; ++k) {
    auto part = partitions_of(k, max_length);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

double CountingMeasure::moment(int k) const {
  double s = 0.0;
  for (double a : atoms) s += std::pow(a, k);
  return s / N;
}

CountingMeasure counting_measure(const Partition& lambda, int N) {
  if (N <= 0 || N < lambda.length()) throw InvalidInput("counting_measure: N smaller than l(lambda)");
  CountingMeasure m;
  m.N = N;
  m.atoms.reserve(N);
  for (int i = 1; i <= N; ++i) m.atoms.push_back(static_cast<double>(lambda[i - 1] + N - i) / N);
  return m;
}

namespace {

// h_0..h_rmax for the variables xs.
std::vector<double> complete_table(int rmax, const std::vector<double>& xs) {
  std::vector<double> h(std::max(rmax, 0) + 1, 0.0);
  h[0] = 1.0;
  for (double x : xs)
    for (int r = 1; r <= rmax; ++r) h[r] += x * h[r - 1];
  return h;
}

std::atomic<bool> warned_large_jt{false};

} // namespace

double complete_homogeneous(int r, const std::vector<double>& xs) {
  if (r < 0) return 0.0;
  return complete_table(r, xs)[r];
}

double skew_schur(const Partition& lambda, const Partition& mu, const std::vector<double>& xs) {
  if (!contains(lambda, mu)) return 0.0;
  const int n = lambda.length();
  if (n == 0) return 1.0;
  if (n > 25 && !warned_large_jt.exchange(true))
    std::cerr << "railyard: Jacobi-Trudi matrix of dimension " << n << " may be ill-conditioned\n";
  const auto h = complete_table(lambda[0] + n, xs);
  auto H = [&](int r) { return r < 0 ? 0.0 : h[r]; };
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = H(lambda[i] - mu[j] - i + j);
  return m.partialPivLu().determinant();
}

double schur(const Partition& lambda, const std::vector<double>& xs) {
  return skew_schur(lambda, Partition{}, xs);
}

double schur_principal(const Partition& lambda, int k) {
  if (k <= 0 || lambda.length() > k) {
    if (lambda.empty() && k >= 0) return 1.0;
    throw InvalidInput("schur_principal: l(lambda) > k");
  }
  double v = 1.0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      v *= static_cast<double>(lambda[i] - lambda[j] + j - i) / (j - i);
  return v;
}

double staircase_schur(int M, const std::vector<double>& xs) {
  if (M <= 0) throw InvalidInput("staircase_schur: M must be positive");
  double scale = 0.0;
  for (double x : xs) {
    if (!(x > 0)) throw InvalidInput("staircase_schur: weights must be positive");
    scale = std::max(scale, x);
  }
  double v = 1.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const double a = xs[i], b = xs[j];
      if (std::abs(a - b) < 1e-12 * scale) {
        v *= M * std::pow(0.5 * (a + b), M - 1);
      } else {
        v *= (std::pow(a, M) - std::pow(b, M)) / (a - b);
      }
    }
  return v;
}

Partition staircase_partition(int M, int N) {
  std::vector<int> p;
  for (int i = 0; i < N; ++i) p.push_back((M - 1) * (N - 1 - i));
  return Partition(std::move(p));
}

} // namespace railyard
