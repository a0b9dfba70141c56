#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace railyard {

// Weakly decreasing sequence of nonnegative integers. Trailing zeros are
// stripped on construction, so equality is on the normalized form.
class Partition {
public:
  Partition() = default;
  Partition(std::initializer_list<int> parts);
  explicit Partition(std::vector<int> parts);

  // 0-based access with implicit zero padding.
  int operator[](std::size_t i) const { return i < parts_.size() ? parts_[i] : 0; }
  int length() const { return static_cast<int>(parts_.size()); }
  int size() const { return size_; }
  bool empty() const { return parts_.empty(); }
  const std::vector<int>& parts() const { return parts_; }

  bool operator==(const Partition& o) const { return parts_ == o.parts_; }
  bool operator!=(const Partition& o) const { return parts_ != o.parts_; }
  bool operator<(const Partition& o) const { return parts_ < o.parts_; }

  std::string str() const;

private:
  std::vector<int> parts_;
  int size_ = 0;
};

struct PartitionHash {
  std::size_t operator()(const Partition& p) const noexcept;
};

Partition conjugate(const Partition& lambda);

// lambda_1 >= mu_1 >= lambda_2 >= mu_2 >= ... (lambda "succ" mu). With
// `conjugated` the test runs on conjugates.
bool interlaces(const Partition& lambda, const Partition& mu, bool conjugated = false);

bool contains(const Partition& lambda, const Partition& mu);

// All partitions of n, in reverse lexicographic order.
std::vector<Partition> partitions_of(int n, int max_length = -1);
// All partitions with |lambda| <= n.
std::vector<Partition> partitions_up_to(int n, int max_length = -1);

struct CountingMeasure {
  std::vector<double> atoms; // (lambda_i + N - i)/N, i = 1..N
  int N = 0;
  double moment(int k) const;
};

CountingMeasure counting_measure(const Partition& lambda, int N);

double complete_homogeneous(int r, const std::vector<double>& xs);

// Jacobi-Trudi determinant det(h_{lambda_i - mu_j - i + j}).
double skew_schur(const Partition& lambda, const Partition& mu, const std::vector<double>& xs);
double schur(const Partition& lambda, const std::vector<double>& xs);

// s_lambda(1,...,1) with k ones (Weyl dimension formula).
double schur_principal(const Partition& lambda, int k);

// prod_{i<j} (x_i^M - x_j^M)/(x_i - x_j), the Schur function of the
// staircase ((M-1)(N-1), ..., M-1, 0).
double staircase_schur(int M, const std::vector<double>& xs);
Partition staircase_partition(int M, int N);

} // namespace railyard
