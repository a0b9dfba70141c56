#pragma once

#include "railyard/covering.hpp"
#include "railyard/fock.hpp"

#include <atomic>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace railyard {

struct BoundaryPair {
  Partition left;
  Partition right;
};

// <left| Gamma_l ... Gamma_r |right> with every intermediate vector truncated
// at |lambda| <= cap. Nondecreasing in cap.
double partition_function_transfer(const RailYardSpec& spec, const BoundaryPair& boundary, int cap);

struct TransferEstimate {
  double value = 0.0;
  int cap = 0;
  double relative_change = 0.0; // between the last two caps
  bool converged = false;
};

// Doubles the cap from `cap` until the relative change drops below `tol`.
TransferEstimate partition_function_auto(const RailYardSpec& spec, const BoundaryPair& boundary, int cap = 40,
                                         double tol = 1e-10, int max_cap = 160);

// Closed form s_lambda(x^(L,-)) * prod z_ij (variant 1, no (R,-) slots) or
// s_lambda'(x^(R,-)) * prod z_ij (variant 2, no (L,-) slots). With an empty
// boundary partition the slot restriction is not needed.
double partition_function_product(const RailYardSpec& spec, const Partition& left, int variant = 1);

// Per-draw generator: the stream for draw i depends only on (seed, i).
std::mt19937_64 draw_rng(std::uint64_t seed, std::uint64_t index);

// Exact sequential sampler with right boundary empty. Conditional weights at
// column k are <lambda|Gamma_k|mu> R_{k+1}(mu) where R_k = Gamma_k ... Gamma_r |0>.
class TransferSampler {
public:
  TransferSampler(const RailYardSpec& spec, const Partition& left, int cap = 40);

  std::vector<Partition> draw_sequence(std::mt19937_64& rng) const;
  DimerCovering draw(std::mt19937_64& rng) const;

  double partition_function() const;
  // Largest |sum of conditional weights / R_k(lambda) - 1| seen so far.
  double max_conservation_error() const { return max_err_.load(std::memory_order_relaxed); }

private:
  RailYardSpec spec_;
  Partition left_;
  int cap_;
  std::vector<FockVector> right_; // right_[k - l] = R_k, k in [l..r+1]
  mutable std::atomic<double> max_err_{0.0}; // draws may run concurrently
};

std::vector<DimerCovering> sample(const RailYardSpec& spec, const Partition& left, std::uint64_t seed, int count,
                                  int cap = 40, int threads = 1);

// Exact sampler for empty boundaries on both sides, built by commuting the
// + operators leftward through the - operators one swap at a time and
// resampling the middle partition of each swapped pair. Does not truncate,
// so it scales to long graphs.
std::vector<Partition> sample_shuffle_sequence(const RailYardSpec& spec, std::mt19937_64& rng);
std::vector<std::vector<Partition>> sample_shuffle(const RailYardSpec& spec, std::uint64_t seed, int count,
                                                   int threads = 1);

struct EnumeratedCovering {
  std::vector<Partition> sequence;
  double weight = 0.0;
};

// All partition sequences from `left` to the empty partition whose members
// have size <= max_size, with their weights.
std::vector<EnumeratedCovering> enumerate_coverings(const RailYardSpec& spec, const Partition& left, int max_size);

// Schur generating function of the partition just right of slot t, with the
// (L,-) slots j > t evaluated at u[j] (missing entries default to x_j).
double schur_generating_fn(const RailYardSpec& spec, const Partition& left, int t, const std::map<int, double>& u);

int default_threads();

} // namespace railyard
