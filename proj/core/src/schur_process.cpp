#include "railyard/schur_process.hpp"

#include "railyard/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace railyard {

double partition_function_transfer(const RailYardSpec& spec, const BoundaryPair& boundary, int cap) {
  if (cap < boundary.left.size() || cap < boundary.right.size())
    throw InvalidInput("partition_function_transfer: cap smaller than a boundary partition");
  FockVector v = FockVector::basis(boundary.right, cap);
  for (int i = spec.r(); i >= spec.l(); --i) v = gamma_apply(spec.kind(i), spec.x(i), v);
  return v[boundary.left];
}

TransferEstimate partition_function_auto(const RailYardSpec& spec, const BoundaryPair& boundary, int cap, double tol,
                                         int max_cap) {
  TransferEstimate est;
  est.cap = cap;
  est.value = partition_function_transfer(spec, boundary, cap);
  est.relative_change = std::numeric_limits<double>::infinity();
  while (2 * est.cap <= max_cap) {
    const int next = 2 * est.cap;
    const double v = partition_function_transfer(spec, boundary, next);
    est.relative_change = std::abs(v - est.value) / std::max(std::abs(v), std::numeric_limits<double>::min());
    est.value = v;
    est.cap = next;
    if (est.relative_change < tol) {
      est.converged = true;
      break;
    }
  }
  return est;
}

double partition_function_product(const RailYardSpec& spec, const Partition& left, int variant) {
  if (variant != 1 && variant != 2) throw InvalidInput("partition_function_product: variant must be 1 or 2");
  const double z0 = spec.pair_product();
  if (left.empty()) return z0;
  if (variant == 1) {
    if (!spec.indices_of(Letter::R, Sign::Minus).empty())
      throw InvalidInput("partition_function_product: variant 1 needs a graph without (R,-) slots");
    const auto xs = spec.weights_of(Letter::L, Sign::Minus);
    if (left.length() > static_cast<int>(xs.size()))
      throw InvalidInput("partition_function_product: l(lambda) exceeds the number of (L,-) slots");
    return schur(left, xs) * z0;
  }
  if (!spec.indices_of(Letter::L, Sign::Minus).empty())
    throw InvalidInput("partition_function_product: variant 2 needs a graph without (L,-) slots");
  const auto xs = spec.weights_of(Letter::R, Sign::Minus);
  const Partition lc = conjugate(left);
  if (lc.length() > static_cast<int>(xs.size()))
    throw InvalidInput("partition_function_product: l(lambda') exceeds the number of (R,-) slots");
  return schur(lc, xs) * z0;
}

std::mt19937_64 draw_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x52594744u};
  return std::mt19937_64(seq);
}

int default_threads() {
  if (const char* env = std::getenv("RAILYARD_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// Runs body(i) for i in [0, count) on `threads` workers with static chunks.
template <class F>
void parallel_for(int count, int threads, F&& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < count; i += threads) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

} // namespace

TransferSampler::TransferSampler(const RailYardSpec& spec, const Partition& left, int cap)
    : spec_(spec), left_(left), cap_(cap) {
  if (left.size() > cap) throw InvalidInput("sample: cap too small to cover the left boundary");
  right_.assign(spec.columns() + 1, FockVector(cap));
  right_.back() = FockVector::basis(Partition{}, cap);
  for (int k = spec.r(); k >= spec.l(); --k)
    right_[k - spec.l()] = gamma_apply(spec.kind(k), spec.x(k), right_[k - spec.l() + 1]);
  if (!(right_.front()[left_] > 0.0)) throw InvalidInput("sample: left boundary has zero partition function");
}

double TransferSampler::partition_function() const { return right_.front()[left_]; }

std::vector<Partition> TransferSampler::draw_sequence(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Partition> seq{left_};
  Partition lam = left_;
  double worst = 0.0;
  for (int k = spec_.l(); k <= spec_.r(); ++k) {
    const SlotKind kind = spec_.kind(k);
    const bool conj = kind.a == Letter::R;
    const auto cands = kind.b == Sign::Plus ? strips_above(lam, conj, cap_) : strips_below(lam, conj);
    const FockVector& next = right_[k - spec_.l() + 1];
    std::vector<double> w(cands.size());
    double total = 0.0;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      w[c] = std::pow(spec_.x(k), std::abs(cands[c].size() - lam.size())) * next[cands[c]];
      total += w[c];
    }
    const double expect = right_[k - spec_.l()][lam];
    worst = std::max(worst, std::abs(total / expect - 1.0));
    double target = unif(rng) * total;
    std::size_t pick = cands.size();
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (w[c] <= 0.0) continue;
      pick = c;
      target -= w[c];
      if (target < 0.0) break;
    }
    if (pick == cands.size()) throw NumericalFailure("sample: no admissible transition");
    lam = cands[pick];
    seq.push_back(lam);
  }
  double seen = max_err_.load(std::memory_order_relaxed);
  while (worst > seen && !max_err_.compare_exchange_weak(seen, worst, std::memory_order_relaxed)) {
  }
  return seq;
}

DimerCovering TransferSampler::draw(std::mt19937_64& rng) const {
  return covering_from_partitions(spec_, draw_sequence(rng));
}

std::vector<DimerCovering> sample(const RailYardSpec& spec, const Partition& left, std::uint64_t seed, int count,
                                  int cap, int threads) {
  TransferSampler sampler(spec, left, cap);
  std::vector<std::vector<Partition>> seqs(count);
  parallel_for(count, threads, [&](int i) {
    auto rng = draw_rng(seed, static_cast<std::uint64_t>(i));
    seqs[i] = sampler.draw_sequence(rng);
  });
  std::vector<DimerCovering> out;
  out.reserve(count);
  for (auto& s : seqs) out.push_back(covering_from_partitions(spec, std::move(s)));
  return out;
}

namespace {

// k in [lo, hi] with P(k) proportional to q^k; hi < 0 means unbounded.
int truncated_geometric(int lo, int hi, double q, std::mt19937_64& rng) {
  if (hi >= 0 && hi < lo) throw NumericalFailure("shuffle: empty row interval");
  if (hi == lo || q <= 0.0) return lo;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  if (hi < 0) {
    if (q >= 1.0) throw NumericalFailure("shuffle: divergent row weight");
    return lo + static_cast<int>(std::floor(std::log1p(-u) / std::log(q)));
  }
  const int n = hi - lo + 1;
  if (std::abs(q - 1.0) < 1e-12) return lo + std::min(n - 1, static_cast<int>(u * n));
  // CDF(k) = (1 - q^(k+1)) / (1 - q^n)
  const double qn = std::pow(q, n);
  const double k = std::floor(std::log1p(-u * (1.0 - qn)) / std::log(q));
  return lo + std::clamp(static_cast<int>(k), 0, n - 1);
}

// Middle partition between a horizontal-strip addition and a horizontal-strip
// removal: lambda < mu > nu.
Partition resample_ll(const Partition& lam, const Partition& nu, double q, std::mt19937_64& rng) {
  const int rows = std::max(lam.length(), nu.length()) + 1;
  std::vector<int> mu(rows);
  for (int i = 0; i < rows; ++i) {
    const int lo = std::max(lam[i], nu[i]);
    const int hi = i == 0 ? -1 : std::min(lam[i - 1], nu[i - 1]);
    mu[i] = truncated_geometric(lo, hi, q, rng);
  }
  return Partition(std::move(mu));
}

Partition resample_middle(Letter plus, Letter minus, const Partition& lam, const Partition& nu, double q,
                          std::mt19937_64& rng) {
  if (plus == Letter::L && minus == Letter::L) return resample_ll(lam, nu, q, rng);
  if (plus == Letter::R && minus == Letter::R) return conjugate(resample_ll(conjugate(lam), conjugate(nu), q, rng));
  const int rows = std::max(lam.length(), nu.length()) + 1;
  std::vector<int> mu(rows);
  for (int i = 0; i < rows; ++i) {
    const int lo = std::max(lam[i], nu[i]);
    int hi;
    if (plus == Letter::L) {
      // lambda < mu horizontally, mu / nu a vertical strip
      hi = nu[i] + 1;
      if (i > 0) hi = std::min(hi, lam[i - 1]);
    } else {
      // mu / lambda a vertical strip, mu > nu horizontally
      hi = lam[i] + 1;
      if (i > 0) hi = std::min(hi, nu[i - 1]);
    }
    mu[i] = truncated_geometric(lo, hi, q, rng);
  }
  return Partition(std::move(mu));
}

} // namespace

std::vector<Partition> sample_shuffle_sequence(const RailYardSpec& spec, std::mt19937_64& rng) {
  std::vector<int> ops;
  for (int i = spec.l(); i <= spec.r(); ++i)
    if (spec.b(i) == Sign::Minus) ops.push_back(i);
  std::vector<int> plus;
  for (int i = spec.l(); i <= spec.r(); ++i)
    if (spec.b(i) == Sign::Plus) plus.push_back(i);
  ops.insert(ops.end(), plus.begin(), plus.end());
  std::vector<Partition> parts(ops.size() + 1);

  std::size_t pos = ops.size() - plus.size();
  for (int p : plus) {
    std::size_t cur = pos;
    while (cur > 0 && spec.b(ops[cur - 1]) == Sign::Minus && ops[cur - 1] > p) {
      const int m = ops[cur - 1];
      std::swap(ops[cur - 1], ops[cur]);
      parts[cur] = resample_middle(spec.a(p), spec.a(m), parts[cur - 1], parts[cur + 1], spec.x(p) * spec.x(m), rng);
      --cur;
    }
    ++pos;
  }
  return parts;
}

std::vector<std::vector<Partition>> sample_shuffle(const RailYardSpec& spec, std::uint64_t seed, int count,
                                                   int threads) {
  std::vector<std::vector<Partition>> out(count);
  parallel_for(count, threads, [&](int i) {
    auto rng = draw_rng(seed, static_cast<std::uint64_t>(i));
    out[i] = sample_shuffle_sequence(spec, rng);
  });
  return out;
}

std::vector<EnumeratedCovering> enumerate_coverings(const RailYardSpec& spec, const Partition& left, int max_size) {
  std::vector<EnumeratedCovering> out;
  if (left.size() > max_size) return out;
  // reachability of the empty right boundary within the size bound
  std::vector<FockVector> right(spec.columns() + 1, FockVector(max_size));
  right.back() = FockVector::basis(Partition{}, max_size);
  for (int k = spec.r(); k >= spec.l(); --k)
    right[k - spec.l()] = gamma_apply(spec.kind(k), spec.x(k), right[k - spec.l() + 1]);

  std::vector<Partition> seq{left};
  auto rec = [&](auto&& self, int k, double w) -> void {
    if (k > spec.r()) {
      out.push_back({seq, w});
      return;
    }
    const Partition lam = seq.back();
    const SlotKind kind = spec.kind(k);
    const bool conj = kind.a == Letter::R;
    const auto cands = kind.b == Sign::Plus ? strips_above(lam, conj, max_size) : strips_below(lam, conj);
    for (const auto& mu : cands) {
      if (!(right[k - spec.l() + 1][mu] > 0.0)) continue;
      seq.push_back(mu);
      self(self, k + 1, w * std::pow(spec.x(k), std::abs(mu.size() - lam.size())));
      seq.pop_back();
    }
  };
  rec(rec, spec.l(), 1.0);
  return out;
}

double schur_generating_fn(const RailYardSpec& spec, const Partition& left, int t, const std::map<int, double>& u) {
  if (!spec.indices_of(Letter::R, Sign::Minus).empty())
    throw InvalidInput("schur_generating_fn: the graph must not contain (R,-) slots");
  if (t < spec.l() || t > spec.r()) throw InvalidInput("schur_generating_fn: t out of range");
  for (const auto& [j, v] : u) {
    if (j <= t || j > spec.r() || spec.kind(j) != SlotKind{Letter::L, Sign::Minus})
      throw InvalidInput("schur_generating_fn: u given for a slot that is not an (L,-) slot right of t");
    (void)v;
  }
  auto w = [&](int i) {
    auto it = u.find(i);
    return it == u.end() ? spec.x(i) : it->second;
  };
  std::vector<double> xs, ws;
  for (int i : spec.indices_of(Letter::L, Sign::Minus)) {
    xs.push_back(spec.x(i));
    ws.push_back(w(i));
  }
  double value = 1.0;
  if (!left.empty()) value = schur(left, ws) / schur(left, xs);
  for (int i = spec.l(); i <= t; ++i) {
    if (spec.b(i) != Sign::Plus) continue;
    for (int j = t + 1; j <= spec.r(); ++j) {
      if (spec.kind(j) != SlotKind{Letter::L, Sign::Minus}) continue;
      value *= pair_factor(spec.a(i), spec.x(i), Letter::L, w(j)) / pair_factor(spec.a(i), spec.x(i), Letter::L, spec.x(j));
    }
  }
  return value;
}

} // namespace railyard
