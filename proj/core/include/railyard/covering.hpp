#pragma once

#include "railyard/partitions.hpp"
#include "railyard/spec.hpp"

#include <cstdint>
#include <vector>

namespace railyard {

// How the even vertex (2m, y) is matched.
enum class EvenState : std::uint8_t { HLeft, HRight, Diag };

struct DiagonalEdge {
  int column; // m, the even vertex sits at abscissa 2m
  double y;   // height of the even endpoint, in Z + 1/2
  bool operator==(const DiagonalEdge&) const = default;
};

// A dimer covering stored as its sequence of column partitions
// lambda^(l), ..., lambda^(r+1). The one exception is the reference pattern
// (every even vertex matched to its right neighbour), which has no partition
// encoding and is flagged `reference`.
class DimerCovering {
public:
  bool reference() const { return reference_; }
  // Pure coverings have empty boundary partitions on both sides.
  bool pure() const;
  int l() const { return l_; }
  int r() const { return r_; }
  const std::vector<Partition>& partitions() const { return seq_; }
  // Window of heights (y_min, y_max) outside which the covering follows the
  // frozen pattern. Integers; vertex heights inside are y_min + 1/2, ...
  int y_min() const { return ylo_; }
  int y_max() const { return yhi_; }

  bool operator==(const DimerCovering& o) const {
    return reference_ == o.reference_ && l_ == o.l_ && r_ == o.r_ && seq_ == o.seq_;
  }

private:
  friend DimerCovering base_covering(const RailYardSpec&);
  friend DimerCovering covering_from_partitions(const RailYardSpec&, std::vector<Partition>);
  bool reference_ = false;
  int l_ = 0, r_ = -1;
  int ylo_ = -1, yhi_ = 1;
  std::vector<Partition> seq_;
};

// The reference pattern: no diagonals, every present edge horizontal with the
// even vertex on the left. Height 0 and weight 1 by construction.
DimerCovering base_covering(const RailYardSpec& spec);

// The pure covering whose column partitions are all empty.
DimerCovering empty_covering(const RailYardSpec& spec);

// Validates that consecutive partitions satisfy the relation imposed by each
// slot: L+ adds a horizontal strip, R+ a vertical strip, L- and R- remove them.
DimerCovering covering_from_partitions(const RailYardSpec& spec, std::vector<Partition> seq);

// Matrix element <lambda| Gamma_{a,b}(x) |mu>, zero if the relation fails.
bool slot_relation(SlotKind kind, const Partition& lambda, const Partition& mu);

// States of even vertices at heights y_lo + 1/2, ..., y_hi - 1/2 of column m.
std::vector<EvenState> even_states(const RailYardSpec& spec, const DimerCovering& cov, int m, int y_lo,
                                   int y_hi);

std::vector<DiagonalEdge> diagonal_edges(const RailYardSpec& spec, const DimerCovering& cov);
// d_i(M) for i in [l..r].
std::vector<int> diagonal_counts(const RailYardSpec& spec, const DimerCovering& cov);

double covering_weight(const RailYardSpec& spec, const DimerCovering& cov);
double covering_weight(const RailYardSpec& spec, const std::vector<int>& counts);

// Height at a face point. x must be 2m -/+ 1/2 for some m in [l..r]; y must
// avoid the edges crossing that line. Evaluated from the closed forms along
// the vertical line.
int height(const RailYardSpec& spec, const DimerCovering& cov, double x, double y);
// Same quantity accumulated edge by edge along a path from the anchor face
// (2l - 1/2, y_min - 1/4): up the first line, then across.
int height_incremental(const RailYardSpec& spec, const DimerCovering& cov, double x, double y);

struct ColumnProfile {
  int m = 0;
  int y_lo = 0;                // heights y_lo + 1/2 + k
  std::vector<bool> particle;  // below the window: particles, above: holes
};

ColumnProfile column_profile(const RailYardSpec& spec, const DimerCovering& cov, int m);
ColumnProfile profile_of(const Partition& lambda, int m, int y_lo, int y_hi);
Partition partition_of(const ColumnProfile& profile);
int charge(const ColumnProfile& profile);

Partition column_partition(const RailYardSpec& spec, const DimerCovering& cov, int m);
int charge(const RailYardSpec& spec, const DimerCovering& cov, int m);

} // namespace railyard
