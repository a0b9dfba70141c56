#pragma once

#include "railyard/error.hpp"

#include <string>
#include <vector>

namespace railyard {

enum class Letter { L, R };
enum class Sign { Plus, Minus };

struct SlotKind {
  Letter a;
  Sign b;
  bool operator==(const SlotKind&) const = default;
};

char to_char(Letter a);
char to_char(Sign b);
Letter letter_from_char(char c);
Sign sign_from_char(char c);

// Offending pair for the same-letter (+,-) convergence guard.
class ConvergenceViolation : public InvalidInput {
public:
  ConvergenceViolation(int i, int j, double product);
  int i, j;
  double product;
};

// Rail-yard graph RYG(l, r, a, b) with diagonal weights x_i. Index i runs
// over [l..r]; the even vertex column of index i sits at abscissa 2i.
class RailYardSpec {
public:
  RailYardSpec() = default;

  int l() const { return l_; }
  int r() const { return r_; }
  int columns() const { return r_ - l_ + 1; }
  Letter a(int i) const { return a_.at(i - l_); }
  Sign b(int i) const { return b_.at(i - l_); }
  SlotKind kind(int i) const { return {a(i), b(i)}; }
  double x(int i) const { return x_.at(i - l_); }

  const std::vector<Letter>& letters() const { return a_; }
  const std::vector<Sign>& signs() const { return b_; }
  const std::vector<double>& weights() const { return x_; }

  // Indices in [l..r] with the given slot kind, ascending.
  std::vector<int> indices_of(Letter a, Sign b) const;
  std::vector<double> weights_of(Letter a, Sign b) const;

  // Product over i < j, b_i = +, b_j = - of z_ij (1 + x_i x_j or 1/(1 - x_i x_j)).
  double pair_product() const;

  std::string letters_string() const;
  std::string signs_string() const;

private:
  friend RailYardSpec build(int, int, std::vector<Letter>, std::vector<Sign>, std::vector<double>);
  int l_ = 0, r_ = -1;
  std::vector<Letter> a_;
  std::vector<Sign> b_;
  std::vector<double> x_;
};

RailYardSpec build(int l, int r, std::vector<Letter> a, std::vector<Sign> b, std::vector<double> x);
RailYardSpec build(int l, int r, const std::string& a, const std::string& b, std::vector<double> x);

// z_ij for a (+) slot i followed by a (-) slot j.
double pair_factor(Letter ai, double xi, Letter aj, double xj);

} // namespace railyard
