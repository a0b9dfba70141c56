#include "railyard/spec.hpp"

#include <sstream>

namespace railyard {

char to_char(Letter a) { return a == Letter::L ? 'L' : 'R'; }
char to_char(Sign b) { return b == Sign::Plus ? '+' : '-'; }

Letter letter_from_char(char c) {
  if (c == 'L' || c == 'l') return Letter::L;
  if (c == 'R' || c == 'r') return Letter::R;
  throw InvalidInput(std::string("unknown letter '") + c + "'");
}

Sign sign_from_char(char c) {
  if (c == '+') return Sign::Plus;
  if (c == '-') return Sign::Minus;
  throw InvalidInput(std::string("unknown sign '") + c + "'");
}

namespace {
std::string violation_text(int i, int j, double p) {
  std::ostringstream os;
  os.precision(17);
  os << "convergence guard violated: slots (" << i << "," << j << ") have x_i*x_j = " << p << " >= 1";
  return os.str();
}
} // namespace

ConvergenceViolation::ConvergenceViolation(int i_, int j_, double p)
    : InvalidInput(violation_text(i_, j_, p)), i(i_), j(j_), product(p) {}

double pair_factor(Letter ai, double xi, Letter aj, double xj) {
  return ai == aj ? 1.0 / (1.0 - xi * xj) : 1.0 + xi * xj;
}

RailYardSpec build(int l, int r, std::vector<Letter> a, std::vector<Sign> b, std::vector<double> x) {
  if (r < l) throw InvalidInput("build: r < l");
  const std::size_t n = static_cast<std::size_t>(r - l + 1);
  if (a.size() != n || b.size() != n || x.size() != n)
    throw InvalidInput("build: sequence lengths do not match r - l + 1");
  for (double v : x)
    if (!(v >= 0.0)) throw InvalidInput("build: weights must be nonnegative");
  for (std::size_t i = 0; i < n; ++i) {
    if (b[i] != Sign::Plus) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (b[j] != Sign::Minus || a[j] != a[i]) continue;
      const double p = x[i] * x[j];
      if (!(p < 1.0)) throw ConvergenceViolation(l + static_cast<int>(i), l + static_cast<int>(j), p);
    }
  }
  RailYardSpec s;
  s.l_ = l;
  s.r_ = r;
  s.a_ = std::move(a);
  s.b_ = std::move(b);
  s.x_ = std::move(x);
  return s;
}

RailYardSpec build(int l, int r, const std::string& a, const std::string& b, std::vector<double> x) {
  std::vector<Letter> av;
  std::vector<Sign> bv;
  for (char c : a) av.push_back(letter_from_char(c));
  for (char c : b) bv.push_back(sign_from_char(c));
  return build(l, r, std::move(av), std::move(bv), std::move(x));
}

std::vector<int> RailYardSpec::indices_of(Letter a, Sign b) const {
  std::vector<int> out;
  for (int i = l_; i <= r_; ++i)
    if (this->a(i) == a && this->b(i) == b) out.push_back(i);
  return out;
}

std::vector<double> RailYardSpec::weights_of(Letter a, Sign b) const {
  std::vector<double> out;
  for (int i : indices_of(a, b)) out.push_back(x(i));
  return out;
}

double RailYardSpec::pair_product() const {
  double z = 1.0;
  for (int i = l_; i <= r_; ++i) {
    if (b(i) != Sign::Plus) continue;
    for (int j = i + 1; j <= r_; ++j)
      if (b(j) == Sign::Minus) z *= pair_factor(a(i), x(i), a(j), x(j));
  }
  return z;
}

std::string RailYardSpec::letters_string() const {
  std::string s;
  for (auto v : a_) s += to_char(v);
  return s;
}

std::string RailYardSpec::signs_string() const {
  std::string s;
  for (auto v : b_) s += to_char(v);
  return s;
}

} // namespace railyard
