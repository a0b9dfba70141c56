#include "commands.hpp"

#include "output.hpp"

#include "railyard/error.hpp"
#include "railyard/frozen.hpp"
#include "railyard/limitshape.hpp"
#include "railyard/piecewise.hpp"
#include "railyard/schur_process.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

namespace railyard::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::vector<double> parallel_map(int n, int threads, const std::function<double(int)>& f) {
  std::vector<double> out(n);
  std::atomic<int> next{0};
  auto work = [&]() {
    for (int k = next++; k < n; k = next++) out[k] = f(k);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::max(1, threads); ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return out;
}

Partition left_partition(const ExperimentConfig& c) {
  switch (c.boundary.kind) {
  case BoundaryKind::Empty: return {};
  case BoundaryKind::Partition: return Partition(c.boundary.left);
  default: throw ConfigError("finite models take an 'empty' or 'partition' boundary");
  }
}

double need_chi(const ExperimentConfig& c) {
  if (!c.task.chi) throw ConfigError("task.chi is required for this command");
  return *c.task.chi;
}

int staircase_M(const ExperimentConfig& c) {
  if (c.boundary.kind == BoundaryKind::Partition) throw ConfigError("periodic models take no finite partition boundary");
  return c.boundary.kind == BoundaryKind::Staircase ? c.boundary.M : 1;
}

// Limit-shape data shared by the periodic commands.
struct Limit {
  AsymptoticModel model;
  bool piecewise = false;
  int M = 1;
  PiecewiseBoundary boundary;
  WeightGroups groups;

  explicit Limit(const ExperimentConfig& c) : model(periodic_model(c)) {
    if (c.boundary.kind == BoundaryKind::Piecewise) {
      piecewise = true;
      boundary = PiecewiseBoundary(c.boundary.levels, c.boundary.blocks);
      groups = group_weights(model, boundary);
    } else {
      M = staircase_M(c);
    }
  }
  MomentResult moment_at(const ObservationPoint& o, int k) const {
    return piecewise ? piecewise_moment(model, boundary, groups, o, k) : moment(model, o, M, k);
  }
  double density_at(const ObservationPoint& o, double kappa) const {
    return piecewise ? density_piecewise(model, boundary, groups, o, kappa) : density(model, o, M, kappa);
  }
  double mass(const ObservationPoint& o) const {
    return piecewise ? piecewise_mass(model, groups, o) : limit_mass(model, o, M);
  }
  // Range holding the support: mean +- 6 sigma, widened by the mass.
  std::pair<double, double> kappa_range(const ObservationPoint& o) const {
    const double m0 = mass(o);
    if (!(m0 > 0.0)) return {-1.0, 1.0};
    const double m1 = moment_at(o, 1).value / m0, m2 = moment_at(o, 2).value / m0;
    const double sd = std::sqrt(std::max(0.0, m2 - m1 * m1));
    return {m1 - 6.0 * sd - m0, m1 + 6.0 * sd + m0};
  }
};

std::string parts_text(const Partition& p) {
  std::string s;
  for (int i = 0; i < p.length(); ++i) s += (i ? " " : "") + std::to_string(p[i]);
  return s;
}

void echo_config(const ExperimentConfig& c, const fs::path& dir) { write_text(dir / "config.json", to_json(c).dump(2) + "\n"); }

int cmd_z(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
  const RailYardSpec spec = finite_spec(c);
  const Partition left = left_partition(c);
  const double zt = partition_function_transfer(spec, {left, {}}, c.task.cap);
  std::optional<double> zp;
  for (int variant : {1, 2}) {
    try {
      zp = partition_function_product(spec, left, variant);
      break;
    } catch (const InvalidInput&) {
    }
  }
  json j = {{"transfer", zt}, {"cap", c.task.cap}};
  log << "transfer " << format_double(zt) << "\n";
  if (zp) {
    const double gap = std::abs(zt - *zp) / std::abs(*zp);
    j["product"] = *zp;
    j["relative_gap"] = gap;
    log << "product  " << format_double(*zp) << "\nrelative_gap " << format_double(gap) << "\n";
  } else {
    log << "product  unavailable (boundary needs a single (L,-) or (R,-) family)\n";
  }
  write_text(o.out_dir / "z.json", j.dump(2) + "\n");
  return kOk;
}

int cmd_sample(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
  if (!c.task.seed) throw ConfigError("task.seed (or --seed) is required for sampling");
  const std::uint64_t seed = *c.task.seed;
  if (c.finite) {
    const RailYardSpec spec = finite_spec(c);
    const auto covs = sample(spec, left_partition(c), seed, c.task.samples, c.task.cap, o.threads);
    CsvWriter cw(o.out_dir / "coverings.csv", {"sample", "column", "partition"});
    const int cols = spec.columns() + 1;
    std::vector<double> size(cols, 0.0), length(cols, 0.0);
    for (std::size_t s = 0; s < covs.size(); ++s) {
      const auto& seq = covs[s].partitions();
      for (int k = 0; k < static_cast<int>(seq.size()); ++k) {
        cw << static_cast<int>(s) << spec.l() + k << parts_text(seq[k]);
        cw.end_row();
        size[k] += seq[k].size();
        length[k] += seq[k].length();
      }
    }
    CsvWriter mw(o.out_dir / "column_measure.csv", {"column", "mean_size", "mean_length"});
    for (int k = 0; k < cols; ++k) {
      mw << spec.l() + k << size[k] / covs.size() << length[k] / covs.size();
      mw.end_row();
    }
    log << "wrote " << covs.size() << " coverings\n";
    return kOk;
  }
  const AsymptoticModel model = periodic_model(c);
  if (c.task.N < 1) throw ConfigError("task.N is required to sample a periodic model");
  const int kmax = std::max(1, *std::max_element(c.task.moments.begin(), c.task.moments.end()));
  const auto em = empirical_moments(model, c.task.N, need_chi(c), kmax, c.task.samples, seed, o.threads);
  CsvWriter cw(o.out_dir / "empirical_moments.csv", {"k", "mean", "stderr"});
  for (int k = 1; k <= kmax; ++k) {
    cw << k << em.mean[k - 1] << em.stderr_[k - 1];
    cw.end_row();
  }
  log << "column " << em.column << ", " << em.samples << " samples\n";
  return kOk;
}

int cmd_moments(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
  const Limit lim(c);
  const ObservationPoint obs = observe(lim.model, need_chi(c));
  CsvWriter cw(o.out_dir / "moments.csv", {"k", "value", "self_error"});
  for (int k : c.task.moments) {
    const auto r = lim.moment_at(obs, k);
    cw << k << r.value << r.self_error;
    cw.end_row();
    log << "k=" << k << " " << format_double(r.value) << "\n";
  }
  return kOk;
}

int cmd_density(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
  const Limit lim(c);
  const ObservationPoint obs = observe(lim.model, need_chi(c));
  double lo, hi;
  int n;
  if (c.task.kappa) {
    lo = c.task.kappa->min, hi = c.task.kappa->max, n = c.task.kappa->points;
  } else {
    std::tie(lo, hi) = lim.kappa_range(obs);
    n = c.task.kappa_points;
  }
  const auto f = parallel_map(n, o.threads, [&](int k) { return lim.density_at(obs, lo + (hi - lo) * k / (n - 1)); });
  CsvWriter cw(o.out_dir / "density.csv", {"kappa", "density"});
  double integral = 0.0;
  for (int k = 0; k < n; ++k) {
    cw << lo + (hi - lo) * k / (n - 1) << f[k];
    cw.end_row();
    if (k > 0) integral += 0.5 * (f[k] + f[k - 1]) * (hi - lo) / (n - 1);
  }
  log << "mass " << format_double(lim.mass(obs)) << ", trapezoid integral " << format_double(integral) << "\n";
  return kOk;
}

std::vector<SvgCurve> svg_by_branch(const ParametricCurve& curve) {
  std::map<int, SvgCurve> by;
  for (const auto& piece : curve.pieces()) {
    if (piece.empty()) continue;
    auto& s = by[piece.front().branch];
    s.color = kColors[(piece.front().branch - 1 + 6) % 6];
    s.pieces.push_back(piece);
  }
  std::vector<SvgCurve> out;
  for (auto& [b, s] : by) out.push_back(std::move(s));
  return out;
}

int cmd_frozen(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
  const AsymptoticModel model = periodic_model(c);
  const int M = staircase_M(c);
  if (c.boundary.kind == BoundaryKind::Piecewise) throw ConfigError("use frozen-piecewise for a piecewise boundary");
  const auto grid = default_grid(model, M, c.task.per_interval);
  const bool closed = model.m() == 1 && M == 1;
  const ParametricCurve curve = closed ? trace_m1(model, grid) : trace_double_root(model, grid, M);
  CsvWriter cw(o.out_dir / "frozen.csv", {"u", "chi", "kappa", "branch"});
  double residual = 0.0;
  for (const auto& s : curve.samples) {
    cw << s.u << s.chi << s.kappa << s.branch;
    cw.end_row();
    if (!closed) residual = std::max(residual, double_root_residual(model, s, M));
  }
  write_svg(o.out_dir / "frozen.svg", svg_by_branch(curve), "frozen boundary");
  json rep = {{"samples", curve.samples.size()}, {"M", M}};
  if (!closed) rep["max_double_root_residual"] = residual;
  if (closed) {
    const auto t = tangency_report(model);
    rep["tangency"] = {{"chi0", t.count_chi0}, {"chi1", t.count_chi1}, {"rank", t.rank}, {"limits_ok", t.limits_ok}};
    const auto w = winding_check(model, c.task.winding_lines, c.task.seed.value_or(1));
    rep["winding"] = {{"lines", w.lines}, {"failures", w.failures}, {"min_finite", w.min_finite},
                      {"at_xi_inf", w.at_xi_inf}, {"passed", w.passed}};
    log << "tangency (" << t.count_chi0 << "," << t.count_chi1 << "," << t.rank << "), winding "
        << (w.passed ? "passed" : "failed") << "\n";
  }
  write_text(o.out_dir / "frozen.json", rep.dump(2) + "\n");
  log << curve.samples.size() << " samples\n";
  return kOk;
}

std::vector<ParametricCurve> components(const Limit& lim, int per_interval) {
  std::vector<ParametricCurve> out;
  for (int i = 1; i <= lim.groups.I; ++i)
    out.push_back(trace_component(lim.model, lim.boundary, lim.groups, i,
                                  component_grid(lim.model, lim.boundary, lim.groups, i, per_interval)));
  return out;
}

int cmd_frozen_piecewise(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
  if (c.boundary.kind != BoundaryKind::Piecewise) throw ConfigError("frozen-piecewise needs a piecewise boundary");
  const Limit lim(c);
  const auto& g = lim.groups;
  const auto curves = components(lim, c.task.per_interval);
  CsvWriter cw(o.out_dir / "frozen_piecewise.csv", {"t", "chi", "kappa", "component"});
  std::vector<SvgCurve> svg;
  json comps = json::array();
  for (int i = 1; i <= g.I; ++i) {
    const auto& cv = curves[i - 1];
    for (const auto& s : cv.samples) {
      cw << s.u << s.chi << s.kappa << i;
      cw.end_row();
    }
    svg.push_back({cv.pieces(), kColors[(i - 1) % 6]});
    const auto band = band_measure(lim.boundary, g, i);
    json bands = json::array();
    for (const auto& b : band.bands) bands.push_back({b.beta, b.gamma});
    json e = {{"group", i}, {"x", g.x[i - 1]}, {"theta", g.theta[i - 1]}, {"levels", g.J[i - 1]},
              {"bands", bands}, {"samples", cv.samples.size()}};
    if (!cv.samples.empty()) {
      const Box b = bounding_box(cv);
      e["box"] = {b.chi_min, b.chi_max, b.kappa_min, b.kappa_max};
    }
    if (lim.model.m() == 1) {
      const auto r = component_rank(lim.model, lim.boundary, g, i);
      e["rank"] = {{"predicted", r.predicted}, {"counted", r.counted}};
    }
    comps.push_back(e);
  }
  json dist = json::array();
  for (int i = 0; i < g.I; ++i)
    for (int k = i + 1; k < g.I; ++k) dist.push_back({i + 1, k + 1, curve_distance(curves[i], curves[k])});
  write_svg(o.out_dir / "frozen_piecewise.svg", svg, "piecewise frozen boundary");
  json rep = {{"groups", g.I},
              {"rho", g.rho},
              {"components", comps},
              {"distances", dist},
              {"min_level_gap", lim.boundary.min_gap()}};
  write_text(o.out_dir / "frozen_piecewise.json", rep.dump(2) + "\n");
  log << g.I << " components\n";
  return kOk;
}

// ---- verify ----------------------------------------------------------------

struct Checks {
  std::ostream& log;
  bool ok = true;
  void operator()(const std::string& name, bool pass, const std::string& detail) {
    ok = ok && pass;
    log << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

void verify_finite(const ExperimentConfig& c, Checks& check) {
  const RailYardSpec spec = finite_spec(c);
  const Partition left = left_partition(c);
  const double zt = partition_function_transfer(spec, {left, {}}, c.task.cap);
  for (int variant : {1, 2}) {
    try {
      const double zp = partition_function_product(spec, left, variant);
      const double gap = std::abs(zt - zp) / zp;
      check("transfer vs product", gap < 1e-8, "relative gap " + num(gap));
      break;
    } catch (const InvalidInput&) {
    }
  }
  const double zmore = partition_function_transfer(spec, {left, {}}, c.task.cap + 10);
  check("transfer monotone in cap", zt <= zmore * (1.0 + 1e-12), num(zt) + " <= " + num(zmore));
  double partial = 0.0;
  for (const auto& e : enumerate_coverings(spec, left, 6)) partial += e.weight;
  check("enumerated weight below Z", partial <= zt * (1.0 + 1e-12), num(partial) + " <= " + num(zt));
}

void verify_limit(const ExperimentConfig& c, Checks& check, int threads) {
  const Limit lim(c);
  const ObservationPoint obs = observe(lim.model, c.task.chi.value_or(0.5));
  const double mass = lim.mass(obs);
  const auto m0 = lim.moment_at(obs, 0);
  check("zeroth moment equals mass", std::abs(m0.value - mass) < 1e-9, num(m0.value) + " vs " + num(mass));
  double self = 0.0;
  for (int k : c.task.moments) self = std::max(self, lim.moment_at(obs, k).self_error);
  check("moment quadrature self-error", self < 1e-9, num(self));
  const auto [lo, hi] = lim.kappa_range(obs);
  const auto grid = parallel_map(200, threads, [&](int k) { return lim.density_at(obs, lo + (hi - lo) * k / 199); });
  const bool in_range = std::all_of(grid.begin(), grid.end(), [](double d) { return d >= 0.0 && d <= 1.0; });
  check("density in [0,1]", in_range, "200-point grid on [" + num(lo) + ", " + num(hi) + "]");
  if (mass > 0.0) {
    const auto si = integrate_on_support([&](double k) { return lim.density_at(obs, k); }, lo, hi, 200);
    check("density integrates to the mass", std::abs(si.value / mass - 1.0) < 1e-3,
          "normalized integral " + num(si.value / mass));
  }
  int pairs = 0;
  for (int k = 0; k < 200; ++k) {
    const double kappa = lo + (hi - lo) * k / 199;
    if (lim.piecewise) {
      for (int i = 1; i <= lim.groups.I; ++i)
        pairs = std::max(pairs, piecewise_nonreal_pairs(lim.model, lim.boundary, lim.groups, i, obs, kappa));
    } else {
      pairs = std::max(pairs, nonreal_pairs(lim.model, obs, lim.M, kappa));
    }
  }
  check("at most one nonreal root pair", pairs <= 1, "max " + std::to_string(pairs));

  if (lim.piecewise) {
    for (int i = 1; i <= lim.groups.I; ++i) {
      const double len = band_measure(lim.boundary, lim.groups, i).total_length();
      check("band mass of group " + std::to_string(i), std::abs(len - 1.0) < 1e-12, num(len));
    }
    const auto curves = components(lim, 1000);
    for (int i = 0; i < lim.groups.I; ++i) {
      const Box b = bounding_box(curves[i]);
      const bool bounded = std::abs(b.kappa_min) < 1e6 && std::abs(b.kappa_max) < 1e6;
      check("component " + std::to_string(i + 1) + " bounded", bounded,
            "kappa in [" + num(b.kappa_min) + ", " + num(b.kappa_max) + "]");
      for (int k = i + 1; k < lim.groups.I; ++k) {
        const double d = curve_distance(curves[i], curves[k]);
        check("components " + std::to_string(i + 1) + "," + std::to_string(k + 1) + " disjoint", d > 0.0,
              "distance " + num(d));
      }
      if (lim.model.m() == 1) {
        const auto r = component_rank(lim.model, lim.boundary, lim.groups, i + 1);
        check("rank of component " + std::to_string(i + 1), r.predicted == r.counted,
              std::to_string(r.counted) + " vs " + std::to_string(r.predicted));
      }
    }
    return;
  }
  const auto curve = trace_double_root(lim.model, default_grid(lim.model, lim.M, 500), lim.M);
  double res = 0.0;
  for (const auto& s : curve.samples) res = std::max(res, double_root_residual(lim.model, s, lim.M));
  check("double-root residual", res < 1e-8, num(res) + " over " + std::to_string(curve.samples.size()) + " samples");
  if (lim.model.m() == 1 && lim.M == 1) {
    const auto t = tangency_report(lim.model);
    check("tangency limits", t.limits_ok,
          "(" + std::to_string(t.count_chi0) + "," + std::to_string(t.count_chi1) + "," + std::to_string(t.rank) + ")");
    const auto w = winding_check(lim.model, c.task.winding_lines, c.task.seed.value_or(1));
    check("dual-curve winding", w.passed, std::to_string(w.failures) + " failing lines");
    double dd = 0.0;
    for (const auto& s : trace_m1(lim.model, default_grid(lim.model, 1, 100)).samples) {
      const auto [chi, kappa] = double_dual(lim.model, s.u);
      dd = std::max(dd, std::hypot(chi - s.chi, kappa - s.kappa));
    }
    check("double dual returns the curve", dd < 1e-8, num(dd));
  }
}

int cmd_verify(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
  Checks check{log};
  if (c.finite)
    verify_finite(c, check);
  else
    verify_limit(c, check, o.threads);
  log << (check.ok ? "verify: all checks passed\n" : "verify: FAILED\n");
  return check.ok ? kOk : kVerifyFailed;
}

} // namespace

int run_command(const std::string& command, const ExperimentConfig& config, const RunOptions& opts, std::ostream& log) {
  static const std::map<std::string, int (*)(const ExperimentConfig&, const RunOptions&, std::ostream&)> table = {
      {"z", cmd_z},           {"sample", cmd_sample}, {"moments", cmd_moments},
      {"density", cmd_density}, {"frozen", cmd_frozen}, {"frozen-piecewise", cmd_frozen_piecewise},
      {"verify", cmd_verify}};
  const auto it = table.find(command);
  if (it == table.end()) throw ConfigError("unknown command '" + command + "'");
  fs::create_directories(opts.out_dir);
  echo_config(config, opts.out_dir);
  return it->second(config, opts, log);
}

} // namespace railyard::cli
