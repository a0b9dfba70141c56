#include "config.hpp"

#include <algorithm>
#include <fstream>

namespace railyard::cli {

using nlohmann::json;

namespace {

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
void maybe(const json& j, const char* key, T& out, const std::string& where) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

const char* kind_name(BoundaryKind k) {
  switch (k) {
  case BoundaryKind::Empty: return "empty";
  case BoundaryKind::Partition: return "partition";
  case BoundaryKind::Staircase: return "staircase";
  case BoundaryKind::Piecewise: return "piecewise";
  }
  return "empty";
}

SegmentConfig parse_segment(const json& j, const std::string& where) {
  SegmentConfig s;
  s.letters = get<std::string>(j, "letters", where);
  s.signs = get<std::string>(j, "signs", where);
  s.x = get<std::vector<double>>(j, "x", where);
  maybe(j, "zeta", s.zeta, where);
  if (s.letters.size() != s.signs.size() || s.letters.size() != s.x.size())
    throw ConfigError(where + ": letters, signs and x differ in length");
  if (!s.zeta.empty() && s.zeta.size() != s.x.size()) throw ConfigError(where + ": zeta has the wrong length");
  return s;
}

} // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig c;
  c.schema_version = get<int>(j, "schema_version", "config");
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("config: unsupported schema_version " + std::to_string(c.schema_version));
  const json& m = j.contains("model") ? j.at("model") : throw ConfigError("config: missing 'model'");
  if (m.contains("finite") == m.contains("periodic"))
    throw ConfigError("model: give exactly one of 'finite' or 'periodic'");
  if (m.contains("finite")) {
    const json& f = m.at("finite");
    FiniteModel fm;
    fm.l = get<int>(f, "l", "model.finite");
    fm.r = get<int>(f, "r", "model.finite");
    fm.letters = get<std::string>(f, "letters", "model.finite");
    fm.signs = get<std::string>(f, "signs", "model.finite");
    fm.x = get<std::vector<double>>(f, "x", "model.finite");
    const auto n = static_cast<std::size_t>(std::max(0, fm.r - fm.l + 1));
    if (fm.letters.size() != n || fm.signs.size() != n || fm.x.size() != n)
      throw ConfigError("model.finite: letters, signs and x need r - l + 1 entries");
    c.finite = fm;
  } else {
    const json& p = m.at("periodic");
    PeriodicModel pm;
    if (p.contains("segments")) {
      pm.V = get<std::vector<double>>(p, "V", "model.periodic");
      for (const auto& s : p.at("segments")) pm.segments.push_back(parse_segment(s, "model.periodic.segments"));
    } else {
      pm.V = {0.0, 1.0};
      maybe(p, "V", pm.V, "model.periodic");
      pm.segments.push_back(parse_segment(p, "model.periodic"));
    }
    if (pm.V.size() != pm.segments.size() + 1) throw ConfigError("model.periodic: need one more V than segments");
    c.periodic = pm;
  }
  if (j.contains("boundary")) {
    const json& b = j.at("boundary");
    const auto type = get<std::string>(b, "type", "boundary");
    if (type == "empty") {
      c.boundary.kind = BoundaryKind::Empty;
    } else if (type == "partition") {
      c.boundary.kind = BoundaryKind::Partition;
      c.boundary.left = get<std::vector<int>>(b, "left", "boundary");
    } else if (type == "staircase") {
      c.boundary.kind = BoundaryKind::Staircase;
      maybe(b, "M", c.boundary.M, "boundary");
      if (c.boundary.M != 1 && c.boundary.M != 2) throw ConfigError("boundary.M must be 1 or 2");
    } else if (type == "piecewise") {
      c.boundary.kind = BoundaryKind::Piecewise;
      c.boundary.levels = get<std::vector<double>>(b, "levels", "boundary");
      c.boundary.blocks = get<std::vector<double>>(b, "blocks", "boundary");
    } else {
      throw ConfigError("boundary.type: unknown '" + type + "'");
    }
  }
  if (j.contains("task")) {
    const json& t = j.at("task");
    auto& k = c.task;
    if (t.contains("chi")) k.chi = get<double>(t, "chi", "task");
    maybe(t, "moments", k.moments, "task");
    if (t.contains("kappa")) {
      const json& g = t.at("kappa");
      k.kappa = KappaGrid{get<double>(g, "min", "task.kappa"), get<double>(g, "max", "task.kappa"),
                          get<int>(g, "points", "task.kappa")};
      if (!(k.kappa->max > k.kappa->min) || k.kappa->points < 2) throw ConfigError("task.kappa: empty grid");
    }
    maybe(t, "kappa_points", k.kappa_points, "task");
    maybe(t, "per_interval", k.per_interval, "task");
    maybe(t, "samples", k.samples, "task");
    if (t.contains("seed")) k.seed = get<std::uint64_t>(t, "seed", "task");
    maybe(t, "cap", k.cap, "task");
    maybe(t, "N", k.N, "task");
    maybe(t, "tiny", k.tiny, "task");
    maybe(t, "winding_lines", k.winding_lines, "task");
    if (k.chi && !(*k.chi >= 0.0 && *k.chi <= 1.0)) throw ConfigError("task.chi must lie in [0,1]");
    if (k.samples < 1 || k.cap < 1 || k.per_interval < 2 || k.kappa_points < 2)
      throw ConfigError("task: counts must be positive");
    for (int q : k.moments)
      if (q < 0) throw ConfigError("task.moments: orders must be nonnegative");
  }
  if (j.contains("output")) maybe(j.at("output"), "dir", c.out_dir, "output");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  if (c.finite) {
    const auto& f = *c.finite;
    j["model"]["finite"] = {{"l", f.l}, {"r", f.r}, {"letters", f.letters}, {"signs", f.signs}, {"x", f.x}};
  } else if (c.periodic) {
    json segs = json::array();
    for (const auto& s : c.periodic->segments) {
      json e = {{"letters", s.letters}, {"signs", s.signs}, {"x", s.x}};
      if (!s.zeta.empty()) e["zeta"] = s.zeta;
      segs.push_back(e);
    }
    j["model"]["periodic"] = {{"V", c.periodic->V}, {"segments", segs}};
  }
  json b = {{"type", kind_name(c.boundary.kind)}};
  switch (c.boundary.kind) {
  case BoundaryKind::Partition: b["left"] = c.boundary.left; break;
  case BoundaryKind::Staircase: b["M"] = c.boundary.M; break;
  case BoundaryKind::Piecewise:
    b["levels"] = c.boundary.levels;
    b["blocks"] = c.boundary.blocks;
    break;
  case BoundaryKind::Empty: break;
  }
  j["boundary"] = b;
  const auto& t = c.task;
  json tj = {{"moments", t.moments},       {"kappa_points", t.kappa_points}, {"per_interval", t.per_interval},
             {"samples", t.samples},       {"cap", t.cap},                   {"N", t.N},
             {"tiny", t.tiny},             {"winding_lines", t.winding_lines}};
  if (t.chi) tj["chi"] = *t.chi;
  if (t.seed) tj["seed"] = *t.seed;
  if (t.kappa) tj["kappa"] = {{"min", t.kappa->min}, {"max", t.kappa->max}, {"points", t.kappa->points}};
  j["task"] = tj;
  j["output"] = {{"dir", c.out_dir}};
  return j;
}

RailYardSpec finite_spec(const ExperimentConfig& c) {
  if (!c.finite) throw ConfigError("this command needs a finite model");
  const auto& f = *c.finite;
  return build(f.l, f.r, f.letters, f.signs, f.x);
}

AsymptoticModel periodic_model(const ExperimentConfig& c) {
  if (!c.periodic) throw ConfigError("this command needs a periodic model");
  std::vector<std::vector<PeriodicSlot>> segs;
  for (const auto& s : c.periodic->segments) {
    std::vector<PeriodicSlot> seg;
    for (std::size_t k = 0; k < s.x.size(); ++k)
      seg.push_back({letter_from_char(s.letters[k]), sign_from_char(s.signs[k]), s.x[k],
                     s.zeta.empty() ? -1.0 : s.zeta[k]});
    segs.push_back(std::move(seg));
  }
  return AsymptoticModel(c.periodic->V, std::move(segs));
}

} // namespace railyard::cli
