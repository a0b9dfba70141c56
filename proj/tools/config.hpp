#pragma once

#include "railyard/model.hpp"
#include "railyard/spec.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace railyard::cli {

// Malformed or inconsistent configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

constexpr int kSchemaVersion = 1;

struct FiniteModel {
  int l = 1;
  int r = 0;
  std::string letters, signs;
  std::vector<double> x;
  bool operator==(const FiniteModel&) const = default;
};

// One segment of a periodic model. zeta < 0 means uniform (1/n).
struct SegmentConfig {
  std::string letters, signs;
  std::vector<double> x;
  std::vector<double> zeta;
  bool operator==(const SegmentConfig&) const = default;
};

struct PeriodicModel {
  std::vector<double> V;
  std::vector<SegmentConfig> segments;
  bool operator==(const PeriodicModel&) const = default;
};

enum class BoundaryKind { Empty, Partition, Staircase, Piecewise };

struct BoundaryConfig {
  BoundaryKind kind = BoundaryKind::Empty;
  std::vector<int> left;       // Partition
  int M = 1;                   // Staircase
  std::vector<double> levels;  // Piecewise, decreasing
  std::vector<double> blocks;  // Piecewise, rows per level
  bool operator==(const BoundaryConfig&) const = default;
};

struct KappaGrid {
  double min = 0.0, max = 0.0;
  int points = 0;
  bool operator==(const KappaGrid&) const = default;
};

struct TaskConfig {
  std::optional<double> chi;
  std::vector<int> moments{1, 2, 3};
  std::optional<KappaGrid> kappa;
  int kappa_points = 200;    // used when the kappa range is derived
  int per_interval = 2000;   // curve samples per parameter interval
  int samples = 100;
  std::optional<std::uint64_t> seed;
  int cap = 40;
  int N = 0;                 // realization scale for periodic sampling
  double tiny = 1e-8;        // stand-in for vanishing weights when sampling
  int winding_lines = 200;
  bool operator==(const TaskConfig&) const = default;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::optional<FiniteModel> finite;
  std::optional<PeriodicModel> periodic;
  BoundaryConfig boundary;
  TaskConfig task;
  std::string out_dir = "out";
  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

// Validated library objects. Throw InvalidInput (ConvergenceViolation for
// Assumption-type weight failures) or ConfigError.
RailYardSpec finite_spec(const ExperimentConfig& c);
AsymptoticModel periodic_model(const ExperimentConfig& c);

} // namespace railyard::cli
