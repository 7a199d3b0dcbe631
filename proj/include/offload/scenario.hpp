#pragma once

// Scenario configuration: a YAML document with nested sections. The schema
// is documented in README.md; presets live under presets/.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "offload/geometry.hpp"
#include "offload/solver.hpp"

namespace offload {

/// Invalid configuration, with the 1-based line it refers to (0 if unknown).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, int line);
    int line() const noexcept { return line_; }

private:
    int line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RingSpec {
    int count = 10;
    double radius_m = 1000.0;
    friend bool operator==(const RingSpec&, const RingSpec&) = default;
};

struct GeometryConfig {
    TerrainParams terrain = kUrbanTerrain;
    RadioParams radio;
    double height_m = 674.0;
    std::optional<RingSpec> ring;
    std::vector<Point> uavs;  // used when no ring is given
    std::vector<double> density_per_km2;
    GridSpec grid;

    std::vector<Point> positions() const;
    GeometryScenario scenario() const;
    friend bool operator==(const GeometryConfig&, const GeometryConfig&) = default;
};

enum class SweepParameter { Load, Channels, Height };

const char* to_string(SweepParameter p) noexcept;

struct SweepConfig {
    SweepParameter parameter = SweepParameter::Load;
    std::vector<double> values;
    friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct OracleConfig {
    int instances = 200;
    std::uint64_t seed = 1;
    int max_types = 3;
    int max_channels = 12;
    int max_count = 3;
    double lambda_min = 0.5;  // exclusive
    double lambda_max = 5.0;
    double load_min = 1.0;
    double load_max = 10.0;
    double search_cap = kDefaultSearchCap;
    friend bool operator==(const OracleConfig&, const OracleConfig&) = default;
};

struct ScenarioConfig {
    std::string name = "scenario";
    ChannelCount channels = 200;
    double load = 120.0;
    std::optional<TypeLadder> ladder;
    std::optional<GeometryConfig> geometry;
    std::vector<Objective> objectives{Objective::MbsRevenue, Objective::SocialWelfare};
    bool k_cap = true;
    unsigned threads = 1;
    std::optional<SweepConfig> sweep;
    OracleConfig oracle;
    std::string output_dir = "out";

    MbsLoad mbs() const { return MbsLoad(channels, PoissonMean(load)); }
    SolverOptions solver_options() const;
    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses YAML text. `require_ladder_source` enforces exactly one of
/// `ladder` / `geometry`; oracle-check configs may omit both.
ScenarioConfig parse_config(const std::string& text, bool require_ladder_source = true);
ScenarioConfig load_config(const std::string& path, bool require_ladder_source = true);

/// Canonical YAML with every field explicit; re-parses to an equal config.
std::string dump_config(const ScenarioConfig& config);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

}  // namespace offload
