#pragma once

// Air-to-ground channel model, best-SNR cell partition of the ground plane
// into offloading regions, and derivation of UAV types from region areas.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "offload/contract.hpp"
#include "offload/solver.hpp"

namespace offload {

inline constexpr double kSpeedOfLight = 2.99792458e8;

struct TerrainParams {
    double a;
    double b;         // per degree
    double eta_los;   // dB
    double eta_nlos;  // dB

    void validate() const;
    friend bool operator==(const TerrainParams&, const TerrainParams&) = default;
};

inline constexpr TerrainParams kUrbanTerrain{11.95, 0.136, 2.0, 20.0};
inline constexpr TerrainParams kSuburbanTerrain{5.0, 0.2, 0.1, 21.0};
inline constexpr TerrainParams kDenseUrbanTerrain{14.0, 0.12, 1.6, 23.0};

/// Logarithm applied to the free-space term 20 log(4 pi f d / c).
enum class DistanceLog { Decimal, Natural };

struct RadioParams {
    double frequency_hz = 3e9;
    double p_mbs_dbm = 40.0;   // 10 W
    double p_uav_dbm = 16.9897000433601880;  // 50 mW
    double noise_dbm = -120.0;
    double channel_bandwidth_hz = 180e3;  // carried as metadata only
    DistanceLog distance_log = DistanceLog::Decimal;

    void validate() const;
    friend bool operator==(const RadioParams&, const RadioParams&) = default;
};

double watts_to_dbm(double watts);
double dbm_to_watts(double dbm);

/// LoS probability at elevation angle `theta_deg` in [0, 90].
double p_los(double theta_deg, const TerrainParams& terrain);

double free_space_loss(double distance_m, const RadioParams& radio);
double pathloss_nlos(double distance_m, const TerrainParams& terrain, const RadioParams& radio);
double pathloss_los(double distance_m, const TerrainParams& terrain, const RadioParams& radio);

/// Average UAV-to-ground pathloss (dB) at elevation `theta_deg` and slant distance `distance_m`.
double pathloss_uav(double theta_deg, double distance_m, const TerrainParams& terrain,
                    const RadioParams& radio);

/// MBS-to-ground pathloss (dB); the MBS link is NLoS only.
double pathloss_mbs(double distance_m, const TerrainParams& terrain, const RadioParams& radio);

/// SNR in dB: transmit power minus pathloss minus noise, all on dB scales.
double snr(double transmit_power_db, double pathloss_db, double noise_db) noexcept;

double elevation_deg(double horizontal_m, double height_m) noexcept;

struct Point {
    double x;
    double y;

    friend bool operator==(const Point&, const Point&) = default;
};

/// MBS at the origin; all UAVs hover at the same height.
struct Placement {
    std::vector<Point> uavs;
    double height;

    void validate() const;
    friend bool operator==(const Placement&, const Placement&) = default;
};

/// `count` UAVs evenly spaced on a circle around the MBS, the first on the +x axis.
std::vector<Point> ring_positions(int count, double radius_m);

/// SNR of UAV `uav` at ground point `p`.
double uav_snr_at(const Placement& placement, std::size_t uav, Point p,
                  const TerrainParams& terrain, const RadioParams& radio);
double mbs_snr_at(Point p, const TerrainParams& terrain, const RadioParams& radio);

inline constexpr std::int32_t kMbsOwner = -1;

struct GridSpec {
    double extent = 3000.0;  // half-width of the square window, m
    double cell_size = 5.0;  // m

    int cells_per_side() const;
    void validate() const;
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct RegionGrid {
    GridSpec spec;
    int side = 0;
    std::vector<std::int32_t> owner;  // row-major, kMbsOwner or UAV index
    std::vector<double> areas;        // per UAV, m^2
    double mbs_area = 0.0;

    Point cell_center(int row, int col) const noexcept;
    std::int32_t owner_at(int row, int col) const { return owner.at(static_cast<std::size_t>(row) * side + col); }
    double cell_area() const noexcept { return spec.cell_size * spec.cell_size; }
};

/// Assigns every cell to the transmitter with the best SNR at its center.
/// Ties go to the MBS, then to the lowest UAV index.
RegionGrid partition_regions(const Placement& placement, const TerrainParams& terrain,
                             const RadioParams& radio, const GridSpec& grid, unsigned threads = 1);

struct DerivedTypes {
    std::vector<double> lambdas;  // per UAV; zero for UAVs without area
    std::vector<TypeEntry> entries;
    std::vector<std::string> warnings;

    bool empty() const noexcept { return entries.empty(); }
    TypeLadder ladder() const { return TypeLadder::merged(entries); }
};

/// lambda_n = S_n * rho_n with densities in users per m^2.
DerivedTypes derive_types(const RegionGrid& grid, const std::vector<double>& density_per_m2);

struct GeometryScenario {
    TerrainParams terrain = kUrbanTerrain;
    RadioParams radio;
    Placement placement;
    std::vector<double> density_per_m2;
    GridSpec grid;
};

struct HeightRecord {
    double height;
    std::vector<double> areas;
    std::vector<double> lambdas;
    std::vector<TypeEntry> ladder;
    std::vector<std::string> warnings;
    SolverResult mbs_optimal;
    SolverResult social_optimal;
};

/// Partition, type derivation and both solvers at every height.
std::vector<HeightRecord> height_sweep(const std::vector<double>& heights,
                                       const GeometryScenario& scenario, const MbsLoad& mbs,
                                       const SolverOptions& options = {});

/// Empty-ladder result: no channels sold, nothing earned.
SolverResult empty_result(Objective objective, const MbsLoad& mbs);

}  // namespace offload
