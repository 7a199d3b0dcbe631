#include "offload/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "offload/error.hpp"

namespace offload {

void TerrainParams::validate() const {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("terrain parameters a and b must be positive");
    }
    if (!(eta_los >= 0.0) || !(eta_nlos > eta_los)) {
        throw DomainError("terrain losses need 0 <= eta_los < eta_nlos");
    }
}

void RadioParams::validate() const {
    if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz)) {
        throw DomainError("carrier frequency must be positive");
    }
    if (!std::isfinite(p_mbs_dbm) || !std::isfinite(p_uav_dbm) || !std::isfinite(noise_dbm)) {
        throw DomainError("transmit and noise powers must be finite");
    }
}

double watts_to_dbm(double watts) {
    if (!(watts > 0.0)) {
        throw DomainError("power in watts must be positive");
    }
    return 10.0 * std::log10(watts * 1e3);
}

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

double p_los(double theta_deg, const TerrainParams& terrain) {
    if (!(theta_deg >= 0.0 && theta_deg <= 90.0)) {
        throw DomainError("elevation angle must lie in [0, 90] degrees");
    }
    return 1.0 / (1.0 + terrain.a * std::exp(-terrain.b * (theta_deg - terrain.a)));
}

double free_space_loss(double distance_m, const RadioParams& radio) {
    if (!(distance_m > 0.0)) {
        throw DomainError("link distance must be positive");
    }
    const double ratio = 4.0 * std::numbers::pi * radio.frequency_hz * distance_m / kSpeedOfLight;
    const double log_ratio =
        radio.distance_log == DistanceLog::Decimal ? std::log10(ratio) : std::log(ratio);
    return 20.0 * log_ratio;
}

double pathloss_nlos(double distance_m, const TerrainParams& terrain, const RadioParams& radio) {
    return free_space_loss(distance_m, radio) + terrain.eta_nlos;
}

double pathloss_los(double distance_m, const TerrainParams& terrain, const RadioParams& radio) {
    return free_space_loss(distance_m, radio) + terrain.eta_los;
}

double pathloss_uav(double theta_deg, double distance_m, const TerrainParams& terrain,
                    const RadioParams& radio) {
    const double los = p_los(theta_deg, terrain);
    return los * pathloss_los(distance_m, terrain, radio) +
           (1.0 - los) * pathloss_nlos(distance_m, terrain, radio);
}

double pathloss_mbs(double distance_m, const TerrainParams& terrain, const RadioParams& radio) {
    return pathloss_nlos(distance_m, terrain, radio);
}

double snr(double transmit_power_db, double pathloss_db, double noise_db) noexcept {
    return transmit_power_db - pathloss_db - noise_db;
}

double elevation_deg(double horizontal_m, double height_m) noexcept {
    return std::atan2(height_m, horizontal_m) * 180.0 / std::numbers::pi;
}

void Placement::validate() const {
    if (!(height > 0.0) || !std::isfinite(height)) {
        throw DomainError("UAV height must be positive");
    }
    for (std::size_t i = 0; i < uavs.size(); ++i) {
        for (std::size_t j = i + 1; j < uavs.size(); ++j) {
            if (uavs[i] == uavs[j]) {
                throw DomainError("UAVs " + std::to_string(i) + " and " + std::to_string(j) +
                                  " share a position");
            }
        }
    }
}

std::vector<Point> ring_positions(int count, double radius_m) {
    if (count < 1 || !(radius_m > 0.0)) {
        throw DomainError("a ring needs at least one UAV and a positive radius");
    }
    std::vector<Point> points;
    for (int i = 0; i < count; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / count;
        points.push_back({radius_m * std::cos(angle), radius_m * std::sin(angle)});
    }
    return points;
}

double uav_snr_at(const Placement& placement, std::size_t uav, Point p,
                  const TerrainParams& terrain, const RadioParams& radio) {
    const Point& u = placement.uavs.at(uav);
    const double r = std::hypot(p.x - u.x, p.y - u.y);
    const double d = std::hypot(r, placement.height);
    const double loss = pathloss_uav(elevation_deg(r, placement.height), d, terrain, radio);
    return snr(radio.p_uav_dbm, loss, radio.noise_dbm);
}

double mbs_snr_at(Point p, const TerrainParams& terrain, const RadioParams& radio) {
    const double r = std::hypot(p.x, p.y);
    if (r == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return snr(radio.p_mbs_dbm, pathloss_mbs(r, terrain, radio), radio.noise_dbm);
}

int GridSpec::cells_per_side() const {
    validate();
    return static_cast<int>(std::lround(2.0 * extent / cell_size));
}

void GridSpec::validate() const {
    if (!(extent > 0.0) || !(cell_size > 0.0)) {
        throw DomainError("grid extent and cell size must be positive");
    }
    const double cells = 2.0 * extent / cell_size;
    if (std::abs(cells - std::round(cells)) > 1e-9 * cells) {
        throw DomainError("grid width 2*extent must be a whole number of cells");
    }
}

Point RegionGrid::cell_center(int row, int col) const noexcept {
    return {-spec.extent + (col + 0.5) * spec.cell_size,
            -spec.extent + (row + 0.5) * spec.cell_size};
}

RegionGrid partition_regions(const Placement& placement, const TerrainParams& terrain,
                             const RadioParams& radio, const GridSpec& grid, unsigned threads) {
    terrain.validate();
    radio.validate();
    placement.validate();
    RegionGrid out;
    out.spec = grid;
    out.side = grid.cells_per_side();
    for (const auto& u : placement.uavs) {
        if (std::abs(u.x) > grid.extent || std::abs(u.y) > grid.extent) {
            throw DomainError("analysis window does not cover every UAV");
        }
    }
    out.owner.assign(static_cast<std::size_t>(out.side) * out.side, kMbsOwner);

    // With a common height, UAV pathloss grows strictly with horizontal
    // distance (longer slant range, lower LoS probability), so the best UAV
    // at a point is the horizontally nearest one.
    auto run_rows = [&](int first, int step) {
        for (int row = first; row < out.side; row += step) {
            for (int col = 0; col < out.side; ++col) {
                const Point p = out.cell_center(row, col);
                std::size_t nearest = 0;
                double best_r2 = std::numeric_limits<double>::infinity();
                for (std::size_t n = 0; n < placement.uavs.size(); ++n) {
                    const double dx = p.x - placement.uavs[n].x;
                    const double dy = p.y - placement.uavs[n].y;
                    const double r2 = dx * dx + dy * dy;
                    if (r2 < best_r2) {
                        best_r2 = r2;
                        nearest = n;
                    }
                }
                if (placement.uavs.empty()) {
                    continue;
                }
                const double uav = uav_snr_at(placement, nearest, p, terrain, radio);
                if (uav > mbs_snr_at(p, terrain, radio)) {
                    out.owner[static_cast<std::size_t>(row) * out.side + col] =
                        static_cast<std::int32_t>(nearest);
                }
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, out.side));
    if (workers == 1) {
        run_rows(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < workers; ++i) {
            pool.emplace_back(run_rows, static_cast<int>(i), static_cast<int>(workers));
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    std::vector<long long> counts(placement.uavs.size(), 0);
    long long mbs_cells = 0;
    for (std::int32_t o : out.owner) {
        if (o == kMbsOwner) {
            ++mbs_cells;
        } else {
            ++counts[o];
        }
    }
    out.areas.resize(counts.size());
    for (std::size_t n = 0; n < counts.size(); ++n) {
        out.areas[n] = static_cast<double>(counts[n]) * out.cell_area();
    }
    out.mbs_area = static_cast<double>(mbs_cells) * out.cell_area();
    return out;
}

DerivedTypes derive_types(const RegionGrid& grid, const std::vector<double>& density_per_m2) {
    if (density_per_m2.size() != grid.areas.size()) {
        throw DomainError("need one density per UAV");
    }
    DerivedTypes out;
    for (std::size_t n = 0; n < grid.areas.size(); ++n) {
        const double rho = density_per_m2[n];
        if (!(rho > 0.0) || !std::isfinite(rho)) {
            throw DomainError("active-user density of UAV " + std::to_string(n) +
                              " must be positive");
        }
        const double lambda = grid.areas[n] * rho;
        out.lambdas.push_back(lambda);
        if (lambda > 0.0) {
            out.entries.push_back({PoissonMean(lambda), 1});
        } else {
            out.warnings.push_back("UAV " + std::to_string(n) +
                                   " has no offloading area and is excluded");
        }
    }
    return out;
}

SolverResult empty_result(Objective objective, const MbsLoad& mbs) {
    SolverResult r;
    r.objective = objective;
    const std::vector<double> cost = cost_curve(mbs.total_channels, mbs.load);
    for (ChannelCount w = 0; w <= mbs.total_channels; ++w) {
        r.trace.push_back({w, 0.0, -cost[w], 0.0, 0.0, 0});
    }
    return r;
}

std::vector<HeightRecord> height_sweep(const std::vector<double>& heights,
                                       const GeometryScenario& scenario, const MbsLoad& mbs,
                                       const SolverOptions& options) {
    if (heights.empty()) {
        throw DomainError("height sweep needs at least one height");
    }
    for (std::size_t i = 1; i < heights.size(); ++i) {
        if (!(heights[i] > heights[i - 1])) {
            throw DomainError("sweep heights must be strictly ascending");
        }
    }
    std::vector<HeightRecord> records;
    records.reserve(heights.size());
    Placement placement = scenario.placement;
    for (double h : heights) {
        placement.height = h;
        const RegionGrid grid = partition_regions(placement, scenario.terrain, scenario.radio,
                                                  scenario.grid, options.threads);
        const DerivedTypes types = derive_types(grid, scenario.density_per_m2);
        HeightRecord rec{h, grid.areas, types.lambdas, {}, types.warnings, {}, {}};
        if (types.empty()) {
            rec.mbs_optimal = empty_result(Objective::MbsRevenue, mbs);
            rec.social_optimal = empty_result(Objective::SocialWelfare, mbs);
        } else {
            const TypeLadder ladder = types.ladder();
            rec.ladder = ladder.entries();
            rec.mbs_optimal = solve(ladder, mbs, Objective::MbsRevenue, options);
            rec.social_optimal = solve(ladder, mbs, Objective::SocialWelfare, options);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace offload
