#include "offload/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "offload/error.hpp"

namespace offload {

namespace fs = std::filesystem;

void ResultTable::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) {
        throw DomainError("row has " + std::to_string(row.size()) + " cells, table has " +
                          std::to_string(columns.size()) + " columns");
    }
    rows.push_back(std::move(row));
}

std::string table_to_csv(const ResultTable& table) {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(table.columns);
    for (const auto& r : table.rows) line(r);
    return out;
}

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::string num(double v) { return format_number(v); }
std::string num(long long v) { return std::to_string(v); }

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    }
}

double price_total(const std::vector<TypeEntry>& entries, const SolverResult& r) {
    double total = 0.0;
    for (std::size_t t = 0; t < r.contract.prices.size(); ++t) {
        total += entries.at(t).count * r.contract.prices[t];
    }
    return total;
}

ResultTable contract_table(const TypeLadder& ladder, const SolverResult& r) {
    ResultTable tab{{"t", "lambda", "count", "w", "p", "surplus"}, {}};
    for (std::size_t t = 0; t < ladder.size(); ++t) {
        const double u = uav_utility(ladder.lambda(t), r.contract.assignment[t]);
        tab.add_row({num(static_cast<long long>(t + 1)), num(ladder.lambda(t).value()),
                     num(static_cast<long long>(ladder.count(t))),
                     num(static_cast<long long>(r.contract.assignment[t])), num(r.contract.prices[t]),
                     num(u - r.contract.prices[t])});
    }
    return tab;
}

ResultTable trace_table(const SolverResult& r) {
    ResultTable tab{{"W", "inner_value", "objective", "revenue", "welfare", "sold"}, {}};
    for (const auto& row : r.trace) {
        tab.add_row({num(static_cast<long long>(row.capacity)), num(row.inner_value),
                     num(row.objective), num(row.revenue), num(row.welfare),
                     num(static_cast<long long>(row.sold))});
    }
    return tab;
}

void write_regions(const std::string& path, const ScenarioConfig& config, const RegionGrid& grid,
                   const DerivedTypes& types, const std::string& hash) {
    const auto positions = config.geometry->positions();
    ResultTable tab{{"uav", "x", "y", "area_m2", "density_per_km2", "lambda"}, {}};
    for (std::size_t n = 0; n < positions.size(); ++n) {
        tab.add_row({num(static_cast<long long>(n)), num(positions[n].x), num(positions[n].y),
                     num(grid.areas[n]), num(config.geometry->density_per_km2[n]),
                     num(types.lambdas[n])});
    }
    write_table(path, tab, hash);
}

}  // namespace

void write_table(const std::string& path, const ResultTable& table, const std::string& hash) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    out << "# offload " << kToolVersion << " config=" << hash << " generated=" << utc_timestamp()
        << '\n'
        << table_to_csv(table);
    if (!out) {
        throw IoError("write failed for '" + path + "'");
    }
}

std::string config_hash(const ScenarioConfig& config) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump_config(config)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

TypeLadder resolve_ladder(const ScenarioConfig& config, std::vector<std::string>* warnings) {
    if (config.ladder) {
        return *config.ladder;
    }
    if (!config.geometry) {
        throw DomainError("configuration has neither a ladder nor a geometry block");
    }
    const GeometryScenario s = config.geometry->scenario();
    const RegionGrid grid = partition_regions(s.placement, s.terrain, s.radio, s.grid, config.threads);
    const DerivedTypes types = derive_types(grid, s.density_per_m2);
    if (warnings) {
        warnings->insert(warnings->end(), types.warnings.begin(), types.warnings.end());
    }
    if (types.empty()) {
        throw DomainError("no UAV has an offloading region at height " + format_number(s.placement.height));
    }
    return types.ladder();
}

SolvedScenario run_solve(const ScenarioConfig& config, const std::string& out_dir, std::ostream& log) {
    ensure_dir(out_dir);
    const std::string hash = config_hash(config);
    std::vector<std::string> warnings;
    SolvedScenario solved{resolve_ladder(config, &warnings), {}};
    for (const auto& w : warnings) log << "warning: " << w << '\n';
    if (config.geometry) {
        const GeometryScenario s = config.geometry->scenario();
        const RegionGrid grid = partition_regions(s.placement, s.terrain, s.radio, s.grid, config.threads);
        write_regions((fs::path(out_dir) / "regions.csv").string(), config, grid,
                      derive_types(grid, s.density_per_m2), hash);
    }
    const MbsLoad mbs = config.mbs();
    ResultTable summary{{"objective", "sold", "price_total", "revenue", "welfare", "operator_surplus"}, {}};
    for (Objective o : config.objectives) {
        SolverResult r = solve(solved.ladder, mbs, o, config.solver_options());
        const std::string tag = o == Objective::MbsRevenue ? "mbs" : "social";
        write_table((fs::path(out_dir) / ("contract_" + tag + ".csv")).string(),
                    contract_table(solved.ladder, r), hash);
        write_table((fs::path(out_dir) / ("trace_" + tag + ".csv")).string(), trace_table(r), hash);
        summary.add_row({to_string(o), num(static_cast<long long>(r.sold)),
                         num(price_total(solved.ladder.entries(), r)), num(r.revenue), num(r.welfare),
                         num(r.welfare - r.revenue)});
        log << to_string(o) << ": sold=" << r.sold << " revenue=" << num(r.revenue)
            << " welfare=" << num(r.welfare) << '\n';
        solved.results.push_back(std::move(r));
    }
    write_table((fs::path(out_dir) / "summary.csv").string(), summary, hash);
    return solved;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& config, const std::string& out_dir,
                                std::ostream& log) {
    if (!config.sweep) {
        throw DomainError("configuration has no 'sweep' section");
    }
    ensure_dir(out_dir);
    const std::string hash = config_hash(config);
    const SweepConfig& sweep = *config.sweep;
    const SolverOptions options = config.solver_options();
    std::vector<SweepRow> rows;

    ResultTable tab{{to_string(sweep.parameter), "mbs_sold", "mbs_price_total", "mbs_revenue",
                     "mbs_welfare", "social_sold", "social_price_total", "social_revenue",
                     "social_welfare"},
                    {}};
    auto add = [&](const std::vector<TypeEntry>& ladder, SweepRow row, std::vector<std::string> extra) {
        std::vector<std::string> cells{
            num(row.value),
            num(static_cast<long long>(row.mbs_optimal.sold)),
            num(price_total(ladder, row.mbs_optimal)),
            num(row.mbs_optimal.revenue),
            num(row.mbs_optimal.welfare),
            num(static_cast<long long>(row.social_optimal.sold)),
            num(price_total(ladder, row.social_optimal)),
            num(row.social_optimal.revenue),
            num(row.social_optimal.welfare)};
        cells.insert(cells.end(), extra.begin(), extra.end());
        tab.add_row(std::move(cells));
        log << to_string(sweep.parameter) << "=" << num(row.value)
            << " mbs_sold=" << row.mbs_optimal.sold << " social_sold=" << row.social_optimal.sold
            << " mbs_revenue=" << num(row.mbs_optimal.revenue) << '\n';
        rows.push_back(std::move(row));
    };

    if (sweep.parameter == SweepParameter::Height) {
        tab.columns.push_back("total_area_m2");
        tab.columns.push_back("types");
        ResultTable areas{{"height", "uav", "area_m2", "lambda"}, {}};
        const GeometryScenario scenario = config.geometry->scenario();
        const auto records = height_sweep(sweep.values, scenario, config.mbs(), options);
        for (const auto& rec : records) {
            double total = 0.0;
            for (std::size_t n = 0; n < rec.areas.size(); ++n) {
                total += rec.areas[n];
                areas.add_row({num(rec.height), num(static_cast<long long>(n)), num(rec.areas[n]),
                               num(rec.lambdas[n])});
            }
            for (const auto& w : rec.warnings) log << "warning: H=" << num(rec.height) << ": " << w << '\n';
            add(rec.ladder, {rec.height, rec.mbs_optimal, rec.social_optimal},
                {num(total), num(static_cast<long long>(rec.ladder.size()))});
        }
        write_table((fs::path(out_dir) / "sweep_areas.csv").string(), areas, hash);
    } else {
        const TypeLadder ladder = resolve_ladder(config);
        for (double v : sweep.values) {
            const MbsLoad mbs = sweep.parameter == SweepParameter::Load
                                    ? MbsLoad(config.channels, PoissonMean(v))
                                    : MbsLoad(static_cast<ChannelCount>(v), PoissonMean(config.load));
            add(ladder.entries(),
                {v, solve(ladder, mbs, Objective::MbsRevenue, options),
                 solve(ladder, mbs, Objective::SocialWelfare, options)},
                {});
        }
    }
    write_table((fs::path(out_dir) / "sweep.csv").string(), tab, hash);
    return rows;
}

OracleInstance random_oracle_instance(const OracleConfig& b, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double lo, double hi) {
        // 53-bit draw in [0, 1), mapped to (lo, hi].
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return hi - (hi - lo) * u;
    };
    auto pick = [&rng](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    const int types = pick(1, b.max_types);
    std::vector<TypeEntry> entries;
    while (static_cast<int>(entries.size()) < types) {
        const double lambda = uniform(b.lambda_min, b.lambda_max);
        bool duplicate = false;
        for (const auto& e : entries) duplicate = duplicate || e.lambda.value() == lambda;
        if (!duplicate) entries.push_back({PoissonMean(lambda), pick(1, b.max_count)});
    }
    std::sort(entries.begin(), entries.end(),
              [](const TypeEntry& x, const TypeEntry& y) { return x.lambda < y.lambda; });
    const double load = uniform(b.load_min, b.load_max);
    return {TypeLadder(std::move(entries)), MbsLoad(pick(0, b.max_channels), PoissonMean(load))};
}

std::vector<NamedInstance> tie_probe_instances() {
    auto ladder = [](std::vector<std::pair<double, int>> v) {
        std::vector<TypeEntry> e;
        for (auto [l, n] : v) e.push_back({PoissonMean(l), n});
        return TypeLadder(std::move(e));
    };
    return {
        {"saturated-single", {ladder({{0.02, 1}}), MbsLoad(30, PoissonMean(0.5))}},
        {"saturated-pair", {ladder({{0.02, 2}, {0.05, 1}}), MbsLoad(40, PoissonMean(0.5))}},
    };
}

namespace {

void check_instance(const std::string& name, std::uint64_t seed, const OracleInstance& inst,
                    const OracleConfig& oracle, const SolverOptions& options, OracleReport& report,
                    std::ostream& log) {
    const double tol = 1e-9;
    for (Objective o : {Objective::MbsRevenue, Objective::SocialWelfare}) {
        const SolverResult dp = solve(inst.ladder, inst.mbs, o, options);
        const SolverResult bf = brute_force_solve(inst.ladder, inst.mbs, o, oracle.search_cap);
        ++report.checks;
        std::ostringstream why;
        if (std::abs(dp.objective_value - bf.objective_value) > tol) {
            why << "objective " << num(dp.objective_value) << " vs " << num(bf.objective_value);
        } else if (dp.contract.assignment != bf.contract.assignment) {
            why << "assignment differs (dp/oracle):";
            for (std::size_t t = 0; t < dp.contract.assignment.size(); ++t) {
                why << ' ' << dp.contract.assignment[t] << '/' << bf.contract.assignment[t];
            }
        }
        if (!why.str().empty()) {
            std::ostringstream d;
            d << to_string(o) << " T=" << inst.ladder.size() << " M=" << inst.mbs.total_channels
              << ": " << why.str();
            report.mismatches.push_back({name, seed, d.str()});
            log << "MISMATCH " << name;
            if (seed != 0) log << " seed " << seed;
            log << ' ' << d.str() << '\n';
        }
    }
}

}  // namespace

OracleReport run_oracle_check(const OracleConfig& oracle, const SolverOptions& options,
                              std::ostream& log) {
    OracleReport report;
    report.instances = oracle.instances;
    if (oracle.instances == 0) {
        log << "warning: 0 instances requested; nothing to check\n";
        return report;
    }
    for (int i = 0; i < oracle.instances; ++i) {
        const std::uint64_t seed = oracle.seed + static_cast<std::uint64_t>(i);
        check_instance("random #" + std::to_string(i), seed, random_oracle_instance(oracle, seed),
                       oracle, options, report, log);
    }
    for (const auto& probe : tie_probe_instances()) {
        check_instance(probe.name, 0, probe.instance, oracle, options, report, log);
    }
    log << (report.passed() ? "PASS" : "FAIL") << ": " << report.checks << " checks over "
        << report.instances << " random instances and " << tie_probe_instances().size()
        << " tie probes, " << report.mismatches.size() << " mismatches\n";
    return report;
}

}  // namespace offload
