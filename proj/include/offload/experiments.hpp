#pragma once

// Batch experiments behind the CLI subcommands. Each writes CSV tables to
// an output directory and returns a short human-readable summary.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "offload/scenario.hpp"

namespace offload {

inline constexpr const char* kToolVersion = "0.1.0";

/// Rectangular table of pre-formatted cells in deterministic row order.
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

/// Comma-separated, LF, header row. The first line is a `#` metadata
/// comment carrying the version, a config hash and a timestamp.
void write_table(const std::string& path, const ResultTable& table, const std::string& config_hash);
std::string table_to_csv(const ResultTable& table);

/// FNV-1a 64-bit hash of a config's canonical dump, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

struct SolvedScenario {
    TypeLadder ladder;
    std::vector<SolverResult> results;  // one per configured objective
};

/// Ladder for a config: explicit, or derived from its geometry block.
/// Throws DomainError if the geometry leaves every UAV without area.
TypeLadder resolve_ladder(const ScenarioConfig& config, std::vector<std::string>* warnings = nullptr);

SolvedScenario run_solve(const ScenarioConfig& config, const std::string& out_dir, std::ostream& log);

struct SweepRow {
    double value;
    SolverResult mbs_optimal;
    SolverResult social_optimal;
};

std::vector<SweepRow> run_sweep(const ScenarioConfig& config, const std::string& out_dir,
                                std::ostream& log);

struct OracleMismatch {
    std::string instance;  // "random #i" or the name of a tie probe
    std::uint64_t seed;    // 0 for tie probes
    std::string description;
};

struct OracleReport {
    int instances = 0;
    int checks = 0;
    std::vector<OracleMismatch> mismatches;

    bool passed() const noexcept { return mismatches.empty(); }
};

struct OracleInstance {
    TypeLadder ladder;
    MbsLoad mbs;
};

/// Random small instance drawn from the oracle bounds with its own seed.
OracleInstance random_oracle_instance(const OracleConfig& bounds, std::uint64_t seed);

struct NamedInstance {
    std::string name;
    OracleInstance instance;
};

/// Fixed instances with saturated types facing a lightly loaded MBS. Several
/// assignments tie within tolerance while every other gap is far from it,
/// so only the tie-break decides the answer.
std::vector<NamedInstance> tie_probe_instances();

/// Compares solve against brute_force_solve on random instances and the
/// tie probes, both objectives.
OracleReport run_oracle_check(const OracleConfig& oracle, const SolverOptions& options,
                              std::ostream& log);

}  // namespace offload
