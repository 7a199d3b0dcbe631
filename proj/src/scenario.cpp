#include "offload/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "offload/error.hpp"

namespace offload {

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

const char* to_string(SweepParameter p) noexcept {
    switch (p) {
        case SweepParameter::Load: return "load";
        case SweepParameter::Channels: return "channels";
        case SweepParameter::Height: return "height";
    }
    return "?";
}

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::vector<Point> GeometryConfig::positions() const {
    return ring ? ring_positions(ring->count, ring->radius_m) : uavs;
}

GeometryScenario GeometryConfig::scenario() const {
    GeometryScenario s;
    s.terrain = terrain;
    s.radio = radio;
    s.placement = {positions(), height_m};
    for (double d : density_per_km2) {
        s.density_per_m2.push_back(d * 1e-6);
    }
    s.grid = grid;
    return s;
}

SolverOptions ScenarioConfig::solver_options() const {
    SolverOptions o;
    o.k_cap = k_cap;
    o.threads = threads;
    return o;
}

namespace {

int line_of(const YAML::Node& node) {
    const YAML::Mark m = node.Mark();
    return m.is_null() ? 0 : m.line + 1;
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
    throw ConfigError(message, line_of(node));
}

void check_keys(const YAML::Node& node, const std::string& section,
                std::initializer_list<const char*> allowed) {
    if (!node.IsMap()) {
        fail(node, "section '" + section + "' must be a mapping");
    }
    for (const auto& kv : node) {
        const std::string key = kv.first.as<std::string>();
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end()) {
            fail(kv.first, "unknown key '" + key + "' in section '" + section + "'");
        }
    }
}

std::string scalar(const YAML::Node& node, const std::string& what) {
    if (!node.IsScalar()) {
        fail(node, what + " must be a scalar");
    }
    return node.Scalar();
}

double number(const YAML::Node& node, const std::string& what) {
    const std::string s = scalar(node, what);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        fail(node, what + " must be a finite number, got '" + s + "'");
    }
    return v;
}

long long integer(const YAML::Node& node, const std::string& what) {
    const std::string s = scalar(node, what);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        fail(node, what + " must be an integer, got '" + s + "'");
    }
    return v;
}

bool boolean(const YAML::Node& node, const std::string& what) {
    const std::string s = scalar(node, what);
    if (s == "true") return true;
    if (s == "false") return false;
    fail(node, what + " must be true or false");
}

// "<value> W|mW|dBm|dBW", or a bare number taken as dBm.
double power_dbm(const YAML::Node& node, const std::string& what) {
    const std::string s = scalar(node, what);
    std::istringstream is(s);
    double v = 0.0;
    std::string unit;
    if (!(is >> v)) {
        fail(node, what + " must be a power such as '10 W' or '40 dBm'");
    }
    is >> unit;
    std::string rest;
    if (is >> rest) {
        fail(node, what + ": unexpected trailing text '" + rest + "'");
    }
    if (unit.empty() || unit == "dBm") return v;
    if (unit == "dBW") return v + 30.0;
    if (unit == "W" || unit == "mW") {
        if (!(v > 0.0)) fail(node, what + " in watts must be positive");
        return watts_to_dbm(unit == "W" ? v : v * 1e-3);
    }
    fail(node, what + ": unknown power unit '" + unit + "'");
}

template <typename T, typename F>
T required(const YAML::Node& parent, const char* key, const std::string& section, F&& convert) {
    const YAML::Node n = parent[key];
    if (!n) {
        fail(parent, "section '" + section + "' is missing '" + key + "'");
    }
    return convert(n, section + "." + key);
}

std::vector<double> number_list(const YAML::Node& node, const std::string& what) {
    if (node.IsSequence()) {
        std::vector<double> out;
        for (const auto& item : node) {
            out.push_back(number(item, what + " entry"));
        }
        return out;
    }
    if (node.IsMap()) {
        check_keys(node, what, {"from", "to", "step", "count"});
        const double from = required<double>(node, "from", what, number);
        const double to = required<double>(node, "to", what, number);
        std::vector<double> out;
        if (node["step"]) {
            const double step = number(node["step"], what + ".step");
            if (!(step > 0.0) || to < from) {
                fail(node, what + " needs step > 0 and to >= from");
            }
            const long long n = static_cast<long long>(std::floor((to - from) / step + 1e-9));
            for (long long i = 0; i <= n; ++i) {
                out.push_back(from + static_cast<double>(i) * step);
            }
        } else if (node["count"]) {
            const long long n = integer(node["count"], what + ".count");
            if (n < 1) fail(node, what + ".count must be positive");
            for (long long i = 0; i < n; ++i) {
                out.push_back(n == 1 ? from
                                     : from + (to - from) * static_cast<double>(i) /
                                                  static_cast<double>(n - 1));
            }
        } else {
            fail(node, what + " range needs 'step' or 'count'");
        }
        return out;
    }
    fail(node, what + " must be a list or a {from, to, step|count} range");
}

Objective objective_from(const YAML::Node& node) {
    const std::string s = scalar(node, "objective");
    if (s == "mbs-revenue") return Objective::MbsRevenue;
    if (s == "social-welfare") return Objective::SocialWelfare;
    fail(node, "unknown objective '" + s + "' (expected mbs-revenue or social-welfare)");
}

TerrainParams parse_terrain(const YAML::Node& node) {
    if (node.IsScalar()) {
        const std::string s = node.Scalar();
        if (s == "urban") return kUrbanTerrain;
        if (s == "suburban") return kSuburbanTerrain;
        if (s == "dense-urban") return kDenseUrbanTerrain;
        fail(node, "unknown terrain preset '" + s + "'");
    }
    check_keys(node, "geometry.terrain", {"a", "b", "eta_los", "eta_nlos"});
    const std::string sec = "geometry.terrain";
    TerrainParams t{required<double>(node, "a", sec, number),
                    required<double>(node, "b", sec, number),
                    required<double>(node, "eta_los", sec, number),
                    required<double>(node, "eta_nlos", sec, number)};
    try {
        t.validate();
    } catch (const DomainError& e) {
        fail(node, e.what());
    }
    return t;
}

RadioParams parse_radio(const YAML::Node& node) {
    const std::string sec = "geometry.radio";
    check_keys(node, sec,
               {"frequency_hz", "p_mbs", "p_uav", "noise", "channel_bandwidth_hz", "distance_log"});
    RadioParams r;
    if (node["frequency_hz"]) r.frequency_hz = number(node["frequency_hz"], sec + ".frequency_hz");
    if (node["p_mbs"]) r.p_mbs_dbm = power_dbm(node["p_mbs"], sec + ".p_mbs");
    if (node["p_uav"]) r.p_uav_dbm = power_dbm(node["p_uav"], sec + ".p_uav");
    if (node["noise"]) r.noise_dbm = power_dbm(node["noise"], sec + ".noise");
    if (node["channel_bandwidth_hz"]) {
        r.channel_bandwidth_hz = number(node["channel_bandwidth_hz"], sec + ".channel_bandwidth_hz");
    }
    if (node["distance_log"]) {
        const std::string s = scalar(node["distance_log"], sec + ".distance_log");
        if (s == "log10") {
            r.distance_log = DistanceLog::Decimal;
        } else if (s == "ln") {
            r.distance_log = DistanceLog::Natural;
        } else {
            fail(node["distance_log"], "distance_log must be log10 or ln");
        }
    }
    try {
        r.validate();
    } catch (const DomainError& e) {
        fail(node, e.what());
    }
    return r;
}

GeometryConfig parse_geometry(const YAML::Node& node) {
    check_keys(node, "geometry", {"terrain", "radio", "placement", "density_per_km2", "grid"});
    GeometryConfig g;
    if (node["terrain"]) g.terrain = parse_terrain(node["terrain"]);
    if (node["radio"]) g.radio = parse_radio(node["radio"]);

    const YAML::Node placement = node["placement"];
    if (!placement) fail(node, "section 'geometry' is missing 'placement'");
    check_keys(placement, "geometry.placement", {"height", "ring", "uavs"});
    g.height_m = required<double>(placement, "height", "geometry.placement", number);
    if (!(g.height_m > 0.0)) fail(placement, "UAV height must be positive");
    if (placement["ring"] && placement["uavs"]) {
        fail(placement, "give either 'ring' or 'uavs', not both");
    }
    if (const YAML::Node ring = placement["ring"]) {
        check_keys(ring, "geometry.placement.ring", {"count", "radius"});
        RingSpec spec;
        spec.count = static_cast<int>(required<long long>(ring, "count", "ring", integer));
        spec.radius_m = required<double>(ring, "radius", "ring", number);
        if (spec.count < 1 || !(spec.radius_m > 0.0)) {
            fail(ring, "ring needs count >= 1 and radius > 0");
        }
        g.ring = spec;
    } else if (const YAML::Node uavs = placement["uavs"]) {
        if (!uavs.IsSequence() || uavs.size() == 0) fail(uavs, "'uavs' must be a non-empty list");
        for (const auto& p : uavs) {
            if (!p.IsSequence() || p.size() != 2) fail(p, "each UAV position must be [x, y]");
            g.uavs.push_back({number(p[0], "uav x"), number(p[1], "uav y")});
        }
    } else {
        fail(placement, "placement needs 'ring' or 'uavs'");
    }
    const std::size_t n = g.positions().size();

    const YAML::Node density = node["density_per_km2"];
    if (!density) fail(node, "section 'geometry' is missing 'density_per_km2'");
    if (density.IsScalar()) {
        g.density_per_km2.assign(n, number(density, "density_per_km2"));
    } else if (density.IsMap() && !density["step"] && !density["count"]) {
        // {from, to}: spread evenly across the UAVs.
        check_keys(density, "density_per_km2", {"from", "to"});
        const double from = required<double>(density, "from", "density_per_km2", number);
        const double to = required<double>(density, "to", "density_per_km2", number);
        for (std::size_t i = 0; i < n; ++i) {
            g.density_per_km2.push_back(
                n == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(n - 1));
        }
    } else {
        g.density_per_km2 = number_list(density, "density_per_km2");
    }
    if (g.density_per_km2.size() != n) {
        fail(density, "need " + std::to_string(n) + " densities, got " +
                          std::to_string(g.density_per_km2.size()));
    }
    for (double d : g.density_per_km2) {
        if (!(d > 0.0)) fail(density, "densities must be positive");
    }

    if (const YAML::Node grid = node["grid"]) {
        check_keys(grid, "geometry.grid", {"extent", "cell_size"});
        if (grid["extent"]) g.grid.extent = number(grid["extent"], "grid.extent");
        if (grid["cell_size"]) g.grid.cell_size = number(grid["cell_size"], "grid.cell_size");
        try {
            g.grid.validate();
        } catch (const DomainError& e) {
            fail(grid, e.what());
        }
    }
    try {
        g.scenario().placement.validate();
    } catch (const DomainError& e) {
        fail(placement, e.what());
    }
    return g;
}

TypeLadder parse_ladder(const YAML::Node& node) {
    if (!node.IsSequence() || node.size() == 0) {
        fail(node, "'ladder' must be a non-empty list of {lambda, count} entries");
    }
    std::vector<TypeEntry> entries;
    for (const auto& item : node) {
        check_keys(item, "ladder", {"lambda", "count"});
        const double lambda = required<double>(item, "lambda", "ladder", number);
        long long count = 1;
        if (item["count"]) count = integer(item["count"], "ladder.count");
        if (!(lambda > 0.0)) fail(item, "ladder lambda must be positive");
        if (count < 1) fail(item, "ladder count must be at least 1");
        entries.push_back({PoissonMean(lambda), static_cast<int>(count)});
    }
    try {
        return TypeLadder(std::move(entries));
    } catch (const DomainError& e) {
        fail(node, e.what());
    }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, bool require_ladder_source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line + 1);
    }
    if (!root || root.IsNull()) {
        throw ConfigError("configuration is empty", 0);
    }
    check_keys(root, "<root>", {"name", "mbs", "ladder", "geometry", "solver", "sweep", "oracle", "output"});

    ScenarioConfig c;
    if (root["name"]) c.name = scalar(root["name"], "name");

    if (const YAML::Node mbs = root["mbs"]) {
        check_keys(mbs, "mbs", {"channels", "load"});
        if (mbs["channels"]) {
            const long long m = integer(mbs["channels"], "mbs.channels");
            if (m < 0 || m > 100000) fail(mbs["channels"], "mbs.channels must lie in [0, 100000]");
            c.channels = static_cast<ChannelCount>(m);
        }
        if (mbs["load"]) {
            c.load = number(mbs["load"], "mbs.load");
            if (!(c.load > 0.0)) fail(mbs["load"], "mbs.load must be positive");
        }
    }

    if (root["ladder"]) c.ladder = parse_ladder(root["ladder"]);
    if (root["geometry"]) c.geometry = parse_geometry(root["geometry"]);
    if (c.ladder && c.geometry) {
        fail(root["geometry"], "give either 'ladder' or 'geometry', not both");
    }
    if (require_ladder_source && !c.ladder && !c.geometry) {
        fail(root, "configuration needs a 'ladder' or a 'geometry' section");
    }

    if (const YAML::Node solver = root["solver"]) {
        check_keys(solver, "solver", {"objectives", "kcap", "threads"});
        if (const YAML::Node obj = solver["objectives"]) {
            if (!obj.IsSequence() || obj.size() == 0) fail(obj, "solver.objectives must be a non-empty list");
            c.objectives.clear();
            for (const auto& o : obj) c.objectives.push_back(objective_from(o));
        }
        if (solver["kcap"]) c.k_cap = boolean(solver["kcap"], "solver.kcap");
        if (solver["threads"]) {
            const long long t = integer(solver["threads"], "solver.threads");
            if (t < 1 || t > 256) fail(solver["threads"], "solver.threads must lie in [1, 256]");
            c.threads = static_cast<unsigned>(t);
        }
    }

    if (const YAML::Node sweep = root["sweep"]) {
        check_keys(sweep, "sweep", {"parameter", "values"});
        SweepConfig s;
        const std::string p = required<std::string>(sweep, "parameter", "sweep", scalar);
        if (p == "load") {
            s.parameter = SweepParameter::Load;
        } else if (p == "channels") {
            s.parameter = SweepParameter::Channels;
        } else if (p == "height") {
            s.parameter = SweepParameter::Height;
        } else {
            fail(sweep["parameter"], "sweep.parameter must be load, channels or height");
        }
        s.values = required<std::vector<double>>(sweep, "values", "sweep", number_list);
        if (s.values.empty()) fail(sweep, "sweep.values is empty");
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (!(s.values[i] > 0.0) && s.parameter != SweepParameter::Channels) {
                fail(sweep["values"], "sweep values must be positive");
            }
            if (s.parameter == SweepParameter::Channels &&
                (s.values[i] < 0 || s.values[i] != std::floor(s.values[i]))) {
                fail(sweep["values"], "channel sweep values must be non-negative integers");
            }
            if (i > 0 && !(s.values[i] > s.values[i - 1])) {
                fail(sweep["values"], "sweep values must be strictly ascending");
            }
        }
        if (s.parameter == SweepParameter::Height && !c.geometry) {
            fail(sweep, "a height sweep needs a 'geometry' section");
        }
        c.sweep = s;
    }

    if (const YAML::Node oracle = root["oracle"]) {
        check_keys(oracle, "oracle",
                   {"instances", "seed", "max_types", "max_channels", "max_count", "lambda_min",
                    "lambda_max", "load_min", "load_max", "search_cap"});
        OracleConfig& o = c.oracle;
        if (oracle["instances"]) o.instances = static_cast<int>(integer(oracle["instances"], "oracle.instances"));
        if (oracle["seed"]) o.seed = static_cast<std::uint64_t>(integer(oracle["seed"], "oracle.seed"));
        if (oracle["max_types"]) o.max_types = static_cast<int>(integer(oracle["max_types"], "oracle.max_types"));
        if (oracle["max_channels"]) o.max_channels = static_cast<int>(integer(oracle["max_channels"], "oracle.max_channels"));
        if (oracle["max_count"]) o.max_count = static_cast<int>(integer(oracle["max_count"], "oracle.max_count"));
        if (oracle["lambda_min"]) o.lambda_min = number(oracle["lambda_min"], "oracle.lambda_min");
        if (oracle["lambda_max"]) o.lambda_max = number(oracle["lambda_max"], "oracle.lambda_max");
        if (oracle["load_min"]) o.load_min = number(oracle["load_min"], "oracle.load_min");
        if (oracle["load_max"]) o.load_max = number(oracle["load_max"], "oracle.load_max");
        if (oracle["search_cap"]) o.search_cap = number(oracle["search_cap"], "oracle.search_cap");
        if (o.instances < 0 || o.max_types < 1 || o.max_channels < 0 || o.max_count < 1 ||
            !(o.lambda_min >= 0.0 && o.lambda_max > o.lambda_min) ||
            !(o.load_min > 0.0 && o.load_max >= o.load_min) || !(o.search_cap > 0.0)) {
            fail(oracle, "oracle settings out of range");
        }
    }

    if (const YAML::Node output = root["output"]) {
        check_keys(output, "output", {"dir"});
        if (output["dir"]) c.output_dir = scalar(output["dir"], "output.dir");
    }
    return c;
}

ScenarioConfig load_config(const std::string& path, bool require_ladder_source) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), require_ladder_source);
}

std::string dump_config(const ScenarioConfig& c) {
    auto num = [](double v) { return format_number(v); };
    auto dbm = [&](double v) { return num(v) + " dBm"; };
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << c.name;
    out << YAML::Key << "mbs" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "channels" << YAML::Value << c.channels;
    out << YAML::Key << "load" << YAML::Value << num(c.load);
    out << YAML::EndMap;
    if (c.ladder) {
        out << YAML::Key << "ladder" << YAML::Value << YAML::BeginSeq;
        for (const auto& e : c.ladder->entries()) {
            out << YAML::Flow << YAML::BeginMap << YAML::Key << "lambda" << YAML::Value
                << num(e.lambda.value()) << YAML::Key << "count" << YAML::Value << e.count
                << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }
    if (c.geometry) {
        const GeometryConfig& g = *c.geometry;
        out << YAML::Key << "geometry" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "terrain" << YAML::Value << YAML::BeginMap
            << YAML::Key << "a" << YAML::Value << num(g.terrain.a)
            << YAML::Key << "b" << YAML::Value << num(g.terrain.b)
            << YAML::Key << "eta_los" << YAML::Value << num(g.terrain.eta_los)
            << YAML::Key << "eta_nlos" << YAML::Value << num(g.terrain.eta_nlos) << YAML::EndMap;
        out << YAML::Key << "radio" << YAML::Value << YAML::BeginMap
            << YAML::Key << "frequency_hz" << YAML::Value << num(g.radio.frequency_hz)
            << YAML::Key << "p_mbs" << YAML::Value << dbm(g.radio.p_mbs_dbm)
            << YAML::Key << "p_uav" << YAML::Value << dbm(g.radio.p_uav_dbm)
            << YAML::Key << "noise" << YAML::Value << dbm(g.radio.noise_dbm)
            << YAML::Key << "channel_bandwidth_hz" << YAML::Value << num(g.radio.channel_bandwidth_hz)
            << YAML::Key << "distance_log" << YAML::Value
            << (g.radio.distance_log == DistanceLog::Decimal ? "log10" : "ln") << YAML::EndMap;
        out << YAML::Key << "placement" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "height" << YAML::Value << num(g.height_m);
        if (g.ring) {
            out << YAML::Key << "ring" << YAML::Value << YAML::Flow << YAML::BeginMap
                << YAML::Key << "count" << YAML::Value << g.ring->count
                << YAML::Key << "radius" << YAML::Value << num(g.ring->radius_m) << YAML::EndMap;
        } else {
            out << YAML::Key << "uavs" << YAML::Value << YAML::BeginSeq;
            for (const auto& p : g.uavs) {
                out << YAML::Flow << YAML::BeginSeq << num(p.x) << num(p.y) << YAML::EndSeq;
            }
            out << YAML::EndSeq;
        }
        out << YAML::EndMap;
        out << YAML::Key << "density_per_km2" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (double d : g.density_per_km2) out << num(d);
        out << YAML::EndSeq;
        out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap
            << YAML::Key << "extent" << YAML::Value << num(g.grid.extent)
            << YAML::Key << "cell_size" << YAML::Value << num(g.grid.cell_size) << YAML::EndMap;
        out << YAML::EndMap;
    }
    out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "objectives" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (Objective o : c.objectives) out << to_string(o);
    out << YAML::EndSeq;
    out << YAML::Key << "kcap" << YAML::Value << (c.k_cap ? "true" : "false");
    out << YAML::Key << "threads" << YAML::Value << c.threads;
    out << YAML::EndMap;
    if (c.sweep) {
        out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "parameter" << YAML::Value << to_string(c.sweep->parameter);
        out << YAML::Key << "values" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (double v : c.sweep->values) out << num(v);
        out << YAML::EndSeq << YAML::EndMap;
    }
    const OracleConfig& o = c.oracle;
    out << YAML::Key << "oracle" << YAML::Value << YAML::BeginMap
        << YAML::Key << "instances" << YAML::Value << o.instances
        << YAML::Key << "seed" << YAML::Value << o.seed
        << YAML::Key << "max_types" << YAML::Value << o.max_types
        << YAML::Key << "max_channels" << YAML::Value << o.max_channels
        << YAML::Key << "max_count" << YAML::Value << o.max_count
        << YAML::Key << "lambda_min" << YAML::Value << num(o.lambda_min)
        << YAML::Key << "lambda_max" << YAML::Value << num(o.lambda_max)
        << YAML::Key << "load_min" << YAML::Value << num(o.load_min)
        << YAML::Key << "load_max" << YAML::Value << num(o.load_max)
        << YAML::Key << "search_cap" << YAML::Value << num(o.search_cap) << YAML::EndMap;
    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap
        << YAML::Key << "dir" << YAML::Value << YAML::DoubleQuoted << c.output_dir << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace offload
