// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "offload/experiments.hpp"
#include "offload/geometry.hpp"
#include "offload/scenario.hpp"
#include "offload/solver.hpp"

using namespace offload;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Report {
    int failed = 0;
    void line(bool pass, const std::string& name, const std::string& detail) {
        std::cout << (pass ? "PASS " : "FAIL ") << name << '\n';
        std::istringstream in(detail);
        for (std::string l; std::getline(in, l);) std::cout << "    " << l << '\n';
        std::cout.flush();
        failed += pass ? 0 : 1;
    }
};

std::string preset(const std::string& name) {
    return std::string(OFFLOAD_SOURCE_DIR) + "/presets/" + name;
}

TypeLadder ten_type_ladder() {
    std::vector<TypeEntry> e;
    for (int l = 1; l <= 10; ++l) e.push_back({PoissonMean(l), 1});
    return TypeLadder(std::move(e));
}

std::string fmt(double v, int digits = 6) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

// ---- 1. channel counts ---------------------------------------------------------

void channel_counts(Report& rep) {
    const TypeLadder ladder = ten_type_ladder();
    struct Want {
        double load;
        int mbs;
        int social;
    };
    bool ok = true;
    std::ostringstream d;
    for (const Want w : {Want{120, 60, 71}, Want{160, 39, 45}}) {
        const MbsLoad mbs(200, PoissonMean(w.load));
        auto t0 = Clock::now();
        const auto m = solve(ladder, mbs, Objective::MbsRevenue);
        const double tm = seconds_since(t0);
        t0 = Clock::now();
        const auto s = solve(ladder, mbs, Objective::SocialWelfare);
        const double ts = seconds_since(t0);
        const bool pass = m.sold == w.mbs && s.sold == w.social && tm <= 120 && ts <= 120;
        ok &= pass;
        d << "load " << w.load << ": MBS sold " << m.sold << " (want " << w.mbs << ", " << fmt(tm, 3)
          << " s), social sold " << s.sold << " (want " << w.social << ", " << fmt(ts, 3) << " s)\n";
    }
    rep.line(ok, "1 ten-type ladder channels sold at loads 120 and 160", d.str());
}

// ---- 2. Oracle equivalence -------------------------------------------------

void oracle(Report& rep) {
    OracleConfig o;  // 200 instances, T <= 3, M <= 12, lambda in (0.5, 5], load in [1, 10]
    std::ostringstream log;
    const auto t0 = Clock::now();
    const auto r = run_oracle_check(o, SolverOptions{}, log);
    const double t = seconds_since(t0);
    std::ostringstream d;
    d << r.checks << " checks, " << r.mismatches.size() << " mismatches, " << fmt(t, 3) << " s\n";
    for (const auto& m : r.mismatches) d << m.instance << ": " << m.description << '\n';
    SolverOptions bad;
    bad.tie_break = TieBreak::PreferLarger;
    std::ostringstream ignored;
    const auto neg = run_oracle_check(o, bad, ignored);
    d << "negative control (ties to larger choices): " << neg.mismatches.size() << " mismatches";
    if (!neg.mismatches.empty()) d << ", first at " << neg.mismatches.front().instance;
    d << '\n';
    rep.line(r.passed() && r.instances == 200 && t <= 60 && !neg.passed(),
             "2 oracle equivalence on 200 seeded instances", d.str());
}

// ---- 3. Pricing optimality -------------------------------------------------

// Best grid revenue sum N_t p_t over prices on a 1e-3 lattice satisfying
// IC/IR directly. The first T-1 prices are enumerated; the last is the
// largest lattice point its own constraints allow.
double grid_best(const TypeLadder& l, const QualityAssignment& w, double step) {
    const std::size_t T = l.size();
    std::vector<std::vector<double>> u(T, std::vector<double>(T));
    for (std::size_t i = 0; i < T; ++i)
        for (std::size_t j = 0; j < T; ++j) u[i][j] = uav_utility(l.lambda(i), w[j]);
    const double tol = kFeasibilityTolerance;
    std::vector<double> p(T, 0.0);
    double best = -1.0;
    std::function<void(std::size_t)> rec = [&](std::size_t t) {
        if (t + 1 == T) {
            // Upper bounds on p_last: own IR and own IC against every other option.
            double hi = u[t][t] + tol;
            for (std::size_t j = 0; j < t; ++j) hi = std::min(hi, u[t][t] - u[t][j] + p[j] + tol);
            // Lower bounds: others must not prefer the last option.
            double lo = 0.0;
            for (std::size_t j = 0; j < t; ++j) lo = std::max(lo, u[j][t] - u[j][j] + p[j] - tol);
            const double top = std::floor(hi / step + 1e-9) * step;
            if (top < lo - 1e-15 || top < 0) return;
            double value = l.count(t) * top;
            for (std::size_t j = 0; j < t; ++j) value += l.count(j) * p[j];
            best = std::max(best, value);
            return;
        }
        const int n = static_cast<int>(std::floor((u[t][t] + tol) / step));
        for (int i = 0; i <= n; ++i) {
            p[t] = i * step;
            bool ok = u[t][t] - p[t] >= -tol;
            for (std::size_t j = 0; j < t && ok; ++j) {
                ok = u[t][t] - p[t] >= u[t][j] - p[j] - tol && u[j][j] - p[j] >= u[j][t] - p[t] - tol;
            }
            if (ok) rec(t + 1);
        }
    };
    rec(0);
    return best;
}

void pricing(Report& rep) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> lam(0.3, 2.5);
    int cases = 0, grid_wins = 0, infeasible = 0, loose = 0;
    double worst_excess = -1e300, worst_gap = 0.0;
    const auto t0 = Clock::now();
    while (cases < 100) {
        const int T = 1 + static_cast<int>(rng() % 3);
        std::vector<TypeEntry> e;
        for (int t = 0; t < T; ++t) e.push_back({PoissonMean(lam(rng)), 1 + static_cast<int>(rng() % 3)});
        const TypeLadder l = TypeLadder::merged(e);
        QualityAssignment w(l.size());
        for (auto& x : w) x = static_cast<int>(rng() % 5);
        std::sort(w.begin(), w.end());
        const PriceSchedule p = optimal_prices(l, w);
        const Contract c{w, p};
        infeasible += validate_feasibility(l, c).feasible ? 0 : 1;
        const auto lr = price_conditions(l, c);
        if (!lr.feasible()) ++infeasible;
        for (const auto& s : lr.steps) loose += std::fabs(s.upper_slack) <= 1e-9 ? 0 : 1;
        double opt = 0.0;
        for (std::size_t t = 0; t < l.size(); ++t) opt += l.count(t) * p[t];
        const double g = grid_best(l, w, 1e-3);
        const double excess = g - opt;
        worst_excess = std::max(worst_excess, excess);
        worst_gap = std::max(worst_gap, -excess);
        grid_wins += excess > 2e-3 * static_cast<double>(l.size()) ? 1 : 0;
        ++cases;
    }
    std::ostringstream d;
    d << cases << " assignments (T <= 3), " << fmt(seconds_since(t0), 3) << " s\n"
      << "grid beats optimum beyond 2e-3*T: " << grid_wins << " times; largest grid excess "
      << fmt(worst_excess, 3) << ", largest shortfall " << fmt(worst_gap, 3) << '\n'
      << "infeasible optimal contracts: " << infeasible << ", loose upper bounds: " << loose << '\n';
    rep.line(grid_wins == 0 && infeasible == 0 && loose == 0, "3 pricing optimality on 100 assignments",
             d.str());
}

// ---- 4. Property suites ----------------------------------------------------

struct Suite {
    int cases = 0;
    int failures = 0;
    void check(bool ok) {
        ++cases;
        failures += ok ? 0 : 1;
    }
};

TypeLadder random_ladder(std::mt19937_64& rng, int max_types, int max_count, double lo, double hi) {
    std::uniform_real_distribution<double> lam(lo, hi);
    const int T = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_types));
    std::vector<TypeEntry> e;
    for (int t = 0; t < T; ++t) {
        e.push_back({PoissonMean(lam(rng)), 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_count))});
    }
    return TypeLadder::merged(std::move(e));
}

void properties(Report& rep) {
    std::vector<std::pair<std::string, Suite>> suites;
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    {  // Tail strictly increasing in the mean.
        Suite s;
        while (s.cases < 1000) {
            const double hi = 0.1 + 50 * unit(rng);
            const double lo = hi * (0.05 + 0.9 * unit(rng));
            const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(hi + 30));
            const double a = poisson_tail(PoissonMean(hi), k), b = poisson_tail(PoissonMean(lo), k);
            if (b >= 1.0 - 1e-12) continue;  // both round to 1
            s.check(a > b);
        }
        suites.emplace_back("tail increasing in the mean", s);
    }
    {  // Utility increasing and concave in w.
        Suite s;
        while (s.cases < 1000) {
            const double lambda = 0.1 + 30 * unit(rng);
            const PoissonMean m(lambda);
            const int w = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(saturation_count(m)));
            const double u0 = uav_utility(m, w - 1), u1 = uav_utility(m, w), u2 = uav_utility(m, w + 1);
            s.check(u1 > u0 && u2 - 2 * u1 + u0 < 0 && uav_utility(PoissonMean(lambda * 1.3), w) > u1);
        }
        suites.emplace_back("utility monotone with negative second difference", s);
    }
    {  // Increasing preference.
        Suite s;
        while (s.cases < 1000) {
            const double lb = 0.2 + 20 * unit(rng);
            const double la = lb * (0.05 + 0.85 * unit(rng));
            const int w_lo = static_cast<int>(rng() % 25);
            const int w_hi = w_lo + 1 + static_cast<int>(rng() % 10);
            if (poisson_tail(PoissonMean(lb), w_lo + 1) < 1e-10) continue;
            const double db = uav_utility(PoissonMean(lb), w_hi) - uav_utility(PoissonMean(lb), w_lo);
            const double da = uav_utility(PoissonMean(la), w_hi) - uav_utility(PoissonMean(la), w_lo);
            s.check(db > da);
        }
        suites.emplace_back("increasing preference", s);
    }
    {  // Price orderings on solver outputs.
        Suite s;
        while (s.cases < 500) {
            const auto l = random_ladder(rng, 6, 3, 0.5, 12);
            const MbsLoad mbs(static_cast<int>(rng() % 80), PoissonMean(1 + 60 * unit(rng)));
            const auto r = solve(l, mbs, rng() % 2 ? Objective::MbsRevenue : Objective::SocialWelfare);
            const auto& w = r.contract.assignment;
            const auto& p = r.contract.prices;
            bool ok = true;
            for (std::size_t t = 1; t < w.size(); ++t) {
                ok &= w[t] >= w[t - 1] && p[t] >= p[t - 1];
                ok &= (w[t] == w[t - 1]) == (p[t] == p[t - 1]) ||
                      uav_utility(l.lambda(t), w[t]) - uav_utility(l.lambda(t), w[t - 1]) <= 1e-12;
            }
            s.check(ok);
        }
        suites.emplace_back("price orderings on solver outputs", s);
    }
    {  // Element-wise larger ladders earn at least as much.
        Suite s;
        while (s.cases < 500) {
            const auto l = random_ladder(rng, 5, 2, 0.5, 8);
            const MbsLoad mbs(static_cast<int>(rng() % 60), PoissonMean(1 + 40 * unit(rng)));
            std::vector<TypeEntry> bigger = l.entries();
            double f = 1.0;
            for (auto& e : bigger) {
                f *= 1.0 + 0.5 * unit(rng);
                e.lambda = PoissonMean(e.lambda.value() * f);
            }
            const auto a = solve(l, mbs, Objective::MbsRevenue);
            const auto b = solve(TypeLadder(bigger), mbs, Objective::MbsRevenue);
            s.check(b.revenue >= a.revenue - 1e-9);
        }
        suites.emplace_back("revenue monotone in larger ladders", s);
    }
    {  // Saturation: U(l, w) = l once P(X >= w) < 1e-12.
        Suite s;
        while (s.cases < 1000) {
            const PoissonMean m(0.01 + 100 * unit(rng));
            const int w = saturation_count(m) + static_cast<int>(rng() % 30);
            s.check(std::fabs(uav_utility(m, w) - m.value()) < 1e-9);
        }
        suites.emplace_back("saturation |U - lambda| < 1e-9", s);
    }
    {  // K-cap safety: capped and uncapped solves agree.
        Suite s;
        SolverOptions uncapped;
        uncapped.k_cap = false;
        while (s.cases < 500) {
            const auto l = random_ladder(rng, 4, 2, 0.5, 6);
            const MbsLoad mbs(static_cast<int>(rng() % 60), PoissonMean(1 + 40 * unit(rng)));
            const Objective o = rng() % 2 ? Objective::MbsRevenue : Objective::SocialWelfare;
            const auto a = solve(l, mbs, o);
            const auto b = solve(l, mbs, o, uncapped);
            s.check(std::fabs(a.objective_value - b.objective_value) <= 1e-9 &&
                    a.contract.assignment == b.contract.assignment);
        }
        suites.emplace_back("K-cap safety", s);
    }
    {  // Dominance: each optimum wins on its own objective.
        Suite s;
        while (s.cases < 500) {
            const auto l = random_ladder(rng, 6, 3, 0.5, 12);
            const MbsLoad mbs(static_cast<int>(rng() % 80), PoissonMean(1 + 60 * unit(rng)));
            const auto m = solve(l, mbs, Objective::MbsRevenue);
            const auto w = solve(l, mbs, Objective::SocialWelfare);
            s.check(m.revenue >= w.revenue - 1e-9 && w.welfare >= m.welfare - 1e-9);
        }
        suites.emplace_back("cross-objective dominance", s);
    }

    bool ok = true;
    std::ostringstream d;
    for (const auto& [name, s] : suites) {
        ok &= s.cases >= 500 && s.failures == 0;
        d << name << ": " << s.cases << " cases, " << s.failures << " failures\n";
    }
    rep.line(ok, "4 property suites (fixed seed 4242)", d.str());
}

// ---- 5. Load sweep ---------------------------------------------------------

void load_sweep(Report& rep) {
    const TypeLadder ladder = ten_type_ladder();
    bool ok = true;
    int prev_gap = 1 << 30;
    std::ostringstream d;
    d << "load  mbs_sold  social_sold  gap  mbs_revenue  social_revenue\n";
    for (int load = 100; load <= 200; load += 10) {
        const MbsLoad mbs(200, PoissonMean(load));
        const auto m = solve(ladder, mbs, Objective::MbsRevenue);
        const auto s = solve(ladder, mbs, Objective::SocialWelfare);
        const int gap = s.sold - m.sold;
        ok &= gap <= prev_gap + 1;
        ok &= m.revenue >= s.revenue - 1e-9;
        prev_gap = gap;
        d << load << "  " << m.sold << "  " << s.sold << "  " << gap << "  " << fmt(m.revenue, 8) << "  "
          << fmt(s.revenue, 8) << '\n';
    }
    rep.line(ok, "5 load sweep 100..200: sold gap non-increasing (1 unit jitter), MBS revenue dominates",
             d.str());
}

// ---- 6. Height sweep -------------------------------------------------------

struct HeightCurve {
    std::vector<double> heights, area, revenue;
};

HeightCurve height_curve(const GeometryScenario& sc, const std::vector<double>& heights) {
    HeightCurve c;
    const auto rec = height_sweep(heights, sc, MbsLoad(200, PoissonMean(150)));
    for (const auto& r : rec) {
        c.heights.push_back(r.height);
        c.area.push_back(std::accumulate(r.areas.begin(), r.areas.end(), 0.0));
        c.revenue.push_back(r.mbs_optimal.revenue);
    }
    return c;
}

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

void heights(Report& rep) {
    const ScenarioConfig cfg = load_config(preset("height_sweep.yaml"));
    GeometryScenario sc = cfg.geometry->scenario();
    std::vector<double> hs;
    for (double h = 200; h <= 1000; h += 4) hs.push_back(h);
    const auto t0 = Clock::now();
    const HeightCurve c = height_curve(sc, hs);
    const double t = seconds_since(t0);
    const std::size_t ia = argmax(c.area), ir = argmax(c.revenue);
    const bool interior = ia > 0 && ia + 1 < c.area.size();
    const double h_rev = c.heights[ir];
    std::ostringstream d;
    d << "ring of 10 at 1000 m, M=200, load 150, natural-log distance term, heights 200..1000 step 4, "
      << fmt(t, 3) << " s\n"
      << "area peak at " << c.heights[ia] << " m (" << fmt(c.area[ia] / 1e6, 6) << " km^2), interior: "
      << (interior ? "yes" : "no") << '\n'
      << "revenue peak at " << h_rev << " m (revenue " << fmt(c.revenue[ir], 8) << ")\n";
    // Same scenario with a base-10 distance term, for comparison only.
    sc.radio.distance_log = DistanceLog::Decimal;
    std::vector<double> coarse;
    for (double h = 200; h <= 1000; h += 20) coarse.push_back(h);
    const HeightCurve dec = height_curve(sc, coarse);
    d << "info: with a base-10 distance term the area peaks at " << dec.heights[argmax(dec.area)]
      << " m and revenue at " << dec.heights[argmax(dec.revenue)] << " m\n";
    rep.line(interior && h_rev >= 600 && h_rev <= 750,
             "6 height sweep: interior area maximum, revenue peak in [600, 750] m", d.str());
}

// ---- 7. Determinism --------------------------------------------------------

std::string body_of(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    const std::string all = s.str();
    return all.substr(all.find('\n') + 1);
}

bool same_outputs(const fs::path& a, const fs::path& b, int& files) {
    bool ok = true;
    for (const auto& e : fs::directory_iterator(a)) {
        const fs::path other = b / e.path().filename();
        ok &= fs::exists(other) && body_of(e.path()) == body_of(other);
        ++files;
    }
    return ok;
}

void determinism(Report& rep) {
    const fs::path root = fs::temp_directory_path() / "offload_acceptance";
    fs::remove_all(root);
    std::ostringstream log;
    bool ok = true;
    int files = 0;
    {
        ScenarioConfig c = load_config(preset("ladder_load120.yaml"));
        run_solve(c, (root / "solve1").string(), log);
        run_solve(c, (root / "solve2").string(), log);
        c.threads = 4;
        run_solve(c, (root / "solve4").string(), log);
        ok &= same_outputs(root / "solve1", root / "solve2", files);
        ok &= same_outputs(root / "solve1", root / "solve4", files);
    }
    {
        ScenarioConfig c = load_config(preset("height_sweep.yaml"));
        c.geometry->grid.cell_size = 20;
        c.sweep->values = {500, 600, 674, 700};
        run_sweep(c, (root / "sweep1").string(), log);
        c.threads = 3;
        run_sweep(c, (root / "sweep3").string(), log);
        ok &= same_outputs(root / "sweep1", root / "sweep3", files);
    }
    {
        ScenarioConfig c = load_config(preset("geometry_674.yaml"));
        c.geometry->grid.cell_size = 20;
        run_solve(c, (root / "geo1").string(), log);
        c.threads = 2;
        run_solve(c, (root / "geo2").string(), log);
        ok &= same_outputs(root / "geo1", root / "geo2", files);
    }
    std::ostringstream d;
    d << files << " CSV comparisons (solve, height sweep and geometry solve; threads 1 vs 2, 3, 4)\n";
    rep.line(ok && files > 0, "7 determinism of CSV outputs apart from the metadata line", d.str());
}

}  // namespace

int main() {
    Report rep;
    const auto t0 = Clock::now();
    channel_counts(rep);
    oracle(rep);
    pricing(rep);
    properties(rep);
    load_sweep(rep);
    heights(rep);
    determinism(rep);
    std::cout << (rep.failed == 0 ? "ALL PASS" : "FAILURES: " + std::to_string(rep.failed)) << " ("
              << fmt(seconds_since(t0), 4) << " s)\n";
    return rep.failed;
}
