#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "offload/contract.hpp"
#include "offload/error.hpp"
#include "offload/geometry.hpp"
#include "offload/solver.hpp"
#include "offload/stochastic.hpp"

namespace py = pybind11;
using namespace offload;

namespace {

TypeLadder make_ladder(const std::vector<double>& lambdas, std::vector<int> counts) {
    if (counts.empty()) counts.assign(lambdas.size(), 1);
    if (counts.size() != lambdas.size()) {
        throw DomainError("lambdas and counts differ in length");
    }
    std::vector<TypeEntry> entries;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        entries.push_back({PoissonMean(lambdas[i]), counts[i]});
    }
    return TypeLadder(std::move(entries));
}

Objective objective_from(const std::string& s) {
    if (s == "mbs-revenue") return Objective::MbsRevenue;
    if (s == "social-welfare") return Objective::SocialWelfare;
    throw DomainError("objective must be 'mbs-revenue' or 'social-welfare'");
}

}  // namespace

PYBIND11_MODULE(_offload, m) {
    m.doc() = "Optimal spectrum-trading contracts for UAV-assisted offloading";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<SearchSpaceError>(m, "SearchSpaceError", PyExc_RuntimeError);

    m.def("poisson_tail", [](double mean, int k) { return poisson_tail(PoissonMean(mean), k); },
          py::arg("mean"), py::arg("k"));
    m.def("uav_utility", [](double type, int w) { return uav_utility(PoissonMean(type), w); },
          py::arg("type"), py::arg("w"));
    m.def("mbs_cost", [](int sold, int total, double load) {
        return mbs_cost(sold, total, PoissonMean(load));
    }, py::arg("sold"), py::arg("total"), py::arg("load"));

    py::class_<TypeLadder>(m, "TypeLadder")
        .def(py::init(&make_ladder), py::arg("lambdas"), py::arg("counts") = std::vector<int>{})
        .def("__len__", &TypeLadder::size)
        .def_property_readonly("lambdas", [](const TypeLadder& l) {
            std::vector<double> v;
            for (const auto& e : l.entries()) v.push_back(e.lambda.value());
            return v;
        })
        .def_property_readonly("counts", [](const TypeLadder& l) {
            std::vector<int> v;
            for (const auto& e : l.entries()) v.push_back(e.count);
            return v;
        });

    py::class_<Contract>(m, "Contract")
        .def(py::init([](QualityAssignment w, PriceSchedule p) { return Contract{std::move(w), std::move(p)}; }),
             py::arg("assignment"), py::arg("prices"))
        .def_readwrite("assignment", &Contract::assignment)
        .def_readwrite("prices", &Contract::prices);

    m.def("optimal_prices", &optimal_prices, py::arg("ladder"), py::arg("assignment"));
    m.def("is_feasible", [](const TypeLadder& l, const Contract& c) {
        return validate_feasibility(l, c).feasible;
    }, py::arg("ladder"), py::arg("contract"));
    m.def("violations", [](const TypeLadder& l, const Contract& c) {
        return validate_feasibility(l, c).describe();
    }, py::arg("ladder"), py::arg("contract"));
    m.def("revenue", [](const TypeLadder& l, const Contract& c, int channels, double load) {
        return revenue(l, c, MbsLoad(channels, PoissonMean(load)));
    }, py::arg("ladder"), py::arg("contract"), py::arg("channels"), py::arg("load"));
    m.def("social_welfare", [](const TypeLadder& l, const QualityAssignment& w, int channels, double load) {
        return social_welfare(l, w, MbsLoad(channels, PoissonMean(load)));
    }, py::arg("ladder"), py::arg("assignment"), py::arg("channels"), py::arg("load"));
    m.def("gain", &gain, py::arg("ladder"), py::arg("t"), py::arg("w"));

    py::class_<TraceRow>(m, "TraceRow")
        .def_readonly("capacity", &TraceRow::capacity)
        .def_readonly("inner_value", &TraceRow::inner_value)
        .def_readonly("objective", &TraceRow::objective)
        .def_readonly("revenue", &TraceRow::revenue)
        .def_readonly("welfare", &TraceRow::welfare)
        .def_readonly("sold", &TraceRow::sold);

    py::class_<SolverResult>(m, "SolverResult")
        .def_property_readonly("assignment", [](const SolverResult& r) { return r.contract.assignment; })
        .def_property_readonly("prices", [](const SolverResult& r) { return r.contract.prices; })
        .def_readonly("revenue", &SolverResult::revenue)
        .def_readonly("welfare", &SolverResult::welfare)
        .def_readonly("objective_value", &SolverResult::objective_value)
        .def_readonly("sold", &SolverResult::sold)
        .def_readonly("trace", &SolverResult::trace);

    m.def("solve", [](const TypeLadder& l, int channels, double load, const std::string& objective,
                      bool k_cap, unsigned threads) {
        SolverOptions o;
        o.k_cap = k_cap;
        o.threads = threads;
        py::gil_scoped_release release;
        return solve(l, MbsLoad(channels, PoissonMean(load)), objective_from(objective), o);
    }, py::arg("ladder"), py::arg("channels"), py::arg("load"),
       py::arg("objective") = "mbs-revenue", py::arg("k_cap") = true, py::arg("threads") = 1u);
    m.def("brute_force_solve", [](const TypeLadder& l, int channels, double load,
                                  const std::string& objective, double cap) {
        return brute_force_solve(l, MbsLoad(channels, PoissonMean(load)), objective_from(objective), cap);
    }, py::arg("ladder"), py::arg("channels"), py::arg("load"),
       py::arg("objective") = "mbs-revenue", py::arg("search_cap") = kDefaultSearchCap);

    py::class_<TerrainParams>(m, "TerrainParams")
        .def(py::init<double, double, double, double>(), py::arg("a"), py::arg("b"),
             py::arg("eta_los"), py::arg("eta_nlos"))
        .def_readwrite("a", &TerrainParams::a)
        .def_readwrite("b", &TerrainParams::b)
        .def_readwrite("eta_los", &TerrainParams::eta_los)
        .def_readwrite("eta_nlos", &TerrainParams::eta_nlos);
    m.attr("URBAN") = kUrbanTerrain;
    m.attr("SUBURBAN") = kSuburbanTerrain;
    m.attr("DENSE_URBAN") = kDenseUrbanTerrain;

    py::enum_<DistanceLog>(m, "DistanceLog")
        .value("DECIMAL", DistanceLog::Decimal)
        .value("NATURAL", DistanceLog::Natural);

    py::class_<RadioParams>(m, "RadioParams")
        .def(py::init<>())
        .def_readwrite("frequency_hz", &RadioParams::frequency_hz)
        .def_readwrite("p_mbs_dbm", &RadioParams::p_mbs_dbm)
        .def_readwrite("p_uav_dbm", &RadioParams::p_uav_dbm)
        .def_readwrite("noise_dbm", &RadioParams::noise_dbm)
        .def_readwrite("distance_log", &RadioParams::distance_log);

    m.def("p_los", &p_los, py::arg("theta_deg"), py::arg("terrain") = kUrbanTerrain);
    m.def("pathloss_uav", &pathloss_uav, py::arg("theta_deg"), py::arg("distance_m"),
          py::arg("terrain") = kUrbanTerrain, py::arg("radio") = RadioParams{});
    m.def("pathloss_mbs", &pathloss_mbs, py::arg("distance_m"),
          py::arg("terrain") = kUrbanTerrain, py::arg("radio") = RadioParams{});
    m.def("ring_positions", [](int count, double radius) {
        std::vector<std::pair<double, double>> out;
        for (const auto& p : ring_positions(count, radius)) out.emplace_back(p.x, p.y);
        return out;
    }, py::arg("count"), py::arg("radius_m"));
    m.def("region_areas", [](const std::vector<std::pair<double, double>>& uavs, double height,
                             const TerrainParams& terrain, const RadioParams& radio,
                             double extent, double cell_size) {
        Placement placement{{}, height};
        for (const auto& [x, y] : uavs) placement.uavs.push_back({x, y});
        py::gil_scoped_release release;
        return partition_regions(placement, terrain, radio, GridSpec{extent, cell_size}).areas;
    }, py::arg("uavs"), py::arg("height"), py::arg("terrain") = kUrbanTerrain,
       py::arg("radio") = RadioParams{}, py::arg("extent") = 3000.0, py::arg("cell_size") = 5.0);
}
