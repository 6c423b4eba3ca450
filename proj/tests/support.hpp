#pragma once

#include <string>

#include "chipcarbon/dataset.hpp"
#include "chipcarbon/parameter_pack.hpp"

namespace chipcarbon::test {

inline std::string data_path(const std::string& name) { return std::string(CHIPCARBON_TEST_DATA_DIR) + "/" + name; }
inline std::string golden_path(const std::string& name) {
    return std::string(CHIPCARBON_TEST_GOLDEN_DIR) + "/" + name;
}

inline ProcessorRecord record(std::string name, double node_nm, double area_mm2, double tdp_w, int year = 2020) {
    ProcessorRecord r;
    r.name = std::move(name);
    r.vendor = "Acme";
    r.kind = ProcessorKind::gpu;
    r.segment = MarketSegment::datacenter;
    r.release_year = year;
    r.node_nm = node_nm;
    r.die_area_mm2 = area_mm2;
    r.tdp_w = tdp_w;
    return r;
}

// One node, every distribution a point mass unless overridden.
inline NodeEntry point_node(double node_nm, double d0 = 0.1, double epa = 2.0, double gpa = 0.3) {
    NodeEntry n;
    n.node_nm = node_nm;
    n.defect_density_per_cm2 = Distribution::point(d0);
    n.epa_kwh_per_cm2 = Distribution::point(epa);
    n.gpa_kg_per_cm2 = Distribution::point(gpa);
    n.materials_kg_per_cm2 = 0.5;
    n.manufacturing_cost_usd_per_cm2 = 10.0;
    n.packaging_carbon_kg_per_cm2 = 0.2;
    n.packaging_overhead = OverheadCurve({{1, 1.0}, {2, 2.1}, {4, 4.3}});
    return n;
}

inline NodeParameterPack point_pack() {
    NodeParameterPack p;
    p.nodes[7.0] = point_node(7.0);
    p.nodes[10.0] = point_node(10.0, 0.08, 1.5, 0.25);
    p.global.fab_carbon_intensity_kg_per_kwh = Distribution::point(0.5);
    p.global.design = {0.1, 0.5, 1000};
    p.global.usage = {3.0, 0.6, 0.5};
    return p;
}

}  // namespace chipcarbon::test
