#pragma once

// Per-process-node parameter packs, loaded from strict JSON.
//
//   {
//     "description": "...",                       (optional)
//     "nodes": {
//       "7": {
//         "defect_density_per_cm2": <dist>,
//         "epa_kwh_per_cm2": <dist>,
//         "gpa_kg_per_cm2": <dist>,
//         "materials_kg_per_cm2": 0.5,
//         "manufacturing_cost_usd_per_cm2": 13.2,
//         "packaging_carbon_kg_per_cm2": 0.25,
//         "packaging_overhead": {"1": 1.0, "2": 2.05},
//         "packaging_yield": 1.0,                  (optional, default 1)
//         "clustering_alpha": 2.0                  (optional, default 2)
//       }
//     },
//     "global": {
//       "fab_carbon_intensity_kg_per_kwh": <dist>,
//       "design": {"energy_kwh_per_mm2": .., "carbon_intensity_kg_per_kwh": ..,
//                  "amortization_volume_units": ..},
//       "usage": {"lifetime_years": 3, "idle_fraction": 0.6,
//                 "use_carbon_intensity_kg_per_kwh": ..}
//     }
//   }
//
// <dist> is {"type": "point", "value": x}
//         | {"type": "uniform", "lo": a, "hi": b}
//         | {"type": "gaussian", "mean": m, "stddev": s}
//         | {"type": "kde", "observations": [...], "bandwidth": b}
// with an optional "truncate" flag (default true). A kde without a
// bandwidth is fitted with Silverman's rule on load. Unknown keys anywhere
// are rejected.

#include <map>
#include <string>
#include <string_view>

#include "chipcarbon/carbon_core.hpp"
#include "chipcarbon/distribution.hpp"
#include "chipcarbon/monte_carlo.hpp"

namespace chipcarbon {

struct NodeEntry {
    double node_nm = 0.0;
    Distribution defect_density_per_cm2;
    Distribution epa_kwh_per_cm2;
    Distribution gpa_kg_per_cm2;
    double materials_kg_per_cm2 = 0.0;
    double manufacturing_cost_usd_per_cm2 = 0.0;
    double packaging_carbon_kg_per_cm2 = 0.0;
    OverheadCurve packaging_overhead;
    double packaging_yield = 1.0;
    double clustering_alpha = kDefaultClusteringAlpha;
    bool extrapolated = false;  // runtime only, never serialized

    friend bool operator==(const NodeEntry&, const NodeEntry&) = default;
};

struct GlobalParameters {
    Distribution fab_carbon_intensity_kg_per_kwh;
    DesignParams design;
    UsageProfile usage;
};

struct NodeParameterPack {
    std::string description;
    std::map<double, NodeEntry> nodes;
    GlobalParameters global;
};

NodeParameterPack load_parameter_pack(std::string_view json_text);
std::string save_parameter_pack(const NodeParameterPack& pack);

/// Parameters at `target_nm`, estimated from the two nearest listed nodes
/// (the bracketing pair when the target lies inside the listed range).
/// Scalars and each distribution's mean and stddev follow a straight line
/// in log(node)-log(value) space; the nearer node's distribution shape is
/// kept and shifted/scaled onto the new location and spread. A listed
/// target returns its entry unchanged.
NodeEntry extrapolate_node(const NodeParameterPack& pack, double target_nm);

/// The listed entry for `node_nm`, or an extrapolated one.
NodeEntry resolve_node(const NodeParameterPack& pack, double node_nm);

/// Sampling inputs for one node under the pack's global parameters.
StochasticInputs stochastic_inputs(const NodeEntry& node, const NodeParameterPack& pack);

/// Every distribution collapsed to its mean.
NodeSample mean_sample(const NodeEntry& node, const NodeParameterPack& pack);

}  // namespace chipcarbon
