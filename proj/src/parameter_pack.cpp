#include "chipcarbon/parameter_pack.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>

#include <json.hpp>

#include "chipcarbon/dataset.hpp"
#include "chipcarbon/errors.hpp"

namespace chipcarbon {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw InputError("parameter pack: " + where + ": " + what);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.contains(key)) fail(where, "unknown key '" + key + "'");
}

const json& member(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, "missing '" + key + "'");
    return *it;
}

double number(const json& obj, const std::string& key, const std::string& where) {
    const json& v = member(obj, key, where);
    if (!v.is_number()) fail(where + "." + key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(where + "." + key, "must be finite");
    return d;
}

double nonneg(const json& obj, const std::string& key, const std::string& where) {
    const double d = number(obj, key, where);
    if (d < 0.0) fail(where + "." + key, "must be >= 0");
    return d;
}

Distribution parse_distribution(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "distribution must be an object");
    const json& type_j = member(j, "type", where);
    if (!type_j.is_string()) fail(where, "'type' must be a string");
    const auto type = type_j.get<std::string>();

    bool truncate = true;
    if (auto it = j.find("truncate"); it != j.end()) {
        if (!it->is_boolean()) fail(where, "'truncate' must be a boolean");
        truncate = it->get<bool>();
    }

    Distribution d;
    if (type == "point") {
        check_keys(j, {"type", "truncate", "value"}, where);
        d = Distribution::point(number(j, "value", where), truncate);
    } else if (type == "uniform") {
        check_keys(j, {"type", "truncate", "lo", "hi"}, where);
        d = Distribution::uniform(number(j, "lo", where), number(j, "hi", where), truncate);
    } else if (type == "gaussian") {
        check_keys(j, {"type", "truncate", "mean", "stddev"}, where);
        d = Distribution::gaussian(number(j, "mean", where), number(j, "stddev", where), truncate);
    } else if (type == "kde") {
        check_keys(j, {"type", "truncate", "observations", "bandwidth"}, where);
        const json& obs_j = member(j, "observations", where);
        if (!obs_j.is_array() || obs_j.empty()) fail(where, "'observations' must be a nonempty array");
        std::vector<double> obs;
        for (const auto& x : obs_j) {
            if (!x.is_number()) fail(where, "'observations' must contain numbers");
            obs.push_back(x.get<double>());
        }
        if (j.contains("bandwidth")) {
            d = Distribution::kde(std::move(obs), number(j, "bandwidth", where), truncate);
        } else {
            if (obs.size() < 2) fail(where, "a kde without 'bandwidth' needs at least two observations");
            try {
                d = fit_kde(std::move(obs), truncate);
            } catch (const DomainError& e) {
                fail(where, e.what());
            }
        }
    } else {
        fail(where, "unknown distribution type '" + type + "'");
    }
    try {
        validate(d);
    } catch (const DomainError& e) {
        fail(where, e.what());
    }
    return d;
}

ordered_json dump_distribution(const Distribution& d) {
    ordered_json j;
    j["type"] = std::string(d.type_name());
    std::visit(
        [&](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                j["value"] = law.value;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                j["lo"] = law.lo;
                j["hi"] = law.hi;
            } else if constexpr (std::is_same_v<T, Gaussian>) {
                j["mean"] = law.mean;
                j["stddev"] = law.stddev;
            } else {
                j["observations"] = law.observations;
                j["bandwidth"] = law.bandwidth;
            }
        },
        d.law);
    j["truncate"] = d.truncate_at_zero;
    return j;
}

NodeEntry parse_node(const std::string& key, const json& j) {
    const std::string where = "node '" + key + "'";
    check_keys(j,
               {"defect_density_per_cm2", "epa_kwh_per_cm2", "gpa_kg_per_cm2", "materials_kg_per_cm2",
                "manufacturing_cost_usd_per_cm2", "packaging_carbon_kg_per_cm2", "packaging_overhead",
                "packaging_yield", "clustering_alpha"},
               where);
    NodeEntry e;
    const auto nm = parse_number(key);
    if (!nm || *nm <= 0.0) fail(where, "node key must be a positive number");
    e.node_nm = *nm;
    e.defect_density_per_cm2 =
        parse_distribution(member(j, "defect_density_per_cm2", where), where + ".defect_density_per_cm2");
    e.epa_kwh_per_cm2 = parse_distribution(member(j, "epa_kwh_per_cm2", where), where + ".epa_kwh_per_cm2");
    e.gpa_kg_per_cm2 = parse_distribution(member(j, "gpa_kg_per_cm2", where), where + ".gpa_kg_per_cm2");
    e.materials_kg_per_cm2 = nonneg(j, "materials_kg_per_cm2", where);
    e.manufacturing_cost_usd_per_cm2 = nonneg(j, "manufacturing_cost_usd_per_cm2", where);
    e.packaging_carbon_kg_per_cm2 = nonneg(j, "packaging_carbon_kg_per_cm2", where);

    const json& oh = member(j, "packaging_overhead", where);
    if (!oh.is_object() || oh.empty()) fail(where + ".packaging_overhead", "expected a nonempty object");
    std::map<int, double> points;
    for (const auto& [count_key, factor] : oh.items()) {
        const auto count = parse_number(count_key);
        if (!count || *count < 1 || *count != std::floor(*count))
            fail(where + ".packaging_overhead", "die count key '" + count_key + "' must be an integer >= 1");
        if (!factor.is_number() || factor.get<double>() < 0.0)
            fail(where + ".packaging_overhead", "factor for '" + count_key + "' must be a number >= 0");
        points[static_cast<int>(*count)] = factor.get<double>();
    }
    try {
        e.packaging_overhead = OverheadCurve(std::move(points));
    } catch (const DomainError& err) {
        fail(where + ".packaging_overhead", err.what());
    }

    if (j.contains("packaging_yield")) {
        e.packaging_yield = number(j, "packaging_yield", where);
        if (!(e.packaging_yield > 0.0 && e.packaging_yield <= 1.0))
            fail(where + ".packaging_yield", "must lie in (0, 1]");
    }
    if (j.contains("clustering_alpha")) {
        e.clustering_alpha = number(j, "clustering_alpha", where);
        if (e.clustering_alpha <= 0.0) fail(where + ".clustering_alpha", "must be > 0");
    }
    return e;
}

}  // namespace

NodeParameterPack load_parameter_pack(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("parameter pack: invalid JSON: ") + e.what());
    }
    check_keys(root, {"description", "nodes", "global"}, "top level");

    NodeParameterPack pack;
    if (auto it = root.find("description"); it != root.end()) {
        if (!it->is_string()) fail("description", "expected a string");
        pack.description = it->get<std::string>();
    }

    const json& nodes = member(root, "nodes", "top level");
    if (!nodes.is_object() || nodes.empty()) fail("nodes", "at least one node is required");
    for (const auto& [key, entry] : nodes.items()) {
        NodeEntry e = parse_node(key, entry);
        const double nm = e.node_nm;
        if (!pack.nodes.emplace(nm, std::move(e)).second) fail("node '" + key + "'", "duplicate node");
    }

    const json& g = member(root, "global", "top level");
    check_keys(g, {"fab_carbon_intensity_kg_per_kwh", "design", "usage"}, "global");
    pack.global.fab_carbon_intensity_kg_per_kwh = parse_distribution(
        member(g, "fab_carbon_intensity_kg_per_kwh", "global"), "global.fab_carbon_intensity_kg_per_kwh");

    const json& design = member(g, "design", "global");
    check_keys(design, {"energy_kwh_per_mm2", "carbon_intensity_kg_per_kwh", "amortization_volume_units"},
               "global.design");
    pack.global.design.design_energy_kwh_per_mm2 = nonneg(design, "energy_kwh_per_mm2", "global.design");
    pack.global.design.design_carbon_intensity_kg_per_kwh =
        nonneg(design, "carbon_intensity_kg_per_kwh", "global.design");
    const json& volume = member(design, "amortization_volume_units", "global.design");
    if (!volume.is_number_integer() || volume.get<long long>() < 1)
        fail("global.design.amortization_volume_units", "must be an integer >= 1");
    pack.global.design.amortization_volume_units = volume.get<long long>();

    const json& usage = member(g, "usage", "global");
    check_keys(usage, {"lifetime_years", "idle_fraction", "use_carbon_intensity_kg_per_kwh"}, "global.usage");
    pack.global.usage.lifetime_years = nonneg(usage, "lifetime_years", "global.usage");
    pack.global.usage.idle_fraction = nonneg(usage, "idle_fraction", "global.usage");
    if (pack.global.usage.idle_fraction > 1.0) fail("global.usage.idle_fraction", "must lie in [0, 1]");
    pack.global.usage.use_carbon_intensity_kg_per_kwh =
        nonneg(usage, "use_carbon_intensity_kg_per_kwh", "global.usage");
    return pack;
}

std::string save_parameter_pack(const NodeParameterPack& pack) {
    ordered_json root;
    if (!pack.description.empty()) root["description"] = pack.description;
    ordered_json nodes = ordered_json::object();
    for (const auto& [nm, e] : pack.nodes) {
        ordered_json n;
        n["defect_density_per_cm2"] = dump_distribution(e.defect_density_per_cm2);
        n["epa_kwh_per_cm2"] = dump_distribution(e.epa_kwh_per_cm2);
        n["gpa_kg_per_cm2"] = dump_distribution(e.gpa_kg_per_cm2);
        n["materials_kg_per_cm2"] = e.materials_kg_per_cm2;
        n["manufacturing_cost_usd_per_cm2"] = e.manufacturing_cost_usd_per_cm2;
        n["packaging_carbon_kg_per_cm2"] = e.packaging_carbon_kg_per_cm2;
        ordered_json oh = ordered_json::object();
        for (const auto& [count, factor] : e.packaging_overhead.points()) oh[std::to_string(count)] = factor;
        n["packaging_overhead"] = oh;
        n["packaging_yield"] = e.packaging_yield;
        n["clustering_alpha"] = e.clustering_alpha;
        nodes[format_number(nm)] = n;
    }
    root["nodes"] = nodes;

    ordered_json g;
    g["fab_carbon_intensity_kg_per_kwh"] = dump_distribution(pack.global.fab_carbon_intensity_kg_per_kwh);
    g["design"] = {{"energy_kwh_per_mm2", pack.global.design.design_energy_kwh_per_mm2},
                   {"carbon_intensity_kg_per_kwh", pack.global.design.design_carbon_intensity_kg_per_kwh},
                   {"amortization_volume_units", pack.global.design.amortization_volume_units}};
    g["usage"] = {{"lifetime_years", pack.global.usage.lifetime_years},
                  {"idle_fraction", pack.global.usage.idle_fraction},
                  {"use_carbon_intensity_kg_per_kwh", pack.global.usage.use_carbon_intensity_kg_per_kwh}};
    root["global"] = g;
    return root.dump(2) + "\n";
}

namespace {

// Straight line through (log x_a, log v_a) and (log x_b, log v_b). When a
// value is not positive the line runs through the raw values instead.
double log_log(double xa, double va, double xb, double vb, double xt) {
    if (va == vb) return va;
    const double t = (std::log(xt) - std::log(xa)) / (std::log(xb) - std::log(xa));
    if (va > 0.0 && vb > 0.0) return std::exp(std::log(va) + t * (std::log(vb) - std::log(va)));
    return std::max(0.0, va + t * (vb - va));
}

Distribution rescale(const Distribution& near, const Distribution& far, double x_near, double x_far,
                     double xt) {
    const double loc_n = near.mean();
    const double scale_n = near.stddev();
    const double loc_t = log_log(x_near, loc_n, x_far, far.mean(), xt);
    const double scale_t = log_log(x_near, scale_n, x_far, far.stddev(), xt);
    const double r = scale_n > 0.0 ? scale_t / scale_n : 0.0;
    const double floor_scale = 1e-12 * std::max(std::abs(loc_t), 1.0);

    Distribution out;
    out.truncate_at_zero = near.truncate_at_zero;
    std::visit(
        [&](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                out.law = PointMass{loc_t};
            } else if constexpr (std::is_same_v<T, Gaussian>) {
                out.law = Gaussian{loc_t, std::max(scale_t, floor_scale)};
            } else if constexpr (std::is_same_v<T, Uniform>) {
                if (r > 0.0) out.law = Uniform{loc_t + (law.lo - loc_n) * r, loc_t + (law.hi - loc_n) * r};
                else out.law = PointMass{loc_t};
            } else {
                Kde k;
                k.observations.reserve(law.observations.size());
                for (double x : law.observations) k.observations.push_back(loc_t + (x - loc_n) * r);
                k.bandwidth = std::max(law.bandwidth * r, floor_scale);
                out.law = std::move(k);
            }
        },
        near.law);
    return out;
}

}  // namespace

NodeEntry extrapolate_node(const NodeParameterPack& pack, double target_nm) {
    if (!std::isfinite(target_nm) || target_nm <= 0.0)
        throw InputError("target node must be a positive number");
    if (auto it = pack.nodes.find(target_nm); it != pack.nodes.end()) return it->second;
    if (pack.nodes.size() < 2)
        throw InputError("node " + format_number(target_nm) +
                         " nm is not in the pack and extrapolation needs at least two listed nodes");

    // Pick the bracketing pair inside the listed range, else the two
    // outermost nodes on the target's side.
    auto upper = pack.nodes.upper_bound(target_nm);
    if (upper == pack.nodes.begin()) upper = std::next(upper);
    else if (upper == pack.nodes.end()) upper = std::prev(upper);
    auto lower = std::prev(upper);

    const NodeEntry* a = &lower->second;
    const NodeEntry* b = &upper->second;
    const double lt = std::log(target_nm);
    if (std::abs(std::log(b->node_nm) - lt) < std::abs(std::log(a->node_nm) - lt)) std::swap(a, b);
    const double xa = a->node_nm;
    const double xb = b->node_nm;

    NodeEntry e = *a;
    e.node_nm = target_nm;
    e.extrapolated = true;
    e.defect_density_per_cm2 = rescale(a->defect_density_per_cm2, b->defect_density_per_cm2, xa, xb, target_nm);
    e.epa_kwh_per_cm2 = rescale(a->epa_kwh_per_cm2, b->epa_kwh_per_cm2, xa, xb, target_nm);
    e.gpa_kg_per_cm2 = rescale(a->gpa_kg_per_cm2, b->gpa_kg_per_cm2, xa, xb, target_nm);
    e.materials_kg_per_cm2 = log_log(xa, a->materials_kg_per_cm2, xb, b->materials_kg_per_cm2, target_nm);
    e.manufacturing_cost_usd_per_cm2 =
        log_log(xa, a->manufacturing_cost_usd_per_cm2, xb, b->manufacturing_cost_usd_per_cm2, target_nm);
    e.packaging_carbon_kg_per_cm2 =
        log_log(xa, a->packaging_carbon_kg_per_cm2, xb, b->packaging_carbon_kg_per_cm2, target_nm);
    e.packaging_yield =
        std::clamp(log_log(xa, a->packaging_yield, xb, b->packaging_yield, target_nm), 1e-9, 1.0);
    e.clustering_alpha = log_log(xa, a->clustering_alpha, xb, b->clustering_alpha, target_nm);
    return e;
}

NodeEntry resolve_node(const NodeParameterPack& pack, double node_nm) {
    return extrapolate_node(pack, node_nm);
}

StochasticInputs stochastic_inputs(const NodeEntry& node, const NodeParameterPack& pack) {
    StochasticInputs in;
    in.defect_density_per_cm2 = node.defect_density_per_cm2;
    in.epa_kwh_per_cm2 = node.epa_kwh_per_cm2;
    in.gpa_kg_per_cm2 = node.gpa_kg_per_cm2;
    in.fab_carbon_intensity_kg_per_kwh = pack.global.fab_carbon_intensity_kg_per_kwh;
    in.materials_kg_per_cm2 = node.materials_kg_per_cm2;
    in.clustering_alpha = node.clustering_alpha;
    return in;
}

NodeSample mean_sample(const NodeEntry& node, const NodeParameterPack& pack) {
    return stochastic_inputs(node, pack).means();
}

}  // namespace chipcarbon
