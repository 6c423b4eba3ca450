#include "chipcarbon/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <thread>

#include "chipcarbon/analyses.hpp"
#include "chipcarbon/dataset.hpp"
#include "chipcarbon/errors.hpp"
#include "chipcarbon/parameter_pack.hpp"
#include "chipcarbon/report_io.hpp"

#ifndef CHIPCARBON_VERSION
#define CHIPCARBON_VERSION "0.0.0"
#endif

namespace chipcarbon {

using ordered_json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw InvariantError("sha256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

namespace {

struct GlobalOptions {
    std::string dataset = "data/processors.csv";
    std::string pack = "data/reference_pack.json";
    std::uint64_t seed = 42;
    std::size_t samples = 10000;
    std::string format = "json";
    std::string out_dir = ".";
    unsigned threads = 0;
};

// "a:b:step" expands to a, a+step, ... <= b; anything else is a comma list.
std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
    std::vector<double> values;
    auto fail = [&] { return InputError("bad value for " + flag + ": '" + text + "'"); };
    if (text.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::size_t start = 0;
        while (true) {
            std::size_t colon = text.find(':', start);
            auto v = parse_number(std::string_view(text).substr(start, colon - start));
            if (!v) throw fail();
            parts.push_back(*v);
            if (colon == std::string::npos) break;
            start = colon + 1;
        }
        if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) throw fail();
        const auto steps = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
        if (steps > 1000000) throw fail();
        for (std::size_t i = 0; i <= steps; ++i) {
            double v = parts[0] + static_cast<double>(i) * parts[2];
            values.push_back(std::round(v * 1e9) / 1e9);
        }
        return values;
    }
    for (const auto& row : split_csv(text))
        for (const auto& cell : row.fields) {
            auto v = parse_number(cell);
            if (!v) throw fail();
            values.push_back(*v);
        }
    if (values.empty()) throw fail();
    return values;
}

std::vector<int> to_counts(const std::vector<double>& values, const std::string& flag) {
    std::vector<int> out;
    for (double v : values) {
        if (v != std::floor(v) || v < 1.0 || v > 1e6) throw InputError(flag + " needs positive integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

class Session {
public:
    Session(const GlobalOptions& g, std::string command) : g_(g), command_(std::move(command)) {
        format_ = parse_report_format(g.format);
        if (g.samples == 0) throw InputError("--samples must be positive");
    }

    const NodeParameterPack& pack() {
        if (!pack_) pack_ = load_parameter_pack(read_input("pack", g_.pack));
        return *pack_;
    }

    const std::vector<ProcessorRecord>& processors() {
        if (!processors_) {
            auto parsed = parse_processors(read_input("dataset", g_.dataset));
            throw_diagnostics(g_.dataset, parsed.diagnostics);
            processors_ = std::move(parsed.records);
        }
        return *processors_;
    }

    std::vector<RevenueRecord> revenue(const std::string& path) {
        auto parsed = parse_revenue(read_input("revenue", path));
        throw_diagnostics(path, parsed.diagnostics);
        return std::move(parsed.records);
    }

    MonteCarloConfig mc(bool retain = false) const {
        MonteCarloConfig c;
        c.samples = g_.samples;
        c.seed = g_.seed;
        c.workers = g_.threads ? g_.threads : std::max(1u, std::thread::hardware_concurrency());
        c.retain_samples = retain;
        return c;
    }

    ReportFormat format() const { return format_; }
    ordered_json& parameters() { return parameters_; }

    void finish(const std::vector<ReportFile>& files, std::ostream& out) {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(g_.out_dir, ec);
        if (ec) throw InputError("cannot create output directory " + g_.out_dir + ": " + ec.message());

        ordered_json manifest;
        manifest["command"] = command_;
        manifest["parameters"] = parameters_;
        manifest["seed"] = g_.seed;
        manifest["samples"] = g_.samples;
        manifest["format"] = g_.format;
        manifest["inputs"] = inputs_;
        manifest["tool_version"] = CHIPCARBON_VERSION;

        std::vector<ReportFile> all = files;
        all.push_back({"manifest.json", manifest.dump(2) + "\n"});
        for (const auto& f : all) {
            const fs::path path = fs::path(g_.out_dir) / f.name;
            std::ofstream os(path, std::ios::binary | std::ios::trunc);
            os << f.content;
            if (!os) throw InputError("cannot write " + path.string());
            out << path.string() << "\n";
        }
    }

private:
    std::string read_input(const std::string& role, const std::string& path) {
        std::string text = read_text_file(path);
        inputs_[role] = {{"path", path}, {"sha256", sha256_hex(text)}};
        return text;
    }

    static void throw_diagnostics(const std::string& path, const std::vector<RowDiagnostic>& diags) {
        if (diags.empty()) return;
        std::string msg = path + ": " + std::to_string(diags.size()) + " invalid row(s)";
        for (const auto& d : diags)
            msg += "\n  line " + std::to_string(d.row) + (d.field.empty() ? "" : " [" + d.field + "]") + ": " +
                   d.message;
        throw InputError(msg);
    }

    GlobalOptions g_;
    std::string command_;
    ReportFormat format_ = ReportFormat::json;
    std::optional<NodeParameterPack> pack_;
    std::optional<std::vector<ProcessorRecord>> processors_;
    ordered_json inputs_ = ordered_json::object();
    ordered_json parameters_ = ordered_json::object();
};

struct EstimateOptions {
    std::vector<std::string> processors;
    std::string vendor;
    std::string kind;
    std::string segment;
    bool retain_samples = false;
};

void cmd_estimate(Session& s, const EstimateOptions& o, std::ostream& out, std::ostream& err) {
    const auto& records = s.processors();
    std::vector<const ProcessorRecord*> chosen;
    for (const auto& name : o.processors) chosen.push_back(&find_processor(records, name));
    const bool filtered = !o.vendor.empty() || !o.kind.empty() || !o.segment.empty();
    if (filtered) {
        for (const auto& r : records) {
            if (!o.vendor.empty() && r.vendor != o.vendor) continue;
            if (!o.kind.empty() && to_string(r.kind) != o.kind) continue;
            if (!o.segment.empty() && to_string(r.segment) != o.segment) continue;
            if (std::find(chosen.begin(), chosen.end(), &r) == chosen.end()) chosen.push_back(&r);
        }
    }
    if (chosen.empty())
        throw InputError(filtered ? "no processor matches the filter" : "estimate needs --processor or a filter");

    ordered_json names = ordered_json::array();
    for (const auto* r : chosen) names.push_back(r->name);
    s.parameters()["processors"] = names;
    s.parameters()["retain_samples"] = o.retain_samples;

    const bool need_samples = o.retain_samples || chosen.size() > 1;
    EstimateReport report;
    for (const auto* r : chosen) {
        auto pe = estimate_processor(*r, s.pack(), s.mc(need_samples));
        if (pe.estimate.rejection_warning)
            err << "warning: " << r->name << ": " << pe.estimate.rejected_draws << " draws rejected\n";
        report.processors.push_back({r->name, pe.node.node_nm, pe.node.extrapolated, std::move(pe.estimate)});
    }
    for (std::size_t i = 0; i < report.processors.size(); ++i)
        for (std::size_t j = i + 1; j < report.processors.size(); ++j)
            report.overlaps.push_back({report.processors[i].name, report.processors[j].name,
                                       overlap(report.processors[i].estimate, report.processors[j].estimate)});
    if (!o.retain_samples)
        for (auto& p : report.processors) p.estimate.samples.reset();
    s.finish(render(report, s.format()), out);
}

void cmd_sweep(Session& s, double node_nm, const std::string& areas_text, const std::string& counts_text,
               std::ostream& out) {
    const auto areas = parse_grid(areas_text, "--areas");
    const auto counts = to_counts(parse_grid(counts_text, "--counts"), "--counts");
    s.parameters()["node_nm"] = node_nm;
    s.parameters()["areas_mm2"] = areas;
    s.parameters()["counts"] = counts;
    const NodeEntry node = resolve_node(s.pack(), node_nm);
    s.finish(render(chiplet_sweep(areas, counts, node, s.pack()), s.format()), out);
}

void cmd_amortize(Session& s, const std::string& name, const std::string& lifetimes_text,
                  const std::string& idles_text, std::optional<double> use_ci, std::ostream& out) {
    const auto lifetimes = parse_grid(lifetimes_text, "--lifetimes");
    const auto idles = parse_grid(idles_text, "--idles");
    const ProcessorRecord& record = find_processor(s.processors(), name);
    const NodeParameterPack& pack = s.pack();
    const double ci = use_ci.value_or(pack.global.usage.use_carbon_intensity_kg_per_kwh);
    s.parameters()["processor"] = record.name;
    s.parameters()["lifetimes_years"] = lifetimes;
    s.parameters()["idle_fractions"] = idles;
    s.parameters()["use_carbon_intensity_kg_per_kwh"] = ci;

    UsageProfile usage = pack.global.usage;
    usage.use_carbon_intensity_kg_per_kwh = ci;
    const CarbonBreakdown b = point_estimate(record, pack, usage);
    const bool extrapolated = resolve_node(pack, record.node_nm).extrapolated;
    auto grid = amortization_grid(record.name, b.embodied_kg, record.tdp_w, lifetimes, idles, ci, extrapolated);
    s.finish(render(grid, s.format()), out);
}

void cmd_shipments(Session& s, const std::string& revenue_path, std::ostream& out) {
    s.parameters()["revenue"] = revenue_path;
    const auto revenue = s.revenue(revenue_path);
    s.finish(render(aggregate_shipments(revenue, s.processors(), s.pack(), s.mc()), s.format()), out);
}

void cmd_cost(Session& s, std::ostream& out) {
    s.finish(render(cost_ecfp_series(s.processors(), s.pack(), s.mc()), s.format()), out);
}

void cmd_trend(Session& s, std::ostream& out) {
    s.finish(render(flagship_trend(s.processors(), s.pack(), s.mc()), s.format()), out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Probabilistic lifecycle carbon estimates for processors", "chipcarbon"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(CHIPCARBON_VERSION));

    GlobalOptions g;
    app.add_option("--dataset", g.dataset, "Processor CSV")->capture_default_str();
    app.add_option("--pack", g.pack, "Node parameter pack JSON")->capture_default_str();
    app.add_option("--seed", g.seed, "Monte Carlo seed")->capture_default_str();
    app.add_option("--samples", g.samples, "Monte Carlo samples per estimate")->capture_default_str();
    app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();

    EstimateOptions est;
    auto* estimate = app.add_subcommand("estimate", "CFP distribution for one or more processors");
    estimate->add_option("--processor", est.processors, "Processor name (repeatable)");
    estimate->add_option("--vendor", est.vendor, "Select every processor from this vendor");
    estimate->add_option("--kind", est.kind, "Select by kind")->check(CLI::IsMember({"cpu", "gpu"}));
    estimate->add_option("--segment", est.segment, "Select by segment")
        ->check(CLI::IsMember({"desktop", "datacenter"}));
    estimate->add_flag("--retain-samples", est.retain_samples, "Write every sample");

    double sweep_node = 7.0;
    std::string areas = "50:850:50";
    std::string counts = "1,2,4,8";
    auto* sweep = app.add_subcommand("sweep-chiplets", "Manufacturing plus packaging CFP per chiplet count");
    sweep->add_option("--node", sweep_node, "Process node in nm")->capture_default_str();
    sweep->add_option("--areas", areas, "Total areas in mm2 (list or lo:hi:step)")->capture_default_str();
    sweep->add_option("--counts", counts, "Chiplet counts (list or lo:hi:step)")->capture_default_str();

    std::string amortize_name = "A100-SXM";
    std::string lifetimes = "0.5:5:0.5";
    std::string idles = "0:0.9:0.1";
    std::optional<double> use_ci;
    auto* amortize = app.add_subcommand("amortize", "ECFP/OCFP over lifetime and idle fraction");
    amortize->add_option("--processor", amortize_name, "Processor name")->capture_default_str();
    amortize->add_option("--lifetimes", lifetimes, "Lifetimes in years")->capture_default_str();
    amortize->add_option("--idles", idles, "Idle fractions")->capture_default_str();
    amortize->add_option("--use-ci", use_ci, "Use-phase carbon intensity kg/kWh (default: from the pack)");

    std::string revenue = "data/revenue.csv";
    auto* shipments = app.add_subcommand("shipments", "Fleet CFP from revenue and flagship prices");
    shipments->add_option("--revenue", revenue, "Revenue CSV")->capture_default_str();

    auto* cost = app.add_subcommand("cost-corr", "Manufacturing cost against embodied CFP");
    auto* trend = app.add_subcommand("trend", "Flagship efficiency trends");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << CHIPCARBON_VERSION << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        Session s(g, sub->get_name());
        if (sub == estimate) cmd_estimate(s, est, out, err);
        else if (sub == sweep) cmd_sweep(s, sweep_node, areas, counts, out);
        else if (sub == amortize) cmd_amortize(s, amortize_name, lifetimes, idles, use_ci, out);
        else if (sub == shipments) cmd_shipments(s, revenue, out);
        else if (sub == cost) cmd_cost(s, out);
        else if (sub == trend) cmd_trend(s, out);
        return kExitOk;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const InvariantError& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    }
}

}  // namespace chipcarbon
