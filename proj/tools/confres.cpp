// confres: detect and resolve IoT service conflicts in multi-resident
// smart-home event logs, and run the seeded strategy-comparison harness.
//
// Subcommands chain through files:
//   ingest -> events.csv -> detect -> conflicts.json -> rank / resolve
//   simulate -> report.csv ; report aggregates several report.csv files.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "confres/config.hpp"
#include "confres/csv.hpp"
#include "confres/detection.hpp"
#include "confres/evaluation.hpp"
#include "confres/fileio.hpp"
#include "confres/ingest.hpp"
#include "confres/json_io.hpp"
#include "confres/prioritization.hpp"
#include "confres/profiles.hpp"
#include "confres/registry.hpp"
#include "confres/resolution.hpp"

namespace {

using namespace confres;

struct HomeArg {
    std::string label;
    std::string path;
};

std::vector<HomeArg> parse_home_args(const std::vector<std::string>& raw) {
    std::vector<HomeArg> out;
    for (const auto& arg : raw) {
        auto eq = arg.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size())
            throw Error("cli", "BadArgument", "--home expects LABEL=PATH, got '" + arg + "'");
        out.push_back({arg.substr(0, eq), arg.substr(eq + 1)});
    }
    return out;
}

Rounding parse_rounding(const std::string& name) {
    if (name == "directional") return Rounding::DirectionalTowardTopRank;
    if (name == "nearest") return Rounding::Nearest;
    if (name == "none") return Rounding::None;
    throw Error("cli", "BadArgument", "unknown rounding mode '" + name + "'");
}

int cmd_ingest(const std::vector<std::string>& home_args,
               const std::vector<std::string>& resident_args, const std::string& registry_path,
               const std::string& from, const std::string& to, double settle_seconds,
               bool drop_dangling, const std::string& out_path) {
    SensorRegistry registry = SensorRegistry::load(registry_path);

    std::map<std::string, std::string> resident_of;
    for (const auto& arg : resident_args) {
        auto eq = arg.find('=');
        if (eq == std::string::npos)
            throw Error("cli", "BadArgument", "--resident expects LABEL=ID, got '" + arg + "'");
        resident_of[arg.substr(0, eq)] = arg.substr(eq + 1);
    }

    std::vector<HomeStream> streams;
    for (const HomeArg& h : parse_home_args(home_args)) {
        auto it = resident_of.find(h.label);
        std::string resident = it == resident_of.end() ? h.label : it->second;
        streams.push_back(load_home_stream(h.path, h.label, resident));
    }

    DateRange window{parse_date(from), parse_date(to)};
    IngestStats stats;
    ServiceEventLog log = merge_homes(streams, window, registry, &stats,
                                      std::int64_t(settle_seconds * Timestamp::kUsPerSecond));

    std::vector<ServiceEvent> events = log.events();
    if (drop_dangling)
        std::erase_if(events, [](const ServiceEvent& e) { return e.dangling; });

    std::ostringstream csv_text;
    csv::write_events(csv_text, events);
    write_file_atomic(out_path, csv_text.str());

    std::cerr << "{\"events\":" << events.size() << ",\"dangling_on\":" << stats.dangling_on
              << ",\"unmatched_off\":" << stats.unmatched_off
              << ",\"duplicate_on\":" << stats.duplicate_on
              << ",\"unregistered\":" << stats.unregistered << "}\n";
    return 0;
}

int cmd_detect(const std::string& events_path, const std::string& profiles_path,
               const std::string& out_path) {
    ServiceEventLog log{csv::read_events_file(events_path)};
    ProfileMap profiles = load_profiles(profiles_path);
    std::vector<ConflictCase> cases = detect_conflicts(log, profiles);
    write_file_atomic(out_path, jsonio::conflicts_to_string(cases));
    std::cerr << "{\"conflicts\":" << cases.size() << "}\n";
    return 0;
}

int cmd_rank(const std::string& conflicts_path, const std::string& profiles_path,
             const std::string& templates_path, double delta, const std::string& out_path) {
    std::vector<ConflictCase> cases = jsonio::read_conflicts_file(conflicts_path);
    ProfileMap profiles = load_profiles(profiles_path);
    TemplateOverrides overrides;
    if (!templates_path.empty()) overrides = load_templates(templates_path);
    ahp::RandomIndexTable ri = ahp::RandomIndexTable::standard();

    jsonio::ordered_json out = jsonio::ordered_json::array();
    for (const ConflictCase& c : cases) {
        RankingDiagnostics diag;
        auto ranking = rank_residents(c, profiles, ri, &overrides, &diag, delta);
        out.push_back({{"conflict", jsonio::conflict_to_json(c)},
                       {"ranking", jsonio::ranking_to_json(ranking)},
                       {"diagnostics", jsonio::diagnostics_to_json(diag)}});
    }
    write_file_atomic(out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_resolve(const std::string& conflicts_path, const std::string& profiles_path,
                const std::string& strategy, const std::string& templates_path,
                const std::string& registry_path, const std::string& rounding,
                const std::vector<std::string>& static_order, double delta,
                const std::string& out_path) {
    std::vector<ConflictCase> cases = jsonio::read_conflicts_file(conflicts_path);
    TemplateOverrides overrides;
    if (!templates_path.empty()) overrides = load_templates(templates_path);
    SensorRegistry registry;
    if (!registry_path.empty()) registry = SensorRegistry::load(registry_path);
    ahp::RandomIndexTable ri = ahp::RandomIndexTable::standard();

    jsonio::ordered_json out = jsonio::ordered_json::array();
    for (const ConflictCase& c : cases) {
        ResolutionDecision decision;
        if (strategy == "adaptive") {
            ProfileMap profiles = load_profiles(profiles_path);
            RankingDiagnostics diag;
            auto ranking = rank_residents(c, profiles, ri, &overrides, &diag, delta);
            StrategyConfig cfg;
            cfg.rounding = parse_rounding(rounding);
            cfg.granularity = registry.granularity(c.attribute);
            decision = resolve_adaptive(c, ranking, cfg);
            decision.diagnostics = std::move(diag);
        } else if (strategy == "average") {
            decision = resolve_average(c);
        } else if (strategy == "use-first") {
            decision = resolve_use_first(c);
        } else if (strategy == "static") {
            if (static_order.empty())
                throw Error("cli", "BadArgument", "--strategy static needs --static-order");
            decision = resolve_static_priority(c, static_order);
        } else {
            throw Error("cli", "BadArgument", "unknown strategy '" + strategy + "'");
        }
        out.push_back(jsonio::decision_to_json(c, decision));
    }
    write_file_atomic(out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path, bool as_json) {
    ExperimentConfig cfg = load_experiment(config_path);
    AccuracyReport report = run_experiment(cfg);
    if (as_json) {
        write_file_atomic(out_path, jsonio::report_to_json(report).dump(2) + "\n");
    } else {
        std::ostringstream csv_text;
        write_report_csv(csv_text, report);
        write_file_atomic(out_path, csv_text.str());
    }
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_path, bool as_json) {
    std::vector<AccuracyReport> reports;
    for (const auto& path : inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cli", "FileNotFound", "cannot open '" + path + "'");
        reports.push_back(read_report_csv(in, path));
    }
    AccuracyReport combined = aggregate_reports(reports);
    if (as_json) {
        write_file_atomic(out_path, jsonio::report_to_json(combined).dump(2) + "\n");
    } else {
        std::ostringstream csv_text;
        write_report_csv(csv_text, combined);
        write_file_atomic(out_path, csv_text.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conflict resolution engine for multi-resident smart homes"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Parse raw home logs and merge them into one event CSV");
    std::vector<std::string> home_args, resident_args;
    std::string registry_path, out_path;
    std::string from = "2011-06-15", to = "2011-08-14";
    double settle_seconds = 60.0;
    bool drop_dangling = false;
    ingest->add_option("--home", home_args, "LABEL=PATH of a raw single-resident log")->required();
    ingest->add_option("--resident", resident_args, "LABEL=ID resident id override (defaults to label)");
    ingest->add_option("--registry", registry_path, "sensor registry TOML")->required();
    ingest->add_option("--from", from, "window start date (YYYY-MM-DD)");
    ingest->add_option("--to", to, "window end date, inclusive (YYYY-MM-DD)");
    ingest->add_option("--settle-window", settle_seconds, "settling window in seconds");
    ingest->add_flag("--drop-dangling", drop_dangling, "drop events closed at stream end");
    ingest->add_option("--out", out_path, "output events CSV")->required();

    // detect
    auto* detect = app.add_subcommand("detect", "Find conflicts in a normalized event CSV");
    std::string events_path, profiles_path, conflicts_out;
    detect->add_option("--events", events_path, "events CSV")->required();
    detect->add_option("--profiles", profiles_path, "resident profiles TOML")->required();
    detect->add_option("--out", conflicts_out, "output conflicts JSON")->required();

    // rank
    auto* rank = app.add_subcommand("rank", "Rank the residents of each detected conflict");
    std::string rank_conflicts, rank_profiles, rank_templates, rank_out;
    double rank_delta = kDefaultScoreDelta;
    rank->add_option("--conflicts", rank_conflicts, "conflicts JSON")->required();
    rank->add_option("--profiles", rank_profiles, "resident profiles TOML")->required();
    rank->add_option("--templates", rank_templates, "criteria template overrides TOML");
    rank->add_option("--delta", rank_delta, "smoothing offset for profile scoring");
    rank->add_option("--out", rank_out, "output rankings JSON")->required();

    // resolve
    auto* resolve = app.add_subcommand("resolve", "Compute setpoints for detected conflicts");
    std::string res_conflicts, res_profiles, res_strategy = "adaptive", res_templates,
                res_registry, res_rounding = "directional", res_out;
    std::vector<std::string> res_static_order;
    double res_delta = kDefaultScoreDelta;
    resolve->add_option("--conflicts", res_conflicts, "conflicts JSON")->required();
    resolve->add_option("--profiles", res_profiles, "resident profiles TOML (adaptive strategy)");
    resolve->add_option("--strategy", res_strategy, "adaptive|average|use-first|static");
    resolve->add_option("--templates", res_templates, "criteria template overrides TOML");
    resolve->add_option("--registry", res_registry, "sensor registry TOML (rounding granularity)");
    resolve->add_option("--rounding", res_rounding, "directional|nearest|none");
    resolve->add_option("--static-order", res_static_order, "resident ids, highest priority first");
    resolve->add_option("--delta", res_delta, "smoothing offset for profile scoring");
    resolve->add_option("--out", res_out, "output decisions JSON")->required();

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run the seeded strategy-comparison harness");
    std::string sim_config, sim_out;
    bool sim_json = false;
    simulate->add_option("--config", sim_config, "experiment TOML")->required();
    simulate->add_option("--out", sim_out, "output report (CSV by default)")->required();
    simulate->add_flag("--json", sim_json, "emit JSON records instead of CSV");

    // report
    auto* report = app.add_subcommand("report", "Average several simulation reports");
    std::vector<std::string> report_inputs;
    std::string report_out;
    bool report_json = false;
    report->add_option("--in", report_inputs, "input report CSVs")->required()->expected(-1);
    report->add_option("--out", report_out, "output aggregated report")->required();
    report->add_flag("--json", report_json, "emit JSON records instead of CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ingest->parsed())
            return cmd_ingest(home_args, resident_args, registry_path, from, to, settle_seconds,
                              drop_dangling, out_path);
        if (detect->parsed()) return cmd_detect(events_path, profiles_path, conflicts_out);
        if (rank->parsed())
            return cmd_rank(rank_conflicts, rank_profiles, rank_templates, rank_delta, rank_out);
        if (resolve->parsed())
            return cmd_resolve(res_conflicts, res_profiles, res_strategy, res_templates,
                               res_registry, res_rounding, res_static_order, res_delta, res_out);
        if (simulate->parsed()) return cmd_simulate(sim_config, sim_out, sim_json);
        if (report->parsed()) return cmd_report(report_inputs, report_out, report_json);
    } catch (const confres::ahp::InconsistentMatrix& e) {
        std::cerr << "{\"error\":{\"code\":\"" << e.qualified_code() << "\",\"cr\":"
                  << e.diagnostics.cr << ",\"message\":\"" << e.what() << "\"}}\n";
        return 1;
    } catch (const confres::Error& e) {
        std::cerr << "{\"error\":{\"code\":\"" << e.qualified_code() << "\",\"message\":\""
                  << e.what() << "\"}}\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":{\"code\":\"internal\",\"message\":\"" << e.what() << "\"}}\n";
        return 1;
    }
    return 2;
}
