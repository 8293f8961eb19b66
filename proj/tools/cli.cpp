#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "insider/errors.hpp"
#include "insider/quadrature.hpp"
#include "insider/serialization.hpp"
#include "insider/simulation.hpp"
#include "insider/time_grid.hpp"

namespace insider::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& doc, const std::set<std::string>& allowed, const std::string& where) {
    if (!doc.is_object()) throw ValidationError(where + " must be a JSON object");
    for (const auto& item : doc.items())
        if (!allowed.count(item.key())) throw ValidationError("unknown field '" + item.key() + "' in " + where);
}

double get_number(const json& doc, const char* key, double fallback) {
    if (!doc.contains(key)) return fallback;
    if (!doc.at(key).is_number()) throw ValidationError(std::string("field '") + key + "' must be a number");
    return doc.at(key).get<double>();
}

std::uint64_t get_count(const json& doc, const char* key) {
    const json& v = doc.at(key);
    if (!v.is_number_unsigned()) throw ValidationError(std::string("field '") + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string get_string(const json& doc, const char* key) {
    if (!doc.at(key).is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
    return doc.at(key).get<std::string>();
}

McSection parse_mc(const json& doc) {
    reject_unknown(doc, {"strategy", "paths", "grid", "steps", "seed", "threads", "path_csv"}, "mc");
    McSection mc;
    if (doc.contains("strategy")) mc.strategy = get_string(doc, "strategy");
    strategy_from_string(mc.strategy);
    if (doc.contains("paths")) mc.paths = get_count(doc, "paths");
    if (doc.contains("grid")) mc.grid = get_string(doc, "grid");
    if (doc.contains("steps")) mc.steps = static_cast<int>(get_count(doc, "steps"));
    if (doc.contains("seed")) mc.seed = get_count(doc, "seed");
    if (doc.contains("threads")) mc.threads = static_cast<unsigned>(get_count(doc, "threads"));
    if (doc.contains("path_csv")) mc.path_csv = get_string(doc, "path_csv");
    if (mc.steps < 1) throw ValidationError("mc.steps must be at least 1");
    return mc;
}

struct Options {
    std::string config_path;
    std::string out_path;
    std::string format;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<double> eps;
    std::optional<std::string> tgrid;
};

class ReportSink {
public:
    ReportSink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
        if (path.empty()) return;
        file_.open(path);
        if (!file_) throw ValidationError("cannot open output file '" + path + "'");
    }
    std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

std::string resolve_format(const Options& opts, const std::string& fallback) {
    const std::string f = opts.format.empty() ? fallback : opts.format;
    if (f != "csv" && f != "json") throw ValidationError("--format must be csv or json");
    return f;
}

RunConfig load_config(const Options& opts) {
    if (opts.config_path.empty()) throw ValidationError("--config is required");
    std::ifstream in(opts.config_path);
    if (!in) throw ValidationError("cannot read config file '" + opts.config_path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig config = parse_run_config(doc);
    if (opts.eps) config.eps = *opts.eps;
    if (opts.tgrid) config.tgrid = *opts.tgrid;
    if (opts.seed) config.seed = *opts.seed;
    if (opts.paths) config.paths = *opts.paths;
    return config;
}

void dump(std::ostream& out, const json& doc) { out << doc.dump(2) << '\n'; }

const char* const kValueCsvHeader =
    "horizon,eps,VF,VG,value_of_information,quadrature_error,truncation_bound,K_hat,last_octave_ratio,converged,verdict";
const char* const kMcCsvHeader =
    "strategy,horizon,paths,flagged_paths,mean_log_wealth,std_dev,standard_error,target_kind,target,z_score";
const char* const kOracleCsvHeader = "t,mc_EalphaSq,standard_error,quadrature_EalphaSq,quadrature_error,z_score";

int cmd_value(const RunConfig& cfg, const Options& opts, std::ostream& out) {
    const std::string format = resolve_format(opts, "json");
    std::vector<double> sweep{cfg.eps};
    if (cfg.horizon == 1.0) sweep.insert(sweep.end(), {1e-2, 1e-3, 1e-4});
    std::sort(sweep.begin(), sweep.end(), std::greater<>());
    sweep.erase(std::unique(sweep.begin(), sweep.end()), sweep.end());

    std::vector<ValueReport> reports;
    for (double eps : sweep)
        reports.push_back(value_of_information(cfg.market, cfg.info, cfg.initial_price, cfg.horizon, eps,
                                               cfg.initial_wealth));
    const ValueReport& main = *std::find_if(reports.begin(), reports.end(),
                                            [&](const ValueReport& r) { return r.eps == cfg.eps; });
    bool converged = true;
    for (const auto& r : reports) converged = converged && r.converged;

    ReportSink sink(opts.out_path, out);
    if (format == "json") {
        json doc = to_json(main);
        json rows = json::array();
        for (const auto& r : reports)
            rows.push_back({{"eps", r.eps},
                            {"VG", r.vg},
                            {"value_of_information", r.vg - r.vf},
                            {"quadrature_error", r.quadrature_error},
                            {"truncation_bound", std::isfinite(r.truncation_bound) ? json(r.truncation_bound) : json()}});
        doc["eps_sweep"] = rows;
        dump(sink.stream(), doc);
    } else {
        std::ostream& s = sink.stream();
        s << kValueCsvHeader << '\n';
        for (const auto& r : reports)
            s << format_number(r.horizon) << ',' << format_number(r.eps) << ',' << format_number(r.vf) << ','
              << format_number(r.vg) << ',' << format_number(r.vg - r.vf) << ',' << format_number(r.quadrature_error)
              << ',' << format_number(r.truncation_bound) << ',' << format_number(r.k_hat) << ','
              << format_number(r.last_octave_ratio) << ',' << (r.converged ? 1 : 0) << ",\"" << r.verdict()
              << "\"\n";
    }
    return converged ? kOk : kNotConverged;
}

int cmd_lemma_check(const RunConfig& cfg, const Options& opts, std::ostream& out, std::ostream& err) {
    const std::string format = resolve_format(opts, "csv");
    const auto grid = parse_time_grid(cfg.tgrid.value_or("geometric-to-1:20"));
    const LogThresholds th = log_thresholds(cfg.market, cfg.info, cfg.initial_price);
    const LemmaScanReport report = lemma_check(cfg.market, th, grid);
    {
        ReportSink sink(opts.out_path, out);
        if (format == "json")
            dump(sink.stream(), to_json(report));
        else
            write_csv(sink.stream(), report);
    }
    if (opts.out_path.empty()) {
        dump(err, lemma_summary_json(report));
    } else {
        std::ofstream summary(opts.out_path + ".summary.json");
        if (!summary) throw ValidationError("cannot write summary next to '" + opts.out_path + "'");
        dump(summary, lemma_summary_json(report));
    }
    return report.converged ? kOk : kNotConverged;
}

int cmd_bound_scan(const RunConfig& cfg, const Options& opts, std::ostream& out) {
    const std::string format = resolve_format(opts, "csv");
    const auto grid = parse_time_grid(cfg.tgrid.value_or("geometric-to-1:20"));
    const BoundScanReport report = bound_scan(cfg.market, cfg.info, cfg.initial_price, grid);
    ReportSink sink(opts.out_path, out);
    if (format == "json")
        dump(sink.stream(), to_json(report));
    else
        write_csv(sink.stream(), report);
    for (const auto& row : report.rows)
        if (!row.converged) return kNotConverged;
    return kOk;
}

int cmd_mc(const RunConfig& cfg, const Options& opts, std::ostream& out) {
    const std::string format = resolve_format(opts, "json");
    MCConfig mc;
    mc.strategy = strategy_from_string(cfg.mc.strategy);
    const bool insider = mc.strategy == StrategyKind::InsiderInterval || mc.strategy == StrategyKind::InsiderOneSided ||
                         mc.strategy == StrategyKind::InsiderExact;
    const double horizon = (insider && cfg.horizon == 1.0) ? 1.0 - cfg.eps : cfg.horizon;
    mc.grid = cfg.mc.grid ? parse_time_grid(*cfg.mc.grid) : linear_grid(0.0, horizon, cfg.mc.steps + 1);
    mc.paths = opts.paths.value_or(cfg.mc.paths.value_or(cfg.paths.value_or(100000)));
    mc.seed = opts.seed.value_or(cfg.mc.seed.value_or(cfg.seed));
    mc.threads = cfg.mc.threads;
    mc.keep_paths = !cfg.mc.path_csv.empty();
    const MCReport report = run_mc(cfg.market, cfg.info, cfg.initial_price, mc, cfg.initial_wealth);

    if (mc.keep_paths) {
        std::ofstream paths(cfg.mc.path_csv);
        if (!paths) throw ValidationError("cannot open path CSV '" + cfg.mc.path_csv + "'");
        write_path_csv(paths, report);
    }
    ReportSink sink(opts.out_path, out);
    if (format == "json") {
        dump(sink.stream(), to_json(report));
    } else {
        sink.stream() << kMcCsvHeader << '\n'
                      << report.strategy << ',' << format_number(report.horizon) << ',' << report.paths << ','
                      << report.flagged << ',' << format_number(report.mean_log_wealth) << ','
                      << format_number(report.std_dev) << ',' << format_number(report.standard_error) << ','
                      << report.target_kind << ',' << format_number(report.target) << ','
                      << format_number(report.z_score) << '\n';
    }
    return kOk;
}

int cmd_drift_oracle(const RunConfig& cfg, const Options& opts, std::ostream& out) {
    const std::string format = resolve_format(opts, "csv");
    std::vector<double> times = cfg.times;
    if (cfg.tgrid) times = parse_time_grid(*cfg.tgrid);
    if (times.empty()) times = {0.1, 0.3, 0.5, 0.7, 0.9};
    const std::size_t paths = cfg.paths.value_or(1000000);
    bool converged = true;

    json rows = json::array();
    std::ostringstream csv;
    csv << kOracleCsvHeader << '\n';
    for (double t : times) {
        const OracleEstimate mc =
            drift_mc_oracle(cfg.market, cfg.info, cfg.initial_price, t, paths, cfg.seed, cfg.mc.threads);
        const Estimate q = expected_alpha_sq(t, cfg.market, cfg.info, cfg.initial_price);
        converged = converged && q.converged;
        const double z = mc.standard_error > 0.0 ? (mc.mean - q.value) / mc.standard_error : 0.0;
        json row = to_json(mc);
        row["quadrature_EalphaSq"] = q.value;
        row["quadrature_error"] = q.error;
        row["z_score"] = z;
        rows.push_back(row);
        csv << format_number(t) << ',' << format_number(mc.mean) << ',' << format_number(mc.standard_error) << ','
            << format_number(q.value) << ',' << format_number(q.error) << ',' << format_number(z) << '\n';
    }
    ReportSink sink(opts.out_path, out);
    if (format == "json")
        dump(sink.stream(), json{{"paths", paths}, {"seed", cfg.seed}, {"rows", rows}});
    else
        sink.stream() << csv.str();
    return converged ? kOk : kNotConverged;
}

int cmd_martingale_scan(const RunConfig& cfg, const Options& opts, std::ostream& out) {
    const std::string format = resolve_format(opts, "csv");
    const auto grid = parse_time_grid(cfg.tgrid.value_or("linear:0:0.95:20"));
    const MartingaleReport report = martingale_scan(cfg.market, cfg.info, cfg.initial_price, grid,
                                                    cfg.paths.value_or(100000), cfg.seed, cfg.mc.threads);
    ReportSink sink(opts.out_path, out);
    if (format == "json")
        dump(sink.stream(), to_json(report));
    else
        write_csv(sink.stream(), report);
    return kOk;
}

void report_error(std::ostream& err, int code, const std::string& kind, const std::string& message) {
    err << json{{"error", {{"exit_code", code}, {"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
    reject_unknown(doc,
                   {"market", "info", "initial_price", "initial_wealth", "horizon", "eps", "tgrid", "t", "seed",
                    "paths", "mc"},
                   "config");
    if (!doc.contains("market")) throw ValidationError("config needs a 'market' section");
    if (!doc.contains("info")) throw ValidationError("config needs an 'info' section");
    CoefficientSet market = coefficients_from_json(doc.at("market"));
    const double initial_price = get_number(doc, "initial_price", 1.0);
    RunConfig cfg{.market = market,
                  .info = info_from_json(doc.at("info"), market, initial_price),
                  .initial_price = initial_price};
    cfg.initial_wealth = get_number(doc, "initial_wealth", 1.0);
    cfg.horizon = get_number(doc, "horizon", 1.0);
    cfg.eps = get_number(doc, "eps", 1e-3);
    if (!(cfg.initial_wealth > 0.0)) throw ValidationError("initial_wealth must be positive");
    if (!(cfg.horizon > 0.0 && cfg.horizon <= 1.0)) throw ValidationError("horizon must lie in (0, 1]");
    if (!(cfg.eps >= 0.0 && cfg.eps < cfg.horizon)) throw ValidationError("eps must lie in [0, horizon)");
    if (doc.contains("tgrid")) {
        cfg.tgrid = get_string(doc, "tgrid");
        parse_time_grid(*cfg.tgrid);
    }
    if (doc.contains("t")) {
        if (!doc.at("t").is_array()) throw ValidationError("field 't' must be an array of times");
        for (const auto& v : doc.at("t")) {
            if (!v.is_number()) throw ValidationError("field 't' must be an array of times");
            cfg.times.push_back(v.get<double>());
        }
    }
    if (doc.contains("seed")) cfg.seed = get_count(doc, "seed");
    if (doc.contains("paths")) cfg.paths = get_count(doc, "paths");
    if (doc.contains("mc")) cfg.mc = parse_mc(doc.at("mc"));
    return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Value of interval-type insider information under log utility"};
    app.fallthrough();
    app.require_subcommand(0, 1);
    Options opts;
    bool selftest_flag = false;
    app.add_option("--config", opts.config_path, "JSON run configuration");
    app.add_option("--out", opts.out_path, "write the report here instead of stdout");
    app.add_option("--format", opts.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", opts.seed, "Monte Carlo seed");
    app.add_option("--paths", opts.paths, "number of Monte Carlo paths")->check(CLI::PositiveNumber);
    app.add_option("--eps", opts.eps, "horizon cutoff eps (T - eps)")->check(CLI::NonNegativeNumber);
    app.add_option("--tgrid", opts.tgrid, "time grid, e.g. linear:a:b:n or geometric-to-1:k");
    app.add_flag("--selftest", selftest_flag, "run the built-in smoke checks");

    auto* value = app.add_subcommand("value", "value of information with finiteness verdict");
    auto* lemma = app.add_subcommand("lemma-check", "x-integral of I(x, t) over a time grid");
    auto* bound = app.add_subcommand("bound-scan", "E[alpha^2(t)] sqrt(t (1 - t)) over a time grid");
    auto* mc = app.add_subcommand("mc", "Monte Carlo expected log wealth of a strategy");
    auto* oracle = app.add_subcommand("drift-oracle", "Monte Carlo E[alpha^2(t)] against quadrature");
    auto* martingale = app.add_subcommand("martingale-scan", "mean of P(L = 1 | F_t) along simulated paths");
    auto* selftest_cmd = app.add_subcommand("selftest", "run the built-in smoke checks");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        report_error(err, kConfigError, "usage", e.what());
        return kConfigError;
    }

    try {
        if (selftest_flag || selftest_cmd->parsed()) return selftest(out) == 0 ? kOk : kInternalError;
        if (app.get_subcommands().empty()) throw ValidationError("no subcommand given; see --help");
        const RunConfig cfg = load_config(opts);
        if (value->parsed()) return cmd_value(cfg, opts, out);
        if (lemma->parsed()) return cmd_lemma_check(cfg, opts, out, err);
        if (bound->parsed()) return cmd_bound_scan(cfg, opts, out);
        if (mc->parsed()) return cmd_mc(cfg, opts, out);
        if (oracle->parsed()) return cmd_drift_oracle(cfg, opts, out);
        if (martingale->parsed()) return cmd_martingale_scan(cfg, opts, out);
        throw std::logic_error("unhandled subcommand");
    } catch (const ValidationError& e) {
        report_error(err, kConfigError, "config", e.what());
        return kConfigError;
    } catch (const std::domain_error& e) {
        report_error(err, kConfigError, "config", e.what());
        return kConfigError;
    } catch (const nlohmann::json::exception& e) {
        report_error(err, kConfigError, "config", e.what());
        return kConfigError;
    } catch (const ConvergenceError& e) {
        report_error(err, kNotConverged, "convergence", e.what());
        return kNotConverged;
    } catch (const NumericalError& e) {
        report_error(err, kNotConverged, "numerical", e.what());
        return kNotConverged;
    } catch (const std::exception& e) {
        report_error(err, kInternalError, "internal", e.what());
        return kInternalError;
    }
}

}  // namespace insider::cli
