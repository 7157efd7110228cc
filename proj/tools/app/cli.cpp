#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

#include <cascadenet/error.hpp>
#include <cascadenet/fetch.hpp>
#include <cascadenet/io.hpp>

#include "commands.hpp"
#include "config.hpp"

namespace cascadenet::app {
namespace {

struct Flags {
    std::string input;
    std::string config_file;
    std::vector<double> theta;
    std::uint64_t seed = 0;
    std::size_t runs = 0;
    std::string scenario;
    std::vector<std::string> targets;
    std::string ref_price;
    std::string output_dir;
    std::string dump_config;
    std::string start, end;
    bool transpose = false;
    bool shock_all = false;

    // fetch only
    std::vector<std::string> tickers;
    std::string endpoint;
    std::string fetch_output;
};

Date parse_flag_date(const std::string& text, const char* flag) {
    auto d = Date::parse(text);
    if (!d) throw UsageError(std::string("--") + flag + " expects YYYY-MM-DD, got '" + text + "'");
    return *d;
}

// defaults < CASCADENET_SEED < config file < flags
RunConfig resolve_config(const Flags& f, const CLI::App& app) {
    RunConfig c;
    if (const char* env = std::getenv("CASCADENET_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            c.seed = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("CASCADENET_SEED is not an unsigned integer: ") + env);
        }
    }
    if (app.count("--config")) c = load_config(f.config_file, c);
    if (app.count("--input")) c.input_csv = f.input;
    if (app.count("--theta")) c.theta_list = f.theta;
    if (app.count("--seed")) c.seed = f.seed;
    if (app.count("--runs")) c.n_runs = f.runs;
    if (app.count("--scenario")) c.scenario = f.scenario;
    if (app.count("--target")) c.targets = f.targets;
    if (app.count("--ref-price")) c.reference_price_mode = parse_reference_price_mode(f.ref_price);
    if (app.count("--output-dir")) c.output_dir = f.output_dir;
    if (app.count("--start")) c.start = parse_flag_date(f.start, "start");
    if (app.count("--end")) c.end = parse_flag_date(f.end, "end");
    if (app.count("--transpose-exposures")) c.transpose_exposures = true;
    if (app.count("--shock-all")) c.shock_all = true;
    c.validate();
    return c;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage: return kExitUsage;
        case ErrorKind::Data: return kExitData;
        case ErrorKind::Io: return kExitIo;
    }
    return kExitData;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"cascadenet: exposure networks, default cascades and tail risk from equity prices"};
    app.require_subcommand(1);
    app.fallthrough();

    Flags f;
    app.add_option("--input", f.input, "Price CSV: date,<ticker>,...");
    app.add_option("--config", f.config_file, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--theta", f.theta, "Exposure/correlation threshold (repeatable)");
    app.add_option("--seed", f.seed, "Monte Carlo seed (falls back to CASCADENET_SEED, then 42)");
    app.add_option("--runs", f.runs, "Monte Carlo runs per scenario and threshold");
    app.add_option("--scenario", f.scenario, "Shock scenario")
        ->check(CLI::IsMember({"all", "general", "single", "simultaneous"}));
    app.add_option("--target", f.targets, "Shocked ticker (repeatable)");
    app.add_flag("--transpose-exposures", f.transpose, "Propagate losses along E_ji instead of E_ij");
    app.add_flag("--shock-all", f.shock_all, "General scenario shocks every asset in each run");
    app.add_option("--ref-price", f.ref_price, "Reference price per asset")
        ->check(CLI::IsMember({"mean", "first", "last"}));
    app.add_option("--output-dir", f.output_dir, "Directory for report files");
    app.add_option("--start", f.start, "First date to include (YYYY-MM-DD)");
    app.add_option("--end", f.end, "Last date to include (YYYY-MM-DD)");
    app.add_option("--dump-config", f.dump_config, "Write the effective configuration as JSON ('-' for stdout) and exit");

    auto* fetch = app.add_subcommand("fetch", "Download daily low prices into a CSV");
    fetch->add_option("--ticker", f.tickers, "Ticker to download (repeatable)")->required();
    fetch->add_option("--endpoint", f.endpoint, "Quote service base URL (http://host:port/path)")->required();
    fetch->add_option("--output", f.fetch_output, "CSV file to write")->required();
    auto* stats = app.add_subcommand("stats", "Descriptive statistics and normalized prices");
    auto* network = app.add_subcommand("network", "Correlation/exposure networks, clustering, VaR/CVaR");
    auto* cascade = app.add_subcommand("cascade", "Monte Carlo and deterministic default cascades");
    auto* tail = app.add_subcommand("tail", "Loss CCDF, Hill plots and Pareto tail classification");
    auto* report = app.add_subcommand("report", "Run stats, network, cascade and tail");

    std::vector<const char*> argv{"cascadenet"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const RunConfig config = resolve_config(f, app);
        if (app.count("--dump-config")) {
            if (f.dump_config == "-")
                out << to_json(config);
            else
                write_text_file(f.dump_config, to_json(config));
            return kExitOk;
        }

        if (fetch->parsed()) {
            FetchRequest req;
            req.tickers = f.tickers;
            req.endpoint = f.endpoint;
            if (!config.start || !config.end) throw UsageError("fetch needs --start and --end");
            req.start = *config.start;
            req.end = *config.end;
            const FetchResult r = fetch_prices(req, f.fetch_output);
            for (const auto& w : r.warnings) err << "warning: " << w << "\n";
            out << "wrote " << r.rows << " rows for " << r.fetched.size() << " ticker(s) to " << f.fetch_output << "\n";
        } else if (stats->parsed()) {
            cmd_stats(config, err);
        } else if (network->parsed()) {
            cmd_network(config, err);
        } else if (cascade->parsed()) {
            cmd_cascade(config, err);
        } else if (tail->parsed()) {
            cmd_tail(config, err);
        } else if (report->parsed()) {
            cmd_report(config, err);
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return kExitData;
    }
    return kExitOk;
}

}  // namespace cascadenet::app
