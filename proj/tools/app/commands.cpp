#include "commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include <cascadenet/cascade.hpp>
#include <cascadenet/error.hpp>
#include <cascadenet/io.hpp>
#include <cascadenet/network.hpp>
#include <cascadenet/risk.hpp>

namespace cascadenet::app {

using nlohmann::json;

namespace {

/// Files produced by one command, flushed together once the command is done.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path root) : root_(std::move(root)) {}

    void add(const std::string& relative, std::string content) { files_[relative] = std::move(content); }

    void flush(std::ostream& log) const {
        for (const auto& [name, content] : files_) write_text_file(root_ / name, content);
        log << "wrote " << files_.size() << " file(s) under " << root_.string() << "\n";
    }

private:
    std::filesystem::path root_;
    std::map<std::string, std::string> files_;
};

std::string theta_label(double theta) { return format_sig6(theta); }

// Ticker as a file-name component.
std::string file_stem(std::string ticker) {
    for (char& c : ticker)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '_') c = '_';
    return ticker;
}

std::string level_tag(double alpha_level) {
    std::string s = format_sig6(alpha_level * 100.0);
    s.erase(std::remove(s.begin(), s.end(), '.'), s.end());
    return s;
}

std::size_t asset_index(const std::vector<std::string>& ids, const std::string& ticker) {
    auto it = std::find(ids.begin(), ids.end(), ticker);
    if (it == ids.end()) throw UsageError("unknown target ticker '" + ticker + "'");
    return static_cast<std::size_t>(it - ids.begin());
}

struct NetworkBundle {
    CorrelationMatrix rho;
    std::vector<double> sigma;
    RawExposure raw;
};

NetworkBundle build_networks(const RunConfig& config, const Panel& panel) {
    NetworkBundle b;
    b.rho = correlation_matrix(panel.returns);
    b.sigma = volatilities(panel.returns);
    b.raw = exposure_matrix(b.rho, b.sigma, reference_prices(panel.prices, config.reference_price_mode));
    return b;
}

void add_stats(const RunConfig&, const Panel& panel, OutputSet& out) {
    const auto stats = descriptive_stats(panel.returns);
    std::ostringstream csv;
    csv << "asset,mean,std,min,max\n";
    json j = json::array();
    for (const auto& s : stats) {
        csv << csv_field(s.asset_id) << ',' << format_sig6(s.mean) << ',' << format_sig6(s.std_dev) << ','
            << format_sig6(s.min) << ',' << format_sig6(s.max) << '\n';
        j.push_back({{"asset", s.asset_id}, {"mean", s.mean}, {"std", s.std_dev}, {"min", s.min}, {"max", s.max}});
    }
    out.add("descriptive_stats.csv", csv.str());
    out.add("descriptive_stats.json", j.dump(2) + "\n");

    std::ostringstream norm;
    norm << "date";
    std::vector<std::vector<double>> columns;
    for (const auto& s : panel.prices) {
        norm << ',' << csv_field(s.asset_id);
        columns.push_back(normalize_prices(s));
    }
    norm << '\n';
    const auto& dates = panel.prices.front().dates;
    for (std::size_t t = 0; t < dates.size(); ++t) {
        norm << dates[t].iso();
        for (const auto& c : columns) norm << ',' << format_sig6(c[t]);
        norm << '\n';
    }
    out.add("normalized_prices.csv", norm.str());
}

void add_network(const RunConfig& config, const Panel& panel, OutputSet& out) {
    const NetworkBundle b = build_networks(config, panel);
    const auto& ids = b.rho.asset_ids;
    out.add("correlation_matrix.csv", adjacency_csv(b.rho.rho, ids));
    out.add("exposure_matrix_raw.csv", adjacency_csv(b.raw.weights, ids));

    std::ostringstream ref;
    ref << "asset,reference_price,volatility\n";
    for (std::size_t i = 0; i < ids.size(); ++i)
        ref << csv_field(ids[i]) << ',' << format_sig6(b.raw.reference_prices[i]) << ',' << format_sig6(b.sigma[i])
            << '\n';
    out.add("reference_prices.csv", ref.str());

    std::vector<std::vector<TopologyStats>> exposure_stats;
    for (double theta : config.theta_list) {
        const std::string t = theta_label(theta);
        const ExposureNetwork net = threshold_filter(b.raw, theta);
        const CorrelationNetwork corr = correlation_network(b.rho, theta);
        const auto es = clustering_coefficients(net);
        const auto cs = clustering_coefficients(corr);

        auto exp_csv = graph_csv(net.weights, ids, es, true);
        out.add("network/exposure_nodes_theta" + t + ".csv", std::move(exp_csv.nodes));
        out.add("network/exposure_edges_theta" + t + ".csv", std::move(exp_csv.edges));
        out.add("network/exposure_adjacency_theta" + t + ".csv", adjacency_csv(net.weights, ids));
        auto cor_csv = graph_csv(corr.weights, ids, cs, false);
        out.add("network/correlation_nodes_theta" + t + ".csv", std::move(cor_csv.nodes));
        out.add("network/correlation_edges_theta" + t + ".csv", std::move(cor_csv.edges));

        std::ostringstream cmp;
        cmp << "asset,exposure_clustering,exposure_degree,exposure_triangles,correlation_clustering,"
               "correlation_degree,correlation_triangles\n";
        for (std::size_t i = 0; i < ids.size(); ++i)
            cmp << csv_field(ids[i]) << ',' << format_sig6(es[i].clustering) << ',' << es[i].degree << ','
                << es[i].triangles << ',' << format_sig6(cs[i].clustering) << ',' << cs[i].degree << ','
                << cs[i].triangles << '\n';
        out.add("network/clustering_theta" + t + ".csv", cmp.str());
        exposure_stats.push_back(es);
    }

    // Risk measures joined with exposure-network clustering per threshold.
    const std::string lvl = level_tag(config.alpha_level);
    std::ostringstream risk;
    risk << "asset,var" << lvl << ",cvar" << lvl;
    for (double theta : config.theta_list) risk << ",clustering_theta" << theta_tag(theta);
    risk << '\n';
    json j = json::array();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto r = panel.returns.asset_returns(i);
        const RiskMeasures m = risk_measures(ids[i], r, config.alpha_level);
        risk << csv_field(ids[i]) << ',' << format_sig6(m.var) << ',' << format_sig6(m.cvar);
        json row{{"asset", ids[i]}, {"alpha_level", m.alpha_level}, {"var", m.var}, {"cvar", m.cvar}};
        json clus = json::object();
        for (std::size_t k = 0; k < config.theta_list.size(); ++k) {
            risk << ',' << format_sig6(exposure_stats[k][i].clustering);
            clus[theta_label(config.theta_list[k])] = exposure_stats[k][i].clustering;
        }
        row["clustering"] = clus;
        risk << '\n';
        j.push_back(row);
    }
    out.add("risk_report.csv", risk.str());
    out.add("risk_report.json", j.dump(2) + "\n");
}

std::vector<Scenario> resolve_scenarios(const RunConfig& config, const std::vector<std::string>& ids,
                                        std::ostream& log) {
    std::vector<std::size_t> targets;
    for (const auto& t : config.targets) targets.push_back(asset_index(ids, t));

    std::vector<Scenario> out;
    const bool all = config.scenario == "all";
    if (all || config.scenario == "general") out.push_back(Scenario::general(config.shock_all));
    if (all || config.scenario == "single") out.push_back(Scenario::single(targets.empty() ? 0 : targets.front()));
    if (all || config.scenario == "simultaneous") {
        if (targets.size() >= 2) {
            out.push_back(Scenario::simultaneous(targets));
        } else if (targets.empty() && ids.size() >= 2) {
            out.push_back(Scenario::simultaneous({0, 1}));
        } else if (all) {
            log << "warning: simultaneous scenario needs two or more --target tickers; skipped\n";
        } else {
            throw UsageError("simultaneous scenario needs two or more --target tickers");
        }
    }
    return out;
}

json report_json(const SimulationReport& r) {
    return {{"seed", r.seed},
            {"n_runs", r.n_runs},
            {"theta", r.theta},
            {"scenario", r.scenario_label},
            {"scenario_kind", scenario_key(r.scenario)},
            {"failure_probability", r.failure_probability},
            {"avg_failed_assets", r.avg_failed_assets},
            {"histogram", r.histogram()},
            {"per_run_failed_counts", r.per_run_failed_counts}};
}

void add_cascade(const RunConfig& config, const Panel& panel, OutputSet& out, std::ostream& log) {
    const NetworkBundle b = build_networks(config, panel);
    const auto& ids = b.rho.asset_ids;
    const auto scenarios = resolve_scenarios(config, ids, log);
    const std::size_t seed_asset = config.targets.empty() ? 0 : asset_index(ids, config.targets.front());

    std::ostringstream table;
    table << "scenario,theta,failure_probability,avg_failed_assets\n";
    json reports = json::array();
    for (const Scenario& sc : scenarios) {
        for (double theta : config.theta_list) {
            ExposureNetwork net = threshold_filter(b.raw, theta);
            if (config.transpose_exposures) net = net.transposed();
            const SimulationReport r = monte_carlo(net, config.capital, sc, config.n_runs, config.seed);
            table << csv_field(r.scenario_label) << ',' << theta_label(theta) << ','
                  << format_sig6(r.failure_probability) << ',' << format_sig6(r.avg_failed_assets) << '\n';
            reports.push_back(report_json(r));
        }
    }
    out.add("monte_carlo.csv", table.str());
    out.add("monte_carlo.json", reports.dump(2) + "\n");

    for (double theta : config.theta_list) {
        const std::string t = theta_label(theta);

        // Influence cascade seeded at one asset on the filtered correlation graph.
        const CorrelationNetwork corr = correlation_network(b.rho, theta);
        const std::size_t seeds[] = {seed_asset};
        const CascadeState det = deterministic_cascade(corr, seeds, config.influence_threshold);
        out.add("cascade/propagation_heatmap_theta" + t + ".csv", propagation_heatmap_csv(det, ids));

        const auto before = clustering_coefficients(corr);
        const auto after = clustering_without(corr.weights, ids, det.defaulted);
        std::ostringstream delta;
        delta << "asset,defaulted,clustering_before,clustering_after,delta\n";
        for (std::size_t i = 0; i < ids.size(); ++i)
            delta << csv_field(ids[i]) << ',' << int{det.defaulted[i]} << ',' << format_sig6(before[i].clustering)
                  << ',' << format_sig6(after[i].clustering) << ','
                  << format_sig6(after[i].clustering - before[i].clustering) << '\n';
        out.add("cascade/clustering_after_cascade_theta" + t + ".csv", delta.str());

        // Capital/loss cascade from a mid-range shock on the same asset.
        ExposureNetwork net = threshold_filter(b.raw, theta);
        if (config.transpose_exposures) net = net.transposed();
        CascadeState gk = initial_state(net.reference_prices, config.capital);
        const double shock = 0.5 * (config.capital.shock_low + config.capital.shock_high);
        apply_shock(gk, seed_asset, shock, net.reference_prices);
        gk = run_cascade(std::move(gk), net);
        out.add("cascade/capital_heatmap_theta" + t + ".csv", propagation_heatmap_csv(gk, ids));
    }
}

void add_tail(const RunConfig&, const Panel& panel, OutputSet& out, std::ostream& log) {
    const auto& ids = panel.returns.asset_ids;
    std::vector<TailFit> fits;
    std::ostringstream fit_table;
    fit_table << "asset,hill_alpha,k_used,n_losses,ccdf_threshold,ccdf_slope,ccdf_alpha,stable_k_first,"
                 "stable_k_last,stable_alpha\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto losses = loss_sample(panel.returns.asset_returns(i));
        std::optional<TailFit> fit;
        CcdfCurve curve;
        try {
            fit = fit_tail(ids[i], losses);
            if (fit) curve = empirical_ccdf(losses);
        } catch (const Error& e) {
            log << "warning: " << ids[i] << ": " << e.what() << "; skipped\n";
            continue;
        }
        if (!fit) {
            log << "warning: " << ids[i] << ": only " << losses.size() << " losses, too few for a tail fit; skipped\n";
            continue;
        }
        curve.asset_id = ids[i];

        std::ostringstream ccdf;
        ccdf << "loss,exceedance\n";
        for (const auto& p : curve.points) ccdf << format_sig6(p.loss) << ',' << format_sig6(p.exceedance) << '\n';
        out.add("tail/ccdf_" + file_stem(ids[i]) + ".csv", ccdf.str());

        std::string slope = "", ccdf_alpha = "", threshold = "";
        try {
            const PowerLawFit pl = fit_ccdf_tail(curve, losses, fit->threshold_percentile);
            slope = format_sig6(pl.slope);
            ccdf_alpha = format_sig6(-pl.slope);
            threshold = format_sig6(pl.threshold);
        } catch (const Error& e) {
            log << "warning: " << ids[i] << ": no power-law fit (" << e.what() << ")\n";
        }

        std::string stable_first, stable_last, stable_alpha;
        const std::size_t k_min = 5, k_max = losses.size() / 5;
        if (k_max > k_min) {
            try {
                const HillPlot hp = hill_plot_data(losses, k_min, k_max);
                std::ostringstream hill;
                hill << "k,alpha_hat,stable\n";
                for (std::size_t p = 0; p < hp.points.size(); ++p)
                    hill << hp.points[p].k << ',' << format_sig6(hp.points[p].alpha_hat) << ','
                         << (p >= hp.stable_first && p <= hp.stable_last ? 1 : 0) << '\n';
                out.add("tail/hill_" + file_stem(ids[i]) + ".csv", hill.str());
                stable_first = std::to_string(hp.points[hp.stable_first].k);
                stable_last = std::to_string(hp.points[hp.stable_last].k);
                stable_alpha = format_sig6(hp.stable_mean);
            } catch (const Error& e) {
                log << "warning: " << ids[i] << ": no Hill plot (" << e.what() << ")\n";
            }
        }
        fit_table << csv_field(ids[i]) << ',' << format_sig6(fit->alpha_hat) << ',' << fit->k_used << ','
                  << fit->n_losses << ',' << threshold << ',' << slope << ',' << ccdf_alpha << ',' << stable_first
                  << ',' << stable_last << ',' << stable_alpha << '\n';
        fits.push_back(*fit);
    }

    std::stable_sort(fits.begin(), fits.end(), [](const TailFit& a, const TailFit& b) { return a.alpha_hat < b.alpha_hat; });
    std::ostringstream table;
    table << "asset,pareto_alpha,n_losses,tail_type\n";
    json j = json::array();
    for (const TailFit& f : fits) {
        table << csv_field(f.asset_id) << ',' << format_sig6(f.alpha_hat) << ',' << f.n_losses << ','
              << to_string(f.tail_class) << '\n';
        j.push_back({{"asset", f.asset_id},
                     {"pareto_alpha", f.alpha_hat},
                     {"k_used", f.k_used},
                     {"n_losses", f.n_losses},
                     {"tail_type", std::string(to_string(f.tail_class))}});
    }
    out.add("tail_report.csv", table.str());
    out.add("tail_report.json", j.dump(2) + "\n");
    out.add("tail_fits.csv", fit_table.str());
}

}  // namespace

std::string theta_tag(double theta) {
    std::string s = format_sig6(theta);
    s.erase(std::remove(s.begin(), s.end(), '.'), s.end());
    return s;
}

Panel load_panel(const RunConfig& config) {
    config.validate();
    if (config.input_csv.empty()) throw UsageError("no input CSV given (use --input or the config 'input' key)");
    std::vector<PriceSeries> raw = load_price_csv(config.input_csv);
    Panel panel;
    panel.prices.reserve(raw.size());
    for (PriceSeries& s : raw) {
        if (config.start || config.end) {
            const Date lo = config.start.value_or(s.dates.empty() ? Date{} : s.dates.front());
            const Date hi = config.end.value_or(s.dates.empty() ? Date{} : s.dates.back());
            s = restrict_dates(s, lo, hi);
        }
        panel.prices.push_back(clean_series(s, config.iqr_multiplier));
    }
    panel.prices = align_panel(panel.prices);
    panel.returns = log_returns(panel.prices);
    return panel;
}

void cmd_stats(const RunConfig& config, std::ostream& log) {
    const Panel panel = load_panel(config);
    OutputSet out(config.output_dir);
    add_stats(config, panel, out);
    out.flush(log);
}

void cmd_network(const RunConfig& config, std::ostream& log) {
    const Panel panel = load_panel(config);
    OutputSet out(config.output_dir);
    add_network(config, panel, out);
    out.flush(log);
}

void cmd_cascade(const RunConfig& config, std::ostream& log) {
    const Panel panel = load_panel(config);
    OutputSet out(config.output_dir);
    add_cascade(config, panel, out, log);
    out.flush(log);
}

void cmd_tail(const RunConfig& config, std::ostream& log) {
    const Panel panel = load_panel(config);
    OutputSet out(config.output_dir);
    add_tail(config, panel, out, log);
    out.flush(log);
}

void cmd_report(const RunConfig& config, std::ostream& log) {
    const Panel panel = load_panel(config);
    OutputSet out(config.output_dir);
    add_stats(config, panel, out);
    add_network(config, panel, out);
    add_cascade(config, panel, out, log);
    add_tail(config, panel, out, log);
    out.flush(log);
}

}  // namespace cascadenet::app
