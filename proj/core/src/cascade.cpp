#include "cascadenet/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "cascadenet/error.hpp"
#include "cascadenet/io.hpp"
#include "cascadenet/rng.hpp"

namespace cascadenet {
namespace {

void check_state_matches(const CascadeState& state, const ExposureNetwork& net, std::size_t incoming) {
    const std::size_t n = state.size();
    if (net.size() != n || net.weights.rows() != n || net.weights.cols() != n || incoming != n ||
        state.capitals.size() != n || state.min_capitals.size() != n || state.default_capital.size() != n ||
        state.newly_defaulted.size() != n) {
        std::ostringstream msg;
        msg << "cascade state covers " << n << " assets, network " << net.size() << ", incoming exposures "
            << incoming;
        throw ShapeError(msg.str());
    }
}

// One synchronous round: every asset that defaulted last round passes
// L_ij = max(0, E_ij - (K_i - D_i)) to each j it is exposed to, then new
// defaults are marked. `loss` is scratch space.
bool propagate_round(CascadeState& state, const ExposureNetwork& net, std::span<const double> incoming,
                     std::vector<double>& loss) {
    const std::size_t n = state.size();
    loss.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!state.newly_defaulted[i]) continue;
        const double buffer = state.default_capital[i] - incoming[i];
        const auto row = net.weights.row(i);
        for (std::size_t j = 0; j < n; ++j)
            if (row[j] > 0.0) loss[j] += std::max(0.0, row[j] - buffer);
    }
    bool any_new = false;
    for (std::size_t j = 0; j < n; ++j) {
        state.capitals[j] -= loss[j];
        state.newly_defaulted[j] = 0;
        if (!state.defaulted[j] && state.capitals[j] < state.min_capitals[j]) {
            state.defaulted[j] = state.newly_defaulted[j] = 1;
            state.default_capital[j] = state.capitals[j];
            any_new = true;
        }
    }
    return any_new;
}

void propagate(CascadeState& state, const ExposureNetwork& net, std::span<const double> incoming,
               bool record_history, std::vector<double>& scratch) {
    while (propagate_round(state, net, incoming, scratch)) {
        ++state.iteration;
        if (record_history) state.history.push_back(state.defaulted);
    }
}

}  // namespace

void CapitalConfig::validate() const {
    if (!(min_capital_ratio > 0.0 && min_capital_ratio < capital_ratio))
        throw UsageError("capital config: need 0 < min_capital_ratio < capital_ratio");
    if (!(shock_low > 0.0 && shock_low <= shock_high && shock_high < 1.0))
        throw UsageError("capital config: need 0 < shock_low <= shock_high < 1");
}

std::size_t CascadeState::default_count() const {
    return static_cast<std::size_t>(std::count(defaulted.begin(), defaulted.end(), std::uint8_t{1}));
}

CascadeState initial_state(std::span<const double> prices, const CapitalConfig& cfg) {
    const std::size_t n = prices.size();
    CascadeState s;
    s.capitals.resize(n);
    s.min_capitals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.capitals[i] = cfg.capital_ratio * prices[i];
        s.min_capitals[i] = cfg.min_capital_ratio * prices[i];
    }
    s.default_capital.assign(n, std::numeric_limits<double>::quiet_NaN());
    s.defaulted.assign(n, 0);
    s.newly_defaulted.assign(n, 0);
    return s;
}

void apply_shock(CascadeState& state, std::size_t target, double shock, std::span<const double> prices) {
    if (target >= state.size() || prices.size() != state.size())
        throw ShapeError("apply_shock: target or price vector outside the state");
    if (!(shock > 0.0 && shock < 1.0)) throw DomainError("apply_shock: shock must lie in (0, 1)");
    state.capitals[target] -= shock * prices[target];
    if (!state.defaulted[target] && state.capitals[target] < state.min_capitals[target]) {
        state.defaulted[target] = 1;
        state.newly_defaulted[target] = 1;
        state.default_capital[target] = state.capitals[target];
    }
}

bool gai_kapadia_step(CascadeState& state, const ExposureNetwork& net, std::span<const double> incoming) {
    check_state_matches(state, net, incoming.size());
    std::vector<double> loss;
    if (!propagate_round(state, net, incoming, loss)) return false;
    ++state.iteration;
    state.history.push_back(state.defaulted);
    return true;
}

CascadeState run_cascade(CascadeState initial, const ExposureNetwork& net) {
    const std::vector<double> incoming = incoming_exposure(net);
    check_state_matches(initial, net, incoming.size());
    initial.history.push_back(initial.defaulted);
    std::vector<double> scratch;
    propagate(initial, net, incoming, true, scratch);
    return initial;
}

DefaultVector recursion_step(const Matrix& weights, std::span<const double> tau, const DefaultVector& current) {
    const std::size_t n = current.size();
    if (weights.rows() != n || weights.cols() != n || tau.size() != n) {
        std::ostringstream msg;
        msg << "recursion_step: " << weights.rows() << "x" << weights.cols() << " weights, " << tau.size()
            << " thresholds, " << n << " states";
        throw ShapeError(msg.str());
    }
    DefaultVector next = current;
    for (std::size_t i = 0; i < n; ++i) {
        if (current[i]) continue;
        double influence = 0.0;
        const auto row = weights.row(i);
        for (std::size_t j = 0; j < n; ++j)
            if (current[j]) influence += row[j];
        if (influence > tau[i]) next[i] = 1;
    }
    return next;
}

CascadeState deterministic_cascade(const CorrelationNetwork& net, std::span<const std::size_t> seeds,
                                   double threshold) {
    if (!(threshold > 0.0)) throw DomainError("deterministic_cascade: influence threshold must be positive");
    if (seeds.empty()) throw DomainError("deterministic_cascade: need at least one seed");
    const std::size_t n = net.size();
    CascadeState state;
    state.defaulted.assign(n, 0);
    for (std::size_t s : seeds) {
        if (s >= n) throw ShapeError("deterministic_cascade: seed index out of range");
        state.defaulted[s] = 1;
    }
    state.newly_defaulted = state.defaulted;
    state.history.push_back(state.defaulted);

    const std::vector<double> tau(n, threshold);
    for (;;) {
        DefaultVector next = recursion_step(net.weights, tau, state.defaulted);
        if (next == state.defaulted) break;
        for (std::size_t i = 0; i < n; ++i) state.newly_defaulted[i] = next[i] && !state.defaulted[i];
        state.defaulted = std::move(next);
        ++state.iteration;
        state.history.push_back(state.defaulted);
    }
    std::fill(state.newly_defaulted.begin(), state.newly_defaulted.end(), std::uint8_t{0});
    return state;
}

std::string scenario_label(const Scenario& scenario, std::span<const std::string> asset_ids) {
    auto name = [&](std::size_t i) { return i < asset_ids.size() ? asset_ids[i] : "#" + std::to_string(i); };
    switch (scenario.kind) {
        case ScenarioKind::General:
            return scenario.shock_all ? "General Simulation (all assets)" : "General Simulation";
        case ScenarioKind::SingleShock:
            return "Single Shock (" + name(scenario.targets.at(0)) + ")";
        case ScenarioKind::SimultaneousShock: {
            std::string out = "Simultaneous Shock (";
            for (std::size_t k = 0; k < scenario.targets.size(); ++k) {
                if (k) out += " + ";
                out += name(scenario.targets[k]);
            }
            return out + ")";
        }
    }
    return {};
}

std::string scenario_key(const Scenario& scenario) {
    switch (scenario.kind) {
        case ScenarioKind::General: return scenario.shock_all ? "general-all" : "general";
        case ScenarioKind::SingleShock: return "single";
        case ScenarioKind::SimultaneousShock: return "simultaneous";
    }
    return {};
}

std::vector<std::size_t> SimulationReport::histogram() const {
    std::size_t top = 0;
    for (std::size_t c : per_run_failed_counts) top = std::max(top, c);
    std::vector<std::size_t> h(per_run_failed_counts.empty() ? 0 : top + 1, 0);
    for (std::size_t c : per_run_failed_counts) ++h[c];
    return h;
}

SimulationReport monte_carlo(const ExposureNetwork& net, const CapitalConfig& cfg, const Scenario& scenario,
                             std::size_t n_runs, std::uint64_t seed, MonteCarloOptions options) {
    cfg.validate();
    const std::size_t n = net.size();
    if (n_runs < 1) throw UsageError("monte_carlo: need at least one run");
    if (n == 0) throw DataError("monte_carlo: empty network");
    if (net.reference_prices.size() != n) throw ShapeError("monte_carlo: network lacks reference prices");
    if (scenario.kind != ScenarioKind::General) {
        if (scenario.targets.empty()) throw UsageError("monte_carlo: shock scenario without targets");
        if (scenario.kind == ScenarioKind::SingleShock && scenario.targets.size() != 1)
            throw UsageError("monte_carlo: single-shock scenario takes exactly one target");
        for (std::size_t t : scenario.targets)
            if (t >= n) throw UsageError("monte_carlo: shock target index out of range");
    }

    const std::vector<double> incoming = incoming_exposure(net);
    const CascadeState base = initial_state(net.reference_prices, cfg);
    std::vector<std::size_t> failed(n_runs, 0);

    auto run_range = [&](std::size_t first, std::size_t stride) {
        std::vector<double> scratch;
        std::vector<std::size_t> all_targets;
        for (std::size_t r = first; r < n_runs; r += stride) {
            RngStream rng(seed, r);
            CascadeState state = base;
            auto shock = [&](std::size_t target) {
                apply_shock(state, target, rng.uniform(cfg.shock_low, cfg.shock_high), net.reference_prices);
            };
            if (scenario.kind == ScenarioKind::General) {
                if (scenario.shock_all) {
                    for (std::size_t t = 0; t < n; ++t) shock(t);
                } else {
                    shock(static_cast<std::size_t>(rng.below(n)));
                }
            } else {
                for (std::size_t t : scenario.targets) shock(t);
            }
            propagate(state, net, incoming, false, scratch);
            failed[r] = state.default_count();
        }
    };

    std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n_runs);
    if (threads <= 1) {
        run_range(0, 1);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(run_range, t, threads);
    }

    SimulationReport report;
    report.n_runs = n_runs;
    report.theta = net.theta;
    report.scenario = scenario;
    report.scenario_label = scenario_label(scenario, net.asset_ids);
    report.seed = seed;
    std::size_t systemic = 0, total = 0;
    for (std::size_t c : failed) {
        total += c;
        if (c > cfg.systemic_failure_count) ++systemic;
    }
    report.failure_probability = static_cast<double>(systemic) / static_cast<double>(n_runs);
    report.avg_failed_assets = static_cast<double>(total) / static_cast<double>(n_runs);
    report.per_run_failed_counts = std::move(failed);
    return report;
}

std::string propagation_heatmap_csv(const CascadeState& state, std::span<const std::string> asset_ids) {
    if (state.history.empty()) throw DataError("propagation heatmap: cascade has no recorded history");
    if (asset_ids.size() != state.size()) throw ShapeError("propagation heatmap: asset list size mismatch");
    std::ostringstream out;
    out << "iteration";
    for (const auto& id : asset_ids) out << ',' << csv_field(id);
    out << '\n';
    for (std::size_t t = 0; t < state.history.size(); ++t) {
        out << t;
        for (std::uint8_t d : state.history[t]) out << ',' << (d ? 1 : 0);
        out << '\n';
    }
    return out.str();
}

void export_propagation_heatmap(const CascadeState& state, std::span<const std::string> asset_ids,
                                const std::filesystem::path& file) {
    write_text_file(file, propagation_heatmap_csv(state, asset_ids));
}

}  // namespace cascadenet
