/**
 * @file cascade.hpp
 * @brief Default cascades on exposure and correlation networks.
 *
 * Two engines share the absorbing default state:
 *  - a capital/loss engine: asset i holds capital K_i, defaults once
 *    K_i < K_min,i, and on default passes L_ij = max(0, E_ij - (K_i - D_i)) to
 *    every j it is exposed to;
 *  - an influence engine: asset i defaults once the summed filtered
 *    correlation to defaulted neighbours exceeds a threshold.
 * Both update synchronously and stop at the first iteration that adds no default.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cascadenet/matrix.hpp"
#include "cascadenet/network.hpp"

namespace cascadenet {

using DefaultVector = std::vector<std::uint8_t>;

struct CapitalConfig {
    double capital_ratio = 0.2;       // K_i = capital_ratio * P_i
    double min_capital_ratio = 0.1;   // K_min,i = min_capital_ratio * P_i
    double shock_low = 0.1;
    double shock_high = 0.5;
    std::size_t systemic_failure_count = 5;  // systemic iff strictly more fail

    /// Throws UsageError when the ratios or the shock range are inconsistent.
    void validate() const;

    friend bool operator==(const CapitalConfig&, const CapitalConfig&) = default;
};

struct CascadeState {
    std::vector<double> capitals;        // current K_i
    std::vector<double> min_capitals;    // K_min,i
    std::vector<double> default_capital; // K_i at the moment i defaulted (NaN if alive)
    DefaultVector defaulted;
    DefaultVector newly_defaulted;       // defaults added by the latest step
    std::size_t iteration = 0;           // propagation steps that added a default
    std::vector<DefaultVector> history;  // default vector per recorded step

    std::size_t size() const noexcept { return defaulted.size(); }
    std::size_t default_count() const;
};

/// Fresh state with K_i and K_min,i scaled from reference prices; nobody in default.
CascadeState initial_state(std::span<const double> prices, const CapitalConfig& cfg);

/// K_target -= s * P_target; marks default when K_target < K_min,target.
void apply_shock(CascadeState& state, std::size_t target, double shock, std::span<const double> prices);

/// One synchronous propagation round from the assets defaulted in the previous
/// round. `incoming` holds D_i for every asset. Returns true if anyone new defaulted.
bool gai_kapadia_step(CascadeState& state, const ExposureNetwork& net, std::span<const double> incoming);

/// Records the starting default vector, then steps until no new default.
CascadeState run_cascade(CascadeState initial, const ExposureNetwork& net);

/// D_{t+1} = D_t OR 1[ sum_j weights(i, j) D_t(j) > tau_i ].
/// Throws ShapeError when sizes disagree.
DefaultVector recursion_step(const Matrix& weights, std::span<const double> tau, const DefaultVector& current);

/// Influence cascade on a filtered correlation network from `seeds`, default
/// when I_i > threshold. Capital fields of the result stay empty.
CascadeState deterministic_cascade(const CorrelationNetwork& net, std::span<const std::size_t> seeds,
                                   double threshold);

struct DeterministicConfig {
    double influence_threshold = 0.5;
    double theta = 0.3;
};

enum class ScenarioKind { General, SingleShock, SimultaneousShock };

struct Scenario {
    ScenarioKind kind = ScenarioKind::General;
    std::vector<std::size_t> targets;  // asset indices, unused for General
    bool shock_all = false;            // General only: shock every asset each run

    static Scenario general(bool shock_all = false) { return {ScenarioKind::General, {}, shock_all}; }
    static Scenario single(std::size_t target) { return {ScenarioKind::SingleShock, {target}, false}; }
    static Scenario simultaneous(std::vector<std::size_t> targets) {
        return {ScenarioKind::SimultaneousShock, std::move(targets), false};
    }
};

/// Table-style label, e.g. "Simultaneous Shock (VIVT3.SA + AAPL)".
std::string scenario_label(const Scenario& scenario, std::span<const std::string> asset_ids);
/// Short machine label, e.g. "simultaneous".
std::string scenario_key(const Scenario& scenario);

struct SimulationReport {
    std::size_t n_runs = 0;
    double theta = 0.0;
    Scenario scenario;
    std::string scenario_label;
    double failure_probability = 0.0;
    double avg_failed_assets = 0.0;
    std::vector<std::size_t> per_run_failed_counts;
    std::uint64_t seed = 0;

    /// histogram[c] = number of runs in which exactly c assets failed.
    std::vector<std::size_t> histogram() const;
};

struct MonteCarloOptions {
    std::size_t threads = 0;  // 0 picks hardware concurrency
};

/// Run r draws every shock from RngStream(seed, r), applies the scenario,
/// cascades, and records how many assets failed. Results do not depend on
/// the thread count.
SimulationReport monte_carlo(const ExposureNetwork& net, const CapitalConfig& cfg, const Scenario& scenario,
                             std::size_t n_runs, std::uint64_t seed, MonteCarloOptions options = {});

/// Rows = recorded steps, columns = assets, cells 0/1.
std::string propagation_heatmap_csv(const CascadeState& state, std::span<const std::string> asset_ids);
void export_propagation_heatmap(const CascadeState& state, std::span<const std::string> asset_ids,
                                const std::filesystem::path& file);

}  // namespace cascadenet
