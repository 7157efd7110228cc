#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <cascadenet/cascade.hpp>
#include <cascadenet/date.hpp>
#include <cascadenet/network.hpp>

namespace cascadenet::app {

/// Every parameter that influences a pipeline run. Serialized as one flat
/// JSON object; file values are overridden by command-line flags.
struct RunConfig {
    std::filesystem::path input_csv;
    std::optional<Date> start;
    std::optional<Date> end;
    std::vector<double> theta_list{0.3, 0.5};
    double alpha_level = 0.95;
    double iqr_multiplier = 1.5;
    CapitalConfig capital;
    double influence_threshold = 0.5;
    std::size_t n_runs = 1000;
    std::uint64_t seed = 42;
    ReferencePriceMode reference_price_mode = ReferencePriceMode::Mean;
    std::filesystem::path output_dir = "out";

    std::string scenario = "all";  // all | general | single | simultaneous
    std::vector<std::string> targets;
    bool shock_all = false;
    bool transpose_exposures = false;

    /// Throws UsageError describing the first violated constraint.
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::string to_json(const RunConfig& config);

/// Parses a config document on top of `base`; keys absent from the document
/// keep base's values. Unknown keys are rejected.
RunConfig config_from_json(const std::string& text, RunConfig base = {});

RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

std::string to_string(ReferencePriceMode mode);
ReferencePriceMode parse_reference_price_mode(const std::string& text);

}  // namespace cascadenet::app
