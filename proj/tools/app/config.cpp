#include "config.hpp"

#include <json.hpp>

#include <cascadenet/error.hpp>
#include <cascadenet/io.hpp>

namespace cascadenet::app {

using nlohmann::json;

namespace {

const std::vector<std::string> kScenarios{"all", "general", "single", "simultaneous"};

Date parse_date_field(const json& value, const char* key) {
    const std::string text = value.get<std::string>();
    auto d = Date::parse(text);
    if (!d) throw UsageError(std::string("config: '") + key + "' is not a YYYY-MM-DD date: " + text);
    return *d;
}

}  // namespace

std::string to_string(ReferencePriceMode mode) {
    switch (mode) {
        case ReferencePriceMode::Mean: return "mean";
        case ReferencePriceMode::First: return "first";
        case ReferencePriceMode::Last: return "last";
    }
    return "mean";
}

ReferencePriceMode parse_reference_price_mode(const std::string& text) {
    if (text == "mean") return ReferencePriceMode::Mean;
    if (text == "first") return ReferencePriceMode::First;
    if (text == "last") return ReferencePriceMode::Last;
    throw UsageError("reference price mode must be mean, first or last, got '" + text + "'");
}

void RunConfig::validate() const {
    if (theta_list.empty()) throw UsageError("at least one theta is required");
    for (double t : theta_list)
        if (!(t > 0.0)) throw UsageError("every theta must be positive");
    if (start && end && !(*start < *end)) throw UsageError("date range start must precede end");
    if (!(alpha_level > 0.0 && alpha_level < 1.0)) throw UsageError("alpha_level must lie in (0, 1)");
    if (!(iqr_multiplier >= 0.0)) throw UsageError("iqr_multiplier must be non-negative");
    if (!(influence_threshold > 0.0)) throw UsageError("influence_threshold must be positive");
    if (n_runs < 1) throw UsageError("runs must be at least 1");
    capital.validate();
    if (std::find(kScenarios.begin(), kScenarios.end(), scenario) == kScenarios.end())
        throw UsageError("scenario must be one of all, general, single, simultaneous");
}

std::string to_json(const RunConfig& c) {
    json j;
    j["input"] = c.input_csv.string();
    j["start"] = c.start ? json(c.start->iso()) : json(nullptr);
    j["end"] = c.end ? json(c.end->iso()) : json(nullptr);
    j["theta"] = c.theta_list;
    j["alpha_level"] = c.alpha_level;
    j["iqr_multiplier"] = c.iqr_multiplier;
    j["capital_ratio"] = c.capital.capital_ratio;
    j["min_capital_ratio"] = c.capital.min_capital_ratio;
    j["shock_low"] = c.capital.shock_low;
    j["shock_high"] = c.capital.shock_high;
    j["systemic_failure_count"] = c.capital.systemic_failure_count;
    j["influence_threshold"] = c.influence_threshold;
    j["runs"] = c.n_runs;
    j["seed"] = c.seed;
    j["ref_price"] = to_string(c.reference_price_mode);
    j["output_dir"] = c.output_dir.string();
    j["scenario"] = c.scenario;
    j["targets"] = c.targets;
    j["shock_all"] = c.shock_all;
    j["transpose_exposures"] = c.transpose_exposures;
    return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text, RunConfig c) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw UsageError("config: top level must be a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "input") c.input_csv = value.get<std::string>();
            else if (key == "start") c.start = value.is_null() ? std::nullopt : std::optional(parse_date_field(value, "start"));
            else if (key == "end") c.end = value.is_null() ? std::nullopt : std::optional(parse_date_field(value, "end"));
            else if (key == "theta") c.theta_list = value.is_array() ? value.get<std::vector<double>>() : std::vector{value.get<double>()};
            else if (key == "alpha_level") c.alpha_level = value.get<double>();
            else if (key == "iqr_multiplier") c.iqr_multiplier = value.get<double>();
            else if (key == "capital_ratio") c.capital.capital_ratio = value.get<double>();
            else if (key == "min_capital_ratio") c.capital.min_capital_ratio = value.get<double>();
            else if (key == "shock_low") c.capital.shock_low = value.get<double>();
            else if (key == "shock_high") c.capital.shock_high = value.get<double>();
            else if (key == "systemic_failure_count") c.capital.systemic_failure_count = value.get<std::size_t>();
            else if (key == "influence_threshold") c.influence_threshold = value.get<double>();
            else if (key == "runs") c.n_runs = value.get<std::size_t>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "ref_price") c.reference_price_mode = parse_reference_price_mode(value.get<std::string>());
            else if (key == "output_dir") c.output_dir = value.get<std::string>();
            else if (key == "scenario") c.scenario = value.get<std::string>();
            else if (key == "targets") c.targets = value.get<std::vector<std::string>>();
            else if (key == "shock_all") c.shock_all = value.get<bool>();
            else if (key == "transpose_exposures") c.transpose_exposures = value.get<bool>();
            else throw UsageError("config: unknown key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: wrong value type: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    return config_from_json(read_text_file(path), std::move(base));
}

}  // namespace cascadenet::app
