#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <cascadenet/market_data.hpp>

#include "config.hpp"

namespace cascadenet::app {

/// Loaded, date-restricted, cleaned and aligned input panel.
struct Panel {
    std::vector<PriceSeries> prices;
    ReturnMatrix returns;
};

Panel load_panel(const RunConfig& config);

// Each command writes its files under config.output_dir and reports progress
// and warnings on `log`. Files are written only after all computation for the
// command succeeded.
void cmd_stats(const RunConfig& config, std::ostream& log);
void cmd_network(const RunConfig& config, std::ostream& log);
void cmd_cascade(const RunConfig& config, std::ostream& log);
void cmd_tail(const RunConfig& config, std::ostream& log);
void cmd_report(const RunConfig& config, std::ostream& log);

/// Column/file tag for a threshold: 0.3 -> "03", 0.5 -> "05".
std::string theta_tag(double theta);

}  // namespace cascadenet::app
