/**
 * @file market_data.hpp
 * @brief Price ingestion, cleaning, and log-return panels.
 *
 * Missing observations are carried as NaN in PriceSeries::prices until
 * clean_series() fills them. Everything downstream of log_returns() works on
 * finite values only.
 */
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cascadenet/date.hpp"
#include "cascadenet/matrix.hpp"

namespace cascadenet {

/// Daily price history of one asset. NaN marks a missing observation.
struct PriceSeries {
    std::string asset_id;
    std::vector<Date> dates;
    std::vector<double> prices;

    std::size_t size() const noexcept { return prices.size(); }
    std::size_t missing_count() const;
};

/// Aligned panel of daily log returns, one row per date and one column per asset.
/// dates[t] is the date of the later price in the ratio P_t / P_{t-1}.
struct ReturnMatrix {
    std::vector<std::string> asset_ids;
    std::vector<Date> dates;
    Matrix returns;  // dates.size() x asset_ids.size()

    std::size_t observations() const noexcept { return returns.rows(); }
    std::size_t assets() const noexcept { return returns.cols(); }
    std::vector<double> asset_returns(std::size_t asset) const { return returns.column(asset); }
};

struct DescriptiveStats {
    std::string asset_id;
    double mean = 0.0;
    double std_dev = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Reads a wide CSV `date,<ticker>,...`. Empty cells and the literal `NaN`
/// become missing values. Rows are returned sorted by date.
///
/// Throws ParseError for malformed dates, non-numeric cells, duplicate dates,
/// or a missing/invalid header, and IoError if the file cannot be opened.
std::vector<PriceSeries> load_price_csv(const std::filesystem::path& path);

/// Same as load_price_csv() but from in-memory text; `source` names the input
/// in error messages.
std::vector<PriceSeries> parse_price_csv(std::string_view text, std::string_view source = "<memory>");

/// Writes series sharing one date index back in the load_price_csv() format.
void write_price_csv(const std::filesystem::path& path, std::span<const PriceSeries> panel);

/// Keeps only observations with start <= date <= end.
PriceSeries restrict_dates(const PriceSeries& series, Date start, Date end);

/// Fills gaps and removes price-level outliers:
///  1. interior gaps are linearly interpolated between the nearest valid points,
///  2. leading and trailing gaps take the nearest valid value,
///  3. points outside [Q1 - k*IQR, Q3 + k*IQR] of the filled series are
///     marked missing and refilled by steps 1-2.
/// Step 3 repeats until the filled series lies inside its own fences, which
/// makes the function idempotent. Most series need a single round.
/// Non-positive prices are treated as missing. Quartiles use linear
/// interpolation between order statistics.
///
/// Throws DataError if fewer than two valid observations remain.
PriceSeries clean_series(const PriceSeries& series, double iqr_multiplier = 1.5);

/// Restricts every series to the dates present in all of them.
/// Throws DataError listing per-asset ranges when fewer than two remain.
std::vector<PriceSeries> align_panel(std::span<const PriceSeries> panel);

/// r_t = ln(P_t / P_{t-1}) over the dates shared by every series.
/// Throws DataError when fewer than two common dates exist, or if a series
/// still holds missing values on a shared date.
ReturnMatrix log_returns(std::span<const PriceSeries> panel);

/// P_t / P_0.
std::vector<double> normalize_prices(const PriceSeries& series);

/// Mean, unbiased standard deviation, min and max of each return column.
std::vector<DescriptiveStats> descriptive_stats(const ReturnMatrix& matrix);

/// Linear-interpolated sample quantile (order statistics x_(1..n), position
/// 1 + q(n-1)). `sorted` must be ascending and non-empty.
double interpolated_quantile(std::span<const double> sorted, double q);

}  // namespace cascadenet
