#include "cascadenet/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "cascadenet/error.hpp"
#include "cascadenet/io.hpp"

namespace cascadenet {
namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.emplace_back(trim(cur));
    return fields;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

bool is_valid_price(double p) { return std::isfinite(p) && p > 0.0; }

// Linear interpolation across interior gaps, nearest-value fill at both ends.
// `keep[i]` selects the anchors; at least one anchor must exist.
std::vector<double> fill_gaps(std::span<const double> values, const std::vector<bool>& keep) {
    const std::size_t n = values.size();
    std::vector<double> out(n, kMissing);
    std::vector<std::size_t> anchors;
    for (std::size_t i = 0; i < n; ++i)
        if (keep[i]) anchors.push_back(i);
    for (std::size_t a : anchors) out[a] = values[a];
    for (std::size_t i = 0; i < anchors.front(); ++i) out[i] = values[anchors.front()];
    for (std::size_t i = anchors.back() + 1; i < n; ++i) out[i] = values[anchors.back()];
    for (std::size_t a = 0; a + 1 < anchors.size(); ++a) {
        const std::size_t lo = anchors[a], hi = anchors[a + 1];
        const double span = static_cast<double>(hi - lo);
        for (std::size_t i = lo + 1; i < hi; ++i) {
            const double w = static_cast<double>(i - lo) / span;
            const double v = values[lo] + w * (values[hi] - values[lo]);
            out[i] = std::clamp(v, std::min(values[lo], values[hi]), std::max(values[lo], values[hi]));
        }
    }
    return out;
}

}  // namespace

std::size_t PriceSeries::missing_count() const {
    return static_cast<std::size_t>(std::count_if(prices.begin(), prices.end(), [](double p) { return std::isnan(p); }));
}

std::vector<PriceSeries> parse_price_csv(std::string_view text, std::string_view source) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;  // (1-based line number, content)
    {
        std::size_t line_no = 0, pos = 0;
        while (pos <= text.size()) {
            std::size_t end = text.find('\n', pos);
            if (end == std::string_view::npos) end = text.size();
            ++line_no;
            std::string_view line = trim(text.substr(pos, end - pos));
            if (!line.empty()) lines.emplace_back(line_no, line);
            pos = end + 1;
        }
    }
    const std::string src(source);
    if (lines.empty()) throw ParseError(src + ": empty CSV, expected header `date,<ticker>,...`", 1);

    std::vector<std::string> header = split_csv_line(lines.front().second);
    if (!header.front().empty() && header.front().front() == '\xEF' && header.front().size() >= 3)
        header.front().erase(0, 3);  // UTF-8 BOM
    if (header.size() < 2 || !iequals(header.front(), "date"))
        throw ParseError(src + ": header must be `date,<ticker>,...`", lines.front().first);
    std::set<std::string> seen;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c].empty()) throw ParseError(src + ": empty ticker name in header", lines.front().first);
        if (!seen.insert(header[c]).second)
            throw ParseError(src + ": duplicate ticker '" + header[c] + "' in header", lines.front().first,
                             header[c]);
    }
    if (lines.size() < 2) throw ParseError(src + ": no data rows", lines.front().first);

    const std::size_t n_assets = header.size() - 1;
    struct Row {
        std::size_t line;
        Date date;
        std::vector<double> prices;
    };
    std::vector<Row> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t l = 1; l < lines.size(); ++l) {
        const auto [line_no, line] = lines[l];
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            std::ostringstream msg;
            msg << src << ": row " << line_no << " has " << fields.size() << " fields, expected " << header.size();
            throw ParseError(msg.str(), line_no);
        }
        auto date = Date::parse(fields.front());
        if (!date) {
            std::ostringstream msg;
            msg << src << ": row " << line_no << ": malformed date '" << fields.front() << "'";
            throw ParseError(msg.str(), line_no, header.front());
        }
        Row row{line_no, *date, std::vector<double>(n_assets, kMissing)};
        for (std::size_t c = 1; c < fields.size(); ++c) {
            const std::string& cell = fields[c];
            if (cell.empty() || iequals(cell, "nan")) continue;
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                std::ostringstream msg;
                msg << src << ": row " << line_no << ", column '" << header[c] << "': non-numeric price '" << cell
                    << "'";
                throw ParseError(msg.str(), line_no, header[c]);
            }
            row.prices[c - 1] = v;
        }
        rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].date == rows[r - 1].date) {
            const std::size_t later = std::max(rows[r].line, rows[r - 1].line);
            std::ostringstream msg;
            msg << src << ": row " << later << ": duplicate date " << rows[r].date.iso();
            throw ParseError(msg.str(), later, header.front());
        }
    }

    std::vector<PriceSeries> panel(n_assets);
    for (std::size_t a = 0; a < n_assets; ++a) {
        panel[a].asset_id = header[a + 1];
        panel[a].dates.reserve(rows.size());
        panel[a].prices.reserve(rows.size());
        for (const Row& row : rows) {
            panel[a].dates.push_back(row.date);
            panel[a].prices.push_back(row.prices[a]);
        }
    }
    return panel;
}

std::vector<PriceSeries> load_price_csv(const std::filesystem::path& path) {
    return parse_price_csv(read_text_file(path), path.string());
}

void write_price_csv(const std::filesystem::path& path, std::span<const PriceSeries> panel) {
    std::ostringstream out;
    out << "date";
    for (const auto& s : panel) out << ',' << csv_field(s.asset_id);
    out << '\n';
    if (!panel.empty()) {
        for (std::size_t t = 0; t < panel.front().size(); ++t) {
            out << panel.front().dates[t].iso();
            for (const auto& s : panel) {
                if (s.dates.size() != panel.front().dates.size() || s.dates[t] != panel.front().dates[t])
                    throw ShapeError("write_price_csv: series do not share one date index");
                out << ',';
                if (!std::isnan(s.prices[t])) out << format_full(s.prices[t]);
            }
            out << '\n';
        }
    }
    write_text_file(path, out.str());
}

PriceSeries restrict_dates(const PriceSeries& series, Date start, Date end) {
    PriceSeries out{series.asset_id, {}, {}};
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.dates[i] < start || end < series.dates[i]) continue;
        out.dates.push_back(series.dates[i]);
        out.prices.push_back(series.prices[i]);
    }
    return out;
}

double interpolated_quantile(std::span<const double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

PriceSeries clean_series(const PriceSeries& series, double iqr_multiplier) {
    const std::size_t n = series.size();
    std::vector<bool> keep(n);
    std::size_t anchors = 0;
    for (std::size_t i = 0; i < n; ++i) {
        keep[i] = is_valid_price(series.prices[i]);
        anchors += keep[i];
    }
    if (anchors < 2) throw DataError("series '" + series.asset_id + "' has fewer than 2 valid observations");

    // Fences come from the filled series. Dropping an outlier and refilling
    // moves the quartiles, so repeat until the filled series lies inside its
    // own fences; a second call then finds nothing to change.
    std::vector<double> filled = fill_gaps(series.prices, keep);
    std::vector<double> sorted(n);
    for (;;) {
        std::partial_sort_copy(filled.begin(), filled.end(), sorted.begin(), sorted.end());
        const double q1 = interpolated_quantile(sorted, 0.25);
        const double q3 = interpolated_quantile(sorted, 0.75);
        const double lo = q1 - iqr_multiplier * (q3 - q1);
        const double hi = q3 + iqr_multiplier * (q3 - q1);
        bool dropped = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (filled[i] >= lo && filled[i] <= hi) continue;
            // A filled value lies between its two anchors, so it can only
            // leave the fences if one of those anchors does.
            if (keep[i]) {
                keep[i] = false;
                --anchors;
                dropped = true;
            }
        }
        if (!dropped) break;
        if (anchors == 0)
            throw DataError("series '" + series.asset_id + "' has no observation inside the IQR fences");
        filled = fill_gaps(series.prices, keep);
    }
    return PriceSeries{series.asset_id, series.dates, std::move(filled)};
}

std::vector<PriceSeries> align_panel(std::span<const PriceSeries> panel) {
    if (panel.empty()) throw DataError("empty price panel");

    std::vector<Date> common = panel.front().dates;
    for (std::size_t a = 1; a < panel.size(); ++a) {
        std::vector<Date> next;
        std::set_intersection(common.begin(), common.end(), panel[a].dates.begin(), panel[a].dates.end(),
                              std::back_inserter(next));
        common = std::move(next);
    }
    if (common.size() < 2) {
        std::ostringstream msg;
        msg << "date alignment left " << common.size() << " common dates (need 2); per-asset ranges:";
        for (const auto& s : panel) {
            msg << ' ' << s.asset_id << '[';
            if (s.dates.empty())
                msg << "empty";
            else
                msg << s.dates.front().iso() << ".." << s.dates.back().iso();
            msg << ']';
        }
        throw DataError(msg.str());
    }

    std::vector<PriceSeries> out;
    out.reserve(panel.size());
    for (const PriceSeries& s : panel) {
        PriceSeries aligned{s.asset_id, common, std::vector<double>(common.size())};
        std::size_t cursor = 0;
        for (std::size_t t = 0; t < common.size(); ++t) {
            while (s.dates[cursor] < common[t]) ++cursor;
            aligned.prices[t] = s.prices[cursor];
        }
        out.push_back(std::move(aligned));
    }
    return out;
}

ReturnMatrix log_returns(std::span<const PriceSeries> panel) {
    const std::vector<PriceSeries> aligned = align_panel(panel);
    const std::vector<Date>& dates = aligned.front().dates;

    ReturnMatrix out;
    out.dates.assign(dates.begin() + 1, dates.end());
    out.returns = Matrix(dates.size() - 1, aligned.size());
    for (std::size_t a = 0; a < aligned.size(); ++a) {
        const PriceSeries& s = aligned[a];
        out.asset_ids.push_back(s.asset_id);
        for (std::size_t t = 0; t < dates.size(); ++t) {
            if (!is_valid_price(s.prices[t]))
                throw DataError("series '" + s.asset_id + "' has a missing or non-positive price on " +
                                dates[t].iso() + "; clean it first");
            if (t > 0) out.returns(t - 1, a) = std::log(s.prices[t] / s.prices[t - 1]);
        }
    }
    return out;
}

std::vector<double> normalize_prices(const PriceSeries& series) {
    if (series.prices.empty() || !(series.prices.front() > 0.0))
        throw DataError("normalize_prices: series '" + series.asset_id + "' needs a positive first price");
    std::vector<double> out(series.size());
    const double base = series.prices.front();
    for (std::size_t i = 0; i < series.size(); ++i) out[i] = series.prices[i] / base;
    out.front() = 1.0;
    return out;
}

std::vector<DescriptiveStats> descriptive_stats(const ReturnMatrix& matrix) {
    const std::size_t t_obs = matrix.observations();
    if (t_obs < 2) throw DataError("descriptive_stats: need at least 2 return observations");
    std::vector<DescriptiveStats> out;
    out.reserve(matrix.assets());
    for (std::size_t a = 0; a < matrix.assets(); ++a) {
        const std::vector<double> col = matrix.asset_returns(a);
        DescriptiveStats s;
        s.asset_id = matrix.asset_ids[a];
        s.mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(t_obs);
        double ss = 0.0;
        for (double r : col) ss += (r - s.mean) * (r - s.mean);
        s.std_dev = std::sqrt(ss / static_cast<double>(t_obs - 1));
        auto [mn, mx] = std::minmax_element(col.begin(), col.end());
        s.min = *mn;
        s.max = *mx;
        s.mean = std::clamp(s.mean, s.min, s.max);  // rounding on constant columns
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace cascadenet
