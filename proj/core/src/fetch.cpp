#include "cascadenet/fetch.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "cascadenet/io.hpp"

namespace cascadenet {
namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path without trailing slash
};

Endpoint split_endpoint(const std::string& url) {
    const std::string scheme = "http://";
    if (url.compare(0, scheme.size(), scheme) != 0)
        throw UsageError("fetch endpoint must be a plain http:// URL, got '" + url + "'");
    const auto slash = url.find('/', scheme.size());
    Endpoint ep;
    ep.origin = url.substr(0, slash);
    ep.prefix = slash == std::string::npos ? "" : url.substr(slash);
    while (!ep.prefix.empty() && ep.prefix.back() == '/') ep.prefix.pop_back();
    return ep;
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (;;) {
        const auto comma = line.find(',', pos);
        std::string_view f = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        while (!f.empty() && (f.front() == ' ' || f.front() == '"')) f.remove_prefix(1);
        while (!f.empty() && (f.back() == ' ' || f.back() == '"' || f.back() == '\r')) f.remove_suffix(1);
        out.emplace_back(f);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Date -> low price from a quote CSV body.
std::map<Date, double> parse_quotes(const std::string& ticker, const std::string& body, Date start, Date end) {
    std::istringstream in(body);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty quote response for '" + ticker + "'");
    const auto header = split_fields(line);
    std::size_t date_col = header.size(), price_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string h = lower(header[c]);
        if (h == "date") date_col = c;
        if (h == "low") price_col = c;
    }
    if (price_col == header.size() && header.size() == 2) price_col = date_col == 0 ? 1 : 0;
    if (date_col == header.size() || price_col == header.size())
        throw DataError("quote response for '" + ticker + "' lacks Date/Low columns");

    std::map<Date, double> quotes;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line);
        if (fields.size() <= std::max(date_col, price_col)) continue;
        const auto date = Date::parse(fields[date_col]);
        if (!date) throw DataError("quote response for '" + ticker + "' has malformed date '" + fields[date_col] + "'");
        if (*date < start || end < *date) continue;
        const std::string& cell = fields[price_col];
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) continue;  // "null" etc.
        quotes[*date] = v;
    }
    return quotes;
}

}  // namespace

FetchResult fetch_prices(const FetchRequest& request, const std::filesystem::path& output) {
    if (request.tickers.empty()) throw UsageError("fetch: no tickers requested");
    if (!(request.start < request.end)) throw UsageError("fetch: start date must precede end date");
    const Endpoint ep = split_endpoint(request.endpoint);

    httplib::Client client(ep.origin);
    client.set_connection_timeout(request.timeout_seconds, 0);
    client.set_read_timeout(request.timeout_seconds, 0);

    FetchResult result;
    std::vector<std::map<Date, double>> columns;
    const std::size_t attempts = std::max<std::size_t>(1, request.max_attempts);
    for (const std::string& ticker : request.tickers) {
        const std::string path = ep.prefix + "/" + httplib::detail::encode_url(ticker) +
                                 "?start=" + request.start.iso() + "&end=" + request.end.iso();
        for (std::size_t attempt = 1;; ++attempt) {
            auto res = client.Get(path);
            const int status = res ? res->status : 0;
            if (res && status == 200) {
                columns.push_back(parse_quotes(ticker, res->body, request.start, request.end));
                result.fetched.push_back(ticker);
                break;
            }
            if (res && status == 404) {
                result.warnings.push_back("ticker '" + ticker + "' not found (HTTP 404); column omitted");
                break;
            }
            const bool retryable = !res || status >= 500 || status == 429;
            if (!retryable || attempt >= attempts) {
                std::ostringstream msg;
                msg << "fetch '" << ticker << "' failed after " << attempt << " attempt(s): ";
                if (res)
                    msg << "HTTP " << status;
                else
                    msg << httplib::to_string(res.error());
                throw HttpError(msg.str(), status, retryable);
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(request.retry_delay_ms * static_cast<int>(attempt)));
        }
    }

    std::map<Date, std::vector<double>> rows;
    for (std::size_t c = 0; c < columns.size(); ++c)
        for (const auto& [date, price] : columns[c]) {
            auto& row = rows[date];
            row.resize(columns.size(), std::nan(""));
            row[c] = price;
        }

    std::ostringstream out;
    out << "date";
    for (const auto& t : result.fetched) out << ',' << csv_field(t);
    out << '\n';
    for (const auto& [date, prices] : rows) {
        out << date.iso();
        for (double p : prices) {
            out << ',';
            if (!std::isnan(p)) out << format_full(p);
        }
        out << '\n';
    }
    write_text_file(output, out.str());
    result.rows = rows.size();
    return result;
}

}  // namespace cascadenet
