/**
 * @file fetch.hpp
 * @brief Minimal historical-quote client that produces load_price_csv() input.
 *
 * For each ticker the client issues `GET <endpoint>/<ticker>?start=YYYY-MM-DD&end=YYYY-MM-DD`
 * and expects a CSV with a `Date` column and either a `Low` column or a single
 * price column. Only plain http endpoints are supported.
 */
#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "cascadenet/date.hpp"
#include "cascadenet/error.hpp"

namespace cascadenet {

class HttpError : public Error {
public:
    HttpError(const std::string& what, int status, bool retryable)
        : Error(ErrorKind::Io, what), status_(status), retryable_(retryable) {}

    int status() const noexcept { return status_; }  // 0 for connection failures
    bool retryable() const noexcept { return retryable_; }

private:
    int status_;
    bool retryable_;
};

struct FetchRequest {
    std::vector<std::string> tickers;
    Date start;
    Date end;
    std::string endpoint;  // e.g. http://127.0.0.1:8080/quotes
    std::size_t max_attempts = 3;
    int retry_delay_ms = 200;  // multiplied by the attempt number
    int timeout_seconds = 30;
};

struct FetchResult {
    std::vector<std::string> fetched;   // tickers written to the CSV
    std::vector<std::string> warnings;  // one per skipped ticker
    std::size_t rows = 0;
};

/// Downloads every ticker and writes a wide CSV (outer join on date, blank
/// cells where a ticker has no quote). Unknown tickers (HTTP 404) are skipped
/// with a warning. Server errors and connection failures are retried up to
/// max_attempts times, then raised as HttpError.
FetchResult fetch_prices(const FetchRequest& request, const std::filesystem::path& output);

}  // namespace cascadenet
