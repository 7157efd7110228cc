#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace cascadenet {

/// Calendar day. Ordered, hashable through days_since_epoch().
class Date {
public:
    Date() = default;
    explicit Date(std::chrono::year_month_day ymd) : days_(std::chrono::sys_days{ymd}) {}

    /// Strict ISO-8601 `YYYY-MM-DD`. Returns nullopt for malformed or
    /// non-existent dates such as 2020-13-01 or 2021-02-29.
    static std::optional<Date> parse(std::string_view text);

    std::string iso() const;
    long days_since_epoch() const noexcept { return days_.time_since_epoch().count(); }

    friend auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace cascadenet
