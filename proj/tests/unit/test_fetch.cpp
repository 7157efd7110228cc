#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include <cascadenet/fetch.hpp>
#include <cascadenet/io.hpp>
#include <cascadenet/market_data.hpp>

using namespace cascadenet;

namespace {

// In-process quote server on an ephemeral loopback port.
class MockQuotes {
public:
    MockQuotes() {
        server_.Get(R"(/quotes/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string ticker = req.matches[1];
            ++hits_;
            if (ticker == "BROKEN") {
                res.status = 500;
                return;
            }
            if (ticker == "FLAKY" && hits_ < 2) {
                res.status = 503;
                return;
            }
            if (ticker == "DENIED") {
                res.status = 403;
                return;
            }
            if (ticker != "AAA" && ticker != "BBB.SA" && ticker != "FLAKY") {
                res.status = 404;
                return;
            }
            last_query_ = req.get_param_value("start") + "/" + req.get_param_value("end");
            std::string body = "Date,Open,High,Low,Close\n";
            const char* days[] = {"2024-01-01", "2024-01-02", "2024-01-03", "2024-01-04", "2024-01-05"};
            for (int i = 0; i < 5; ++i) {
                if (ticker == "BBB.SA" && i == 0) continue;
                body += std::string(days[i]) + ",9,9,";
                body += std::to_string(10 + i) + (ticker == "AAA" ? ".5" : ".25");
                body += ",9\n";
            }
            res.set_content(body, "text/csv");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~MockQuotes() {
        server_.stop();
        thread_.join();
    }

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/quotes"; }
    int hits() const { return hits_; }
    std::string last_query() const { return last_query_; }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> hits_{0};
    std::string last_query_;
};

FetchRequest request(const MockQuotes& mock, std::vector<std::string> tickers) {
    FetchRequest r;
    r.tickers = std::move(tickers);
    r.start = *Date::parse("2024-01-01");
    r.end = *Date::parse("2024-01-05");
    r.endpoint = mock.endpoint();
    r.retry_delay_ms = 1;
    r.timeout_seconds = 5;
    return r;
}

std::filesystem::path temp_csv(const char* name) {
    return std::filesystem::temp_directory_path() / "cascadenet_fetch_test" / name;
}

}  // namespace

TEST_CASE("fetch_prices writes one row per quote date") {
    MockQuotes mock;
    const auto out = temp_csv("one.csv");
    const auto result = fetch_prices(request(mock, {"AAA"}), out);
    CHECK(result.rows == 5);
    CHECK(result.fetched == std::vector<std::string>{"AAA"});
    CHECK(result.warnings.empty());
    CHECK(mock.last_query() == "2024-01-01/2024-01-05");
    CHECK(read_text_file(out) ==
          "date,AAA\n2024-01-01,10.5\n2024-01-02,11.5\n2024-01-03,12.5\n2024-01-04,13.5\n2024-01-05,14.5\n");
    const auto panel = load_price_csv(out);
    REQUIRE(panel.size() == 1);
    CHECK(panel[0].size() == 5);
}

TEST_CASE("fetch_prices outer-joins tickers and skips unknown ones") {
    MockQuotes mock;
    const auto out = temp_csv("two.csv");
    const auto result = fetch_prices(request(mock, {"AAA", "NOPE", "BBB.SA"}), out);
    CHECK(result.fetched == std::vector<std::string>{"AAA", "BBB.SA"});
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("NOPE") != std::string::npos);
    const std::string text = read_text_file(out);
    CHECK(text.rfind("date,AAA,BBB.SA\n2024-01-01,10.5,\n2024-01-02,11.5,11.25\n", 0) == 0);
}

TEST_CASE("fetch_prices with only unknown tickers writes a header-only file") {
    MockQuotes mock;
    const auto out = temp_csv("none.csv");
    const auto result = fetch_prices(request(mock, {"NOPE"}), out);
    CHECK(result.fetched.empty());
    CHECK(result.warnings.size() == 1);
    CHECK(read_text_file(out) == "date\n");
}

TEST_CASE("fetch_prices retries server errors") {
    MockQuotes mock;
    SUBCASE("persistent 500 exhausts the attempts") {
        try {
            fetch_prices(request(mock, {"BROKEN"}), temp_csv("broken.csv"));
            FAIL("expected HttpError");
        } catch (const HttpError& e) {
            CHECK(e.status() == 500);
            CHECK(e.retryable());
            CHECK(e.kind() == ErrorKind::Io);
        }
        CHECK(mock.hits() == 3);
    }
    SUBCASE("transient 503 recovers") {
        const auto result = fetch_prices(request(mock, {"FLAKY"}), temp_csv("flaky.csv"));
        CHECK(result.rows == 5);
        CHECK(mock.hits() == 2);
    }
    SUBCASE("client errors are not retried") {
        CHECK_THROWS_AS(fetch_prices(request(mock, {"DENIED"}), temp_csv("denied.csv")), HttpError);
        CHECK(mock.hits() == 1);
    }
}

TEST_CASE("fetch_prices connection failure and bad arguments") {
    FetchRequest r;
    r.tickers = {"AAA"};
    r.start = *Date::parse("2024-01-01");
    r.end = *Date::parse("2024-01-05");
    r.endpoint = "http://127.0.0.1:1/quotes";
    r.max_attempts = 2;
    r.retry_delay_ms = 1;
    r.timeout_seconds = 1;
    try {
        fetch_prices(r, temp_csv("refused.csv"));
        FAIL("expected HttpError");
    } catch (const HttpError& e) {
        CHECK(e.status() == 0);
        CHECK(e.retryable());
    }
    r.endpoint = "https://example.invalid";
    CHECK_THROWS_AS(fetch_prices(r, temp_csv("x.csv")), UsageError);
    r.endpoint = "http://127.0.0.1:1";
    r.tickers.clear();
    CHECK_THROWS_AS(fetch_prices(r, temp_csv("x.csv")), UsageError);
}
