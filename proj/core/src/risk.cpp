#include "cascadenet/risk.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "cascadenet/error.hpp"
#include "cascadenet/market_data.hpp"

namespace cascadenet {
namespace {

void check_risk_inputs(std::span<const double> returns, double alpha_level) {
    if (returns.size() < kMinRiskSample) {
        std::ostringstream msg;
        msg << "VaR/CVaR need at least " << kMinRiskSample << " observations, got " << returns.size();
        throw DataError(msg.str());
    }
    if (!(alpha_level > 0.0 && alpha_level < 1.0))
        throw DomainError("confidence level must lie in (0, 1)");
    for (double r : returns)
        if (!std::isfinite(r)) throw DataError("VaR/CVaR: non-finite return in sample");
}

// Descending copy of the losses after validating positivity.
std::vector<double> sorted_descending(std::span<const double> losses) {
    std::vector<double> x(losses.begin(), losses.end());
    for (double v : x)
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("Hill estimator needs strictly positive finite losses");
    std::sort(x.begin(), x.end(), std::greater<>());
    return x;
}

double hill_from_log_sum(double top_log_sum, std::size_t k, const std::vector<double>& desc) {
    if (desc.front() == desc[k]) throw DomainError("Hill estimator: top order statistics are all equal");
    const double mean_spacing = top_log_sum / static_cast<double>(k) - std::log(desc[k]);
    if (!(mean_spacing > 0.0)) throw DomainError("Hill estimator: non-positive mean log spacing");
    return 1.0 / mean_spacing;
}

}  // namespace

std::size_t var_rank(std::size_t n, double alpha_level) {
    // The slack absorbs representation error in 1 - alpha (1 - 0.95 is
    // 0.05000000000000004, which would otherwise push 0.05 * 100 to rank 6).
    const double target = (1.0 - alpha_level) * static_cast<double>(n) - 1e-9;
    const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(target)));
    return std::min(rank, n);
}

double value_at_risk(std::span<const double> returns, double alpha_level) {
    check_risk_inputs(returns, alpha_level);
    std::vector<double> x(returns.begin(), returns.end());
    const std::size_t idx = var_rank(x.size(), alpha_level) - 1;
    std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(idx), x.end());
    return x[idx];
}

double conditional_value_at_risk(std::span<const double> returns, double alpha_level) {
    const double var = value_at_risk(returns, alpha_level);
    double sum = 0.0;
    std::size_t count = 0;
    for (double r : returns) {
        if (r <= var) {
            sum += r;
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

RiskMeasures risk_measures(std::string asset_id, std::span<const double> returns, double alpha_level) {
    return {std::move(asset_id), alpha_level, value_at_risk(returns, alpha_level),
            conditional_value_at_risk(returns, alpha_level)};
}

std::vector<double> loss_sample(std::span<const double> returns) {
    std::vector<double> out;
    for (double r : returns)
        if (r < 0.0) out.push_back(-r);
    return out;
}

CcdfCurve empirical_ccdf(std::span<const double> losses) {
    std::vector<double> x(losses.begin(), losses.end());
    for (double v : x)
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("CCDF needs strictly positive finite losses");
    std::sort(x.begin(), x.end());
    CcdfCurve curve;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i > 0 && x[i] == x[i - 1]) continue;
        curve.points.push_back({x[i], static_cast<double>(x.size() - i) / n});
    }
    if (curve.points.size() < 2) throw DataError("CCDF is degenerate: fewer than 2 distinct loss values");
    return curve;
}

PowerLawFit fit_ccdf_tail(const CcdfCurve& curve, std::span<const double> losses, double percentile) {
    std::vector<double> sorted(losses.begin(), losses.end());
    if (sorted.empty()) throw DataError("power-law fit: empty loss sample");
    std::sort(sorted.begin(), sorted.end());
    PowerLawFit fit;
    fit.threshold = interpolated_quantile(sorted, percentile);

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const CcdfPoint& p : curve.points) {
        if (p.loss < fit.threshold) continue;
        const double lx = std::log(p.loss), ly = std::log(p.exceedance);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++fit.points;
    }
    if (fit.points < 2) throw DataError("power-law fit: fewer than 2 CCDF points above the threshold");
    const double m = static_cast<double>(fit.points);
    const double denom = m * sxx - sx * sx;
    if (!(denom > 0.0)) throw DataError("power-law fit: tail points share one loss value");
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    return fit;
}

double hill_estimate(std::span<const double> losses, std::size_t k) {
    if (k < 1 || k >= losses.size()) {
        std::ostringstream msg;
        msg << "Hill estimator: k = " << k << " outside [1, " << losses.size() << ")";
        throw DomainError(msg.str());
    }
    const std::vector<double> desc = sorted_descending(losses);
    double log_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) log_sum += std::log(desc[i]);
    return hill_from_log_sum(log_sum, k, desc);
}

std::size_t default_hill_k(std::size_t n) { return n / 20; }

HillPlot hill_plot_data(std::span<const double> losses, std::size_t k_min, std::size_t k_max) {
    if (k_min < 1 || k_min >= k_max || k_max >= losses.size()) {
        std::ostringstream msg;
        msg << "Hill plot: need 1 <= k_min < k_max < n, got k_min = " << k_min << ", k_max = " << k_max
            << ", n = " << losses.size();
        throw DomainError(msg.str());
    }
    const std::vector<double> desc = sorted_descending(losses);

    HillPlot plot;
    plot.points.reserve(k_max - k_min + 1);
    double log_sum = 0.0;
    for (std::size_t k = 1; k <= k_max; ++k) {
        log_sum += std::log(desc[k - 1]);  // same accumulation order as hill_estimate
        if (k >= k_min) plot.points.push_back({k, hill_from_log_sum(log_sum, k, desc)});
    }

    // Longest window with max - min <= kStableSpread, via monotone deques.
    std::deque<std::size_t> lo_q, hi_q;
    std::size_t left = 0, best_len = 0;
    for (std::size_t right = 0; right < plot.points.size(); ++right) {
        const double a = plot.points[right].alpha_hat;
        while (!lo_q.empty() && plot.points[lo_q.back()].alpha_hat >= a) lo_q.pop_back();
        while (!hi_q.empty() && plot.points[hi_q.back()].alpha_hat <= a) hi_q.pop_back();
        lo_q.push_back(right);
        hi_q.push_back(right);
        while (plot.points[hi_q.front()].alpha_hat - plot.points[lo_q.front()].alpha_hat > kStableSpread) {
            ++left;
            if (lo_q.front() < left) lo_q.pop_front();
            if (hi_q.front() < left) hi_q.pop_front();
        }
        if (right - left + 1 > best_len) {
            best_len = right - left + 1;
            plot.stable_first = left;
            plot.stable_last = right;
        }
    }
    double sum = 0.0;
    for (std::size_t i = plot.stable_first; i <= plot.stable_last; ++i) sum += plot.points[i].alpha_hat;
    plot.stable_mean = sum / static_cast<double>(best_len);
    return plot;
}

TailClass classify_tail(double alpha_hat) { return alpha_hat < kHeavyTailAlpha ? TailClass::Heavy : TailClass::Moderate; }

std::string_view to_string(TailClass c) { return c == TailClass::Heavy ? "Heavy" : "Moderate"; }

std::optional<TailFit> fit_tail(std::string asset_id, std::span<const double> losses) {
    const std::size_t k = default_hill_k(losses.size());
    if (k == 0) return std::nullopt;
    TailFit fit;
    fit.asset_id = std::move(asset_id);
    fit.alpha_hat = hill_estimate(losses, k);
    fit.k_used = k;
    fit.n_losses = losses.size();
    fit.tail_class = classify_tail(fit.alpha_hat);
    fit.threshold_percentile = 0.95;
    return fit;
}

}  // namespace cascadenet
