/**
 * @file risk.hpp
 * @brief Empirical VaR/CVaR, loss CCDF, and Hill tail-index estimation.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cascadenet {

/// Smallest sample accepted by value_at_risk() and conditional_value_at_risk().
inline constexpr std::size_t kMinRiskSample = 20;

struct RiskMeasures {
    std::string asset_id;
    double alpha_level = 0.95;
    double var = 0.0;
    double cvar = 0.0;
};

/// Empirical lower quantile F^-1(1 - alpha_level) of the return sample: the
/// ceil((1 - alpha_level) * n)-th smallest observation.
double value_at_risk(std::span<const double> returns, double alpha_level);

/// Mean of every return at or below value_at_risk().
double conditional_value_at_risk(std::span<const double> returns, double alpha_level);

RiskMeasures risk_measures(std::string asset_id, std::span<const double> returns, double alpha_level);

/// 1-based rank of the VaR order statistic for a sample of size n.
std::size_t var_rank(std::size_t n, double alpha_level);

/// Loss magnitudes -r for every strictly negative return, in input order.
std::vector<double> loss_sample(std::span<const double> returns);

struct CcdfPoint {
    double loss = 0.0;
    double exceedance = 0.0;  // P(X >= loss)
};

struct CcdfCurve {
    std::string asset_id;
    std::vector<CcdfPoint> points;  // ascending in loss
};

/// Exceedance frequency #{x_i >= x} / n at each distinct loss value.
/// Throws DataError when the sample has fewer than two distinct values.
CcdfCurve empirical_ccdf(std::span<const double> losses);

/// Least-squares fit of log P(X >= x) on log x over the CCDF points whose
/// loss is at or above the given percentile of the sample.
struct PowerLawFit {
    double threshold = 0.0;   // loss cutoff
    double slope = 0.0;       // ~ -alpha for a Pareto tail
    double intercept = 0.0;
    std::size_t points = 0;
};
PowerLawFit fit_ccdf_tail(const CcdfCurve& curve, std::span<const double> losses, double percentile = 0.95);

/// Hill estimator of the Pareto tail index from the k largest losses:
///   alpha = 1 / ( (1/k) * sum_{i<=k} ln X_(i) - ln X_(k+1) ).
/// Requires 1 <= k < n and strictly positive losses; throws DomainError
/// otherwise, or when the top k+1 order statistics are all equal.
double hill_estimate(std::span<const double> losses, std::size_t k);

/// Default number of order statistics for a single Hill number: floor(0.05 n).
std::size_t default_hill_k(std::size_t n);

/// Spread limit of the stable Hill window.
inline constexpr double kStableSpread = 0.2;

struct HillPoint {
    std::size_t k = 0;
    double alpha_hat = 0.0;
};

struct HillPlot {
    std::vector<HillPoint> points;  // one per k in [k_min, k_max]
    // Longest run of consecutive k whose estimates stay within kStableSpread
    // of each other (earliest run wins ties). Indices into points, inclusive.
    std::size_t stable_first = 0;
    std::size_t stable_last = 0;
    double stable_mean = 0.0;
};

HillPlot hill_plot_data(std::span<const double> losses, std::size_t k_min, std::size_t k_max);

enum class TailClass { Heavy, Moderate };

/// Pareto index below which a tail counts as heavy.
inline constexpr double kHeavyTailAlpha = 3.0;

struct TailFit {
    std::string asset_id;
    double alpha_hat = 0.0;
    std::size_t k_used = 0;
    std::size_t n_losses = 0;
    TailClass tail_class = TailClass::Moderate;
    double threshold_percentile = 0.95;
};

TailClass classify_tail(double alpha_hat);
inline TailClass classify_tail(const TailFit& fit) { return classify_tail(fit.alpha_hat); }

std::string_view to_string(TailClass c);

/// Hill fit with k = default_hill_k(n). Returns nullopt when that k is zero
/// (fewer than 20 losses).
std::optional<TailFit> fit_tail(std::string asset_id, std::span<const double> losses);

}  // namespace cascadenet
