/**
 * @file network.hpp
 * @brief Correlation and exposure networks over an asset panel.
 *
 * Exposure of i towards j is E_ij = rho_ij * sigma_i * P_i. Row i therefore
 * scales with asset i's volatility and price level; the matrix is asymmetric.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cascadenet/market_data.hpp"
#include "cascadenet/matrix.hpp"

namespace cascadenet {

struct CorrelationMatrix {
    std::vector<std::string> asset_ids;
    Matrix rho;
};

/// Unfiltered exposures; off-diagonal entries may be negative.
struct RawExposure {
    std::vector<std::string> asset_ids;
    Matrix weights;
    std::vector<double> reference_prices;
};

/// Filtered directed exposure network. weights(i, j) is 0 or >= theta and the
/// diagonal is 0.
struct ExposureNetwork {
    std::vector<std::string> asset_ids;
    double theta = 0.0;
    Matrix weights;
    std::vector<double> reference_prices;

    std::size_t size() const noexcept { return asset_ids.size(); }
    ExposureNetwork transposed() const;
};

/// Undirected graph keeping rho_ij >= theta, weighted by rho. Zero diagonal.
struct CorrelationNetwork {
    std::vector<std::string> asset_ids;
    double theta = 0.0;
    Matrix weights;

    std::size_t size() const noexcept { return asset_ids.size(); }
};

struct TopologyStats {
    std::string asset_id;
    double clustering = 0.0;
    std::size_t degree = 0;
    std::size_t triangles = 0;
};

enum class ReferencePriceMode { Mean, First, Last };

/// Pearson correlation with the T-1 sample covariance. Throws DataError naming
/// the first asset with zero variance, or when fewer than two observations exist.
CorrelationMatrix correlation_matrix(const ReturnMatrix& matrix);

/// Per-asset sample standard deviation (T-1 divisor). Same errors as
/// correlation_matrix().
std::vector<double> volatilities(const ReturnMatrix& matrix);

/// One price per series, chosen by `mode`.
std::vector<double> reference_prices(std::span<const PriceSeries> panel, ReferencePriceMode mode);

/// E_ij = rho_ij * sigma_i * P_i off the diagonal, E_ii = 0.
RawExposure exposure_matrix(const CorrelationMatrix& rho, std::span<const double> sigma,
                            std::span<const double> prices);

/// Keeps E_ij >= theta, zeroes everything else (negative exposures included).
ExposureNetwork threshold_filter(const RawExposure& exposure, double theta);

CorrelationNetwork correlation_network(const CorrelationMatrix& rho, double theta);

/// Local clustering C_i = 2 T_i / (k_i (k_i - 1)) on the undirected support of
/// `weights`: i and j are adjacent iff weights(i, j) > 0 or weights(j, i) > 0.
std::vector<TopologyStats> clustering_coefficients(const Matrix& weights,
                                                   std::span<const std::string> asset_ids);
std::vector<TopologyStats> clustering_coefficients(const ExposureNetwork& net);
std::vector<TopologyStats> clustering_coefficients(const CorrelationNetwork& net);

/// Clustering recomputed after deleting every node with removed[i] != 0.
/// Removed nodes report zero degree and clustering.
std::vector<TopologyStats> clustering_without(const Matrix& weights, std::span<const std::string> asset_ids,
                                              std::span<const std::uint8_t> removed);

/// D_i = sum_j weights(j, i), the total exposure directed at asset i.
std::vector<double> incoming_exposure(const ExposureNetwork& net);

/// Exchange suffix used to group tickers: "SA" for PETR4.SA, "US" when the
/// ticker has no suffix.
std::string market_group(std::string_view ticker);

struct GraphCsv {
    std::string nodes;
    std::string edges;
};

/// Node table `asset,clustering,degree,market_group` and edge table
/// `src,dst,weight`, both sorted by ticker. Directed graphs list every
/// non-zero entry; undirected graphs list each edge once with src < dst.
GraphCsv graph_csv(const Matrix& weights, std::span<const std::string> asset_ids,
                   std::span<const TopologyStats> stats, bool directed);

/// graph_csv() written to disk. Node file `asset,clustering,degree,market_group` and edge file
/// `src,dst,weight`, both sorted by ticker. Directed graphs emit every
/// non-zero entry; undirected graphs emit each edge once with src < dst.
void export_graph(const Matrix& weights, std::span<const std::string> asset_ids,
                  std::span<const TopologyStats> stats, bool directed,
                  const std::filesystem::path& node_file, const std::filesystem::path& edge_file);
void export_graph(const ExposureNetwork& net, std::span<const TopologyStats> stats,
                  const std::filesystem::path& node_file, const std::filesystem::path& edge_file);
void export_graph(const CorrelationNetwork& net, std::span<const TopologyStats> stats,
                  const std::filesystem::path& node_file, const std::filesystem::path& edge_file);

/// Square CSV with a ticker header row and column.
std::string adjacency_csv(const Matrix& weights, std::span<const std::string> asset_ids);
void export_adjacency(const Matrix& weights, std::span<const std::string> asset_ids,
                      const std::filesystem::path& file);

}  // namespace cascadenet
