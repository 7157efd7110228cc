#include "cascadenet/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

#include "cascadenet/error.hpp"
#include "cascadenet/io.hpp"

namespace cascadenet {
namespace {

// Sample covariance matrix (T-1 divisor) of the return columns.
Matrix sample_covariance(const ReturnMatrix& matrix) {
    const std::size_t t_obs = matrix.observations(), n = matrix.assets();
    if (t_obs < 2) throw DataError("need at least 2 return observations for covariance");
    std::vector<double> mean(n, 0.0);
    for (std::size_t t = 0; t < t_obs; ++t)
        for (std::size_t a = 0; a < n; ++a) mean[a] += matrix.returns(t, a);
    for (double& m : mean) m /= static_cast<double>(t_obs);

    Matrix cov(n, n);
    for (std::size_t t = 0; t < t_obs; ++t) {
        const auto row = matrix.returns.row(t);
        for (std::size_t i = 0; i < n; ++i) {
            const double di = row[i] - mean[i];
            for (std::size_t j = i; j < n; ++j) cov(i, j) += di * (row[j] - mean[j]);
        }
    }
    const double denom = static_cast<double>(t_obs - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            cov(i, j) /= denom;
            cov(j, i) = cov(i, j);
        }
        if (!(cov(i, i) > 0.0)) throw DataError("asset '" + matrix.asset_ids[i] + "' has zero return variance");
    }
    return cov;
}

std::vector<std::vector<bool>> undirected_support(const Matrix& w, std::span<const std::uint8_t> removed) {
    const std::size_t n = w.rows();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        if (!removed.empty() && removed[i]) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!removed.empty() && removed[j]) continue;
            if (w(i, j) > 0.0 || w(j, i) > 0.0) adj[i][j] = adj[j][i] = true;
        }
    }
    return adj;
}

std::vector<TopologyStats> clustering_on(const std::vector<std::vector<bool>>& adj,
                                         std::span<const std::string> asset_ids) {
    const std::size_t n = adj.size();
    std::vector<TopologyStats> out(n);
    std::vector<std::size_t> nbrs;
    for (std::size_t i = 0; i < n; ++i) {
        nbrs.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (adj[i][j]) nbrs.push_back(j);
        std::size_t tri = 0;
        for (std::size_t a = 0; a < nbrs.size(); ++a)
            for (std::size_t b = a + 1; b < nbrs.size(); ++b)
                if (adj[nbrs[a]][nbrs[b]]) ++tri;
        const std::size_t k = nbrs.size();
        out[i].asset_id = asset_ids[i];
        out[i].degree = k;
        out[i].triangles = tri;
        out[i].clustering = k < 2 ? 0.0 : 2.0 * static_cast<double>(tri) / static_cast<double>(k * (k - 1));
    }
    return out;
}

void check_square(const Matrix& w, std::size_t n, const char* what) {
    if (w.rows() != n || w.cols() != n) {
        std::ostringstream msg;
        msg << what << ": expected " << n << "x" << n << " matrix, got " << w.rows() << "x" << w.cols();
        throw ShapeError(msg.str());
    }
}

std::vector<std::size_t> ticker_order(std::span<const std::string> ids) {
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    return order;
}

}  // namespace

ExposureNetwork ExposureNetwork::transposed() const {
    ExposureNetwork t = *this;
    t.weights = weights.transposed();
    return t;
}

CorrelationMatrix correlation_matrix(const ReturnMatrix& matrix) {
    const Matrix cov = sample_covariance(matrix);
    const std::size_t n = cov.rows();
    CorrelationMatrix out{matrix.asset_ids, Matrix(n, n)};
    for (std::size_t i = 0; i < n; ++i) {
        out.rho(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = std::clamp(cov(i, j) / std::sqrt(cov(i, i) * cov(j, j)), -1.0, 1.0);
            out.rho(i, j) = out.rho(j, i) = r;
        }
    }
    return out;
}

std::vector<double> volatilities(const ReturnMatrix& matrix) {
    const Matrix cov = sample_covariance(matrix);
    std::vector<double> sigma(cov.rows());
    for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = std::sqrt(cov(i, i));
    return sigma;
}

std::vector<double> reference_prices(std::span<const PriceSeries> panel, ReferencePriceMode mode) {
    std::vector<double> out;
    out.reserve(panel.size());
    for (const PriceSeries& s : panel) {
        if (s.prices.empty()) throw DataError("series '" + s.asset_id + "' is empty");
        double p = 0.0;
        switch (mode) {
            case ReferencePriceMode::First: p = s.prices.front(); break;
            case ReferencePriceMode::Last: p = s.prices.back(); break;
            case ReferencePriceMode::Mean:
                p = std::accumulate(s.prices.begin(), s.prices.end(), 0.0) / static_cast<double>(s.size());
                break;
        }
        if (!(p > 0.0) || !std::isfinite(p))
            throw DataError("series '" + s.asset_id + "' has no positive reference price");
        out.push_back(p);
    }
    return out;
}

RawExposure exposure_matrix(const CorrelationMatrix& rho, std::span<const double> sigma,
                            std::span<const double> prices) {
    const std::size_t n = rho.asset_ids.size();
    check_square(rho.rho, n, "exposure_matrix");
    if (sigma.size() != n || prices.size() != n) {
        std::ostringstream msg;
        msg << "exposure_matrix: " << n << " assets but " << sigma.size() << " volatilities and " << prices.size()
            << " prices";
        throw ShapeError(msg.str());
    }
    for (double p : prices)
        if (!(p > 0.0)) throw DomainError("exposure_matrix: reference prices must be positive");

    RawExposure out{rho.asset_ids, Matrix(n, n), {prices.begin(), prices.end()}};
    for (std::size_t i = 0; i < n; ++i) {
        const double scale = sigma[i] * prices[i];
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) out.weights(i, j) = rho.rho(i, j) * scale;
    }
    return out;
}

namespace {

void check_theta(double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("network threshold theta must be positive and finite");
}

}  // namespace

ExposureNetwork threshold_filter(const RawExposure& exposure, double theta) {
    const std::size_t n = exposure.asset_ids.size();
    check_square(exposure.weights, n, "threshold_filter");
    check_theta(theta);
    ExposureNetwork net{exposure.asset_ids, theta, Matrix(n, n), exposure.reference_prices};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && exposure.weights(i, j) >= theta) net.weights(i, j) = exposure.weights(i, j);
    return net;
}

CorrelationNetwork correlation_network(const CorrelationMatrix& rho, double theta) {
    const std::size_t n = rho.asset_ids.size();
    check_square(rho.rho, n, "correlation_network");
    check_theta(theta);
    CorrelationNetwork net{rho.asset_ids, theta, Matrix(n, n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && rho.rho(i, j) >= theta) net.weights(i, j) = rho.rho(i, j);
    return net;
}

std::vector<TopologyStats> clustering_coefficients(const Matrix& weights, std::span<const std::string> asset_ids) {
    check_square(weights, asset_ids.size(), "clustering_coefficients");
    return clustering_on(undirected_support(weights, {}), asset_ids);
}

std::vector<TopologyStats> clustering_coefficients(const ExposureNetwork& net) {
    return clustering_coefficients(net.weights, net.asset_ids);
}

std::vector<TopologyStats> clustering_coefficients(const CorrelationNetwork& net) {
    return clustering_coefficients(net.weights, net.asset_ids);
}

std::vector<TopologyStats> clustering_without(const Matrix& weights, std::span<const std::string> asset_ids,
                                              std::span<const std::uint8_t> removed) {
    check_square(weights, asset_ids.size(), "clustering_without");
    if (removed.size() != asset_ids.size()) throw ShapeError("clustering_without: removal mask size mismatch");
    return clustering_on(undirected_support(weights, removed), asset_ids);
}

std::vector<double> incoming_exposure(const ExposureNetwork& net) {
    const std::size_t n = net.size();
    std::vector<double> d(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) d[i] += net.weights(j, i);
    return d;
}

std::string market_group(std::string_view ticker) {
    const auto dot = ticker.rfind('.');
    if (dot == std::string_view::npos || dot + 1 == ticker.size()) return "US";
    return std::string(ticker.substr(dot + 1));
}

GraphCsv graph_csv(const Matrix& weights, std::span<const std::string> asset_ids,
                   std::span<const TopologyStats> stats, bool directed) {
    const std::size_t n = asset_ids.size();
    check_square(weights, n, "graph_csv");
    if (stats.size() != n) throw ShapeError("graph_csv: stats do not match the asset list");

    std::ostringstream nodes;
    nodes << "asset,clustering,degree,market_group\n";
    for (std::size_t i : ticker_order(asset_ids))
        nodes << csv_field(asset_ids[i]) << ',' << format_sig6(stats[i].clustering) << ',' << stats[i].degree << ','
              << market_group(asset_ids[i]) << '\n';

    std::vector<std::tuple<std::string, std::string, double>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (directed) {
                if (weights(i, j) > 0.0) edges.emplace_back(asset_ids[i], asset_ids[j], weights(i, j));
            } else if (asset_ids[i] < asset_ids[j] && (weights(i, j) > 0.0 || weights(j, i) > 0.0)) {
                edges.emplace_back(asset_ids[i], asset_ids[j], weights(i, j) > 0.0 ? weights(i, j) : weights(j, i));
            }
        }
    }
    std::sort(edges.begin(), edges.end());
    std::ostringstream edge_out;
    edge_out << "src,dst,weight\n";
    for (const auto& [src, dst, w] : edges)
        edge_out << csv_field(src) << ',' << csv_field(dst) << ',' << format_sig6(w) << '\n';
    return {nodes.str(), edge_out.str()};
}

void export_graph(const Matrix& weights, std::span<const std::string> asset_ids, std::span<const TopologyStats> stats,
                  bool directed, const std::filesystem::path& node_file, const std::filesystem::path& edge_file) {
    GraphCsv csv = graph_csv(weights, asset_ids, stats, directed);
    write_text_file(node_file, csv.nodes);
    write_text_file(edge_file, csv.edges);
}

void export_graph(const ExposureNetwork& net, std::span<const TopologyStats> stats,
                  const std::filesystem::path& node_file, const std::filesystem::path& edge_file) {
    export_graph(net.weights, net.asset_ids, stats, true, node_file, edge_file);
}

void export_graph(const CorrelationNetwork& net, std::span<const TopologyStats> stats,
                  const std::filesystem::path& node_file, const std::filesystem::path& edge_file) {
    export_graph(net.weights, net.asset_ids, stats, false, node_file, edge_file);
}

std::string adjacency_csv(const Matrix& weights, std::span<const std::string> asset_ids) {
    check_square(weights, asset_ids.size(), "adjacency_csv");
    std::ostringstream out;
    out << "asset";
    for (const auto& id : asset_ids) out << ',' << csv_field(id);
    out << '\n';
    for (std::size_t i = 0; i < asset_ids.size(); ++i) {
        out << csv_field(asset_ids[i]);
        for (std::size_t j = 0; j < asset_ids.size(); ++j) out << ',' << format_sig6(weights(i, j));
        out << '\n';
    }
    return out.str();
}

void export_adjacency(const Matrix& weights, std::span<const std::string> asset_ids,
                      const std::filesystem::path& file) {
    write_text_file(file, adjacency_csv(weights, asset_ids));
}

}  // namespace cascadenet
