#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "drmine/matrix.hpp"

namespace drmine::cluster {

struct KmeansConfig {
    std::size_t k = 2;
    std::size_t max_iterations = 300;
    double tolerance = 1e-6;  // on the largest centroid displacement per iteration
    std::size_t restarts = 10;
    std::uint64_t seed = 42;
};

struct ClusteringResult {
    std::vector<std::size_t> assignments;
    Matrix centroids;
    double inertia = 0.0;  // sum of squared distances to assigned centroids
    std::size_t iterations_run = 0;
    // Inertia of the winning restart: entry 0 is the seeding, then one entry
    // per Lloyd iteration (each under nearest-centroid assignment).
    std::vector<double> inertia_trace;
    std::size_t restart = 0;
};

// Nearest centroid per point; ties go to the lowest centroid index.
std::vector<std::size_t> assign_nearest(const Matrix& points, const Matrix& centroids);
double inertia(const Matrix& points, std::span<const std::size_t> assignments, const Matrix& centroids);

// k-means++ seeding: first centroid uniform, the rest drawn with probability
// proportional to squared distance from the nearest chosen centroid.
Matrix kmeans_plus_plus(const Matrix& points, std::size_t k, std::uint64_t seed);

// Lloyd iterations from the given centroids. Empty clusters seize the point
// farthest from its own centroid.
ClusteringResult lloyd(const Matrix& points, Matrix centroids, std::size_t max_iterations, double tolerance);

// Best of config.restarts seeded runs by inertia (ties to the earliest restart).
// Restart r is seeded with derive_seed(config.seed, r).
ClusteringResult kmeans_fit(const Matrix& points, const KmeansConfig& config);

// Per-point silhouette s(i) = (b - a) / max(a, b) with Euclidean distances;
// singletons and 0/0 give 0. Cluster ids need not be contiguous.
std::vector<double> silhouette_samples(const Matrix& points, std::span<const std::size_t> assignments);
double silhouette_mean(const Matrix& points, std::span<const std::size_t> assignments);

struct SilhouetteReport {
    std::vector<std::pair<std::size_t, double>> scores;  // (k, mean silhouette)
    std::size_t best_k = 0;
};

// Seed used for candidate k; select_k and the final clustering share it.
std::uint64_t seed_for_k(std::uint64_t base_seed, std::size_t k);

// Sweeps k over [k_min, k_max], best_k maximizes the mean silhouette (ties to
// the smallest k). Requires 2 <= k_min <= k_max <= n - 1.
SilhouetteReport select_k(const Matrix& points, std::size_t k_min, std::size_t k_max,
                          const KmeansConfig& base_config);

// Chance-corrected agreement of two labelings of the same points.
double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace drmine::cluster
