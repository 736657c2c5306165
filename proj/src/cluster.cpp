#include "drmine/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "drmine/error.hpp"
#include "drmine/random.hpp"

namespace drmine::cluster {
namespace {

void check_finite(const Matrix& points) {
    for (const double v : points.values()) {
        if (!std::isfinite(v)) throw DataError("k-means: input contains non-finite values");
    }
}

Matrix centroid_means(const Matrix& points, std::span<const std::size_t> assignments, std::size_t k) {
    Matrix sums(k, points.cols());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const auto c = assignments[i];
        ++counts[c];
        const auto p = points.row(i);
        auto s = sums.row(c);
        for (std::size_t j = 0; j < p.size(); ++j) s[j] += p[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
        for (auto& v : sums.row(c)) v /= static_cast<double>(counts[c]);
    }
    return sums;
}

// Moves the point farthest from its centroid into each empty cluster.
void repair_empty(const Matrix& points, std::vector<std::size_t>& assignments, Matrix& centroids) {
    const std::size_t k = centroids.rows();
    std::vector<std::size_t> counts(k, 0);
    for (const auto c : assignments) ++counts[c];
    for (std::size_t empty = 0; empty < k; ++empty) {
        if (counts[empty] != 0) continue;
        std::size_t victim = points.rows();
        double farthest = -1.0;
        for (std::size_t i = 0; i < points.rows(); ++i) {
            if (counts[assignments[i]] < 2) continue;
            const double d = squared_distance(points.row(i), centroids.row(assignments[i]));
            if (d > farthest) {
                farthest = d;
                victim = i;
            }
        }
        if (victim == points.rows()) break;  // unreachable while k <= n
        --counts[assignments[victim]];
        assignments[victim] = empty;
        ++counts[empty];
        const auto p = points.row(victim);
        std::copy(p.begin(), p.end(), centroids.row(empty).begin());
    }
}

}  // namespace

std::vector<std::size_t> assign_nearest(const Matrix& points, const Matrix& centroids) {
    std::vector<std::size_t> labels(points.rows(), 0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centroids.rows(); ++c) {
            const double d = squared_distance(points.row(i), centroids.row(c));
            if (d < best) {
                best = d;
                labels[i] = c;
            }
        }
    }
    return labels;
}

double inertia(const Matrix& points, std::span<const std::size_t> assignments, const Matrix& centroids) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        total += squared_distance(points.row(i), centroids.row(assignments[i]));
    }
    return total;
}

Matrix kmeans_plus_plus(const Matrix& points, std::size_t k, std::uint64_t seed) {
    const std::size_t n = points.rows();
    Rng rng(seed);
    Matrix centroids(k, points.cols());
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

    std::size_t chosen = rng.index(n);
    for (std::size_t c = 0; c < k; ++c) {
        if (c > 0) {
            double total = 0.0;
            for (const double d : nearest) total += d;
            if (total > 0.0) {
                const double target = rng.uniform() * total;
                double running = 0.0;
                chosen = n - 1;
                for (std::size_t i = 0; i < n; ++i) {
                    running += nearest[i];
                    if (nearest[i] > 0.0 && running > target) {
                        chosen = i;
                        break;
                    }
                }
                while (nearest[chosen] == 0.0 && chosen > 0) --chosen;
            } else {
                chosen = rng.index(n);  // every point coincides with a centroid
            }
        }
        const auto p = points.row(chosen);
        std::copy(p.begin(), p.end(), centroids.row(c).begin());
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(points.row(i), centroids.row(c)));
        }
    }
    return centroids;
}

ClusteringResult lloyd(const Matrix& points, Matrix centroids, std::size_t max_iterations, double tolerance) {
    const std::size_t k = centroids.rows();
    ClusteringResult result;
    auto labels = assign_nearest(points, centroids);
    result.inertia_trace.push_back(inertia(points, labels, centroids));

    for (std::size_t it = 0; it < max_iterations; ++it) {
        repair_empty(points, labels, centroids);
        Matrix updated = centroid_means(points, labels, k);
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            shift = std::max(shift, std::sqrt(squared_distance(updated.row(c), centroids.row(c))));
        }
        centroids = std::move(updated);
        labels = assign_nearest(points, centroids);
        result.inertia_trace.push_back(inertia(points, labels, centroids));
        result.iterations_run = it + 1;
        if (shift <= tolerance) break;
    }
    // Coincident centroids can leave a cluster empty after the last assignment.
    repair_empty(points, labels, centroids);

    result.assignments = std::move(labels);
    result.centroids = std::move(centroids);
    result.inertia = inertia(points, result.assignments, result.centroids);
    return result;
}

ClusteringResult kmeans_fit(const Matrix& points, const KmeansConfig& config) {
    const std::size_t n = points.rows();
    if (config.k < 1) throw DataError("k-means: k must be at least 1");
    if (config.k > n) {
        throw DataError("k-means: k = " + std::to_string(config.k) + " exceeds the number of points (" +
                        std::to_string(n) + ")");
    }
    if (points.cols() < 1) throw DataError("k-means: points need at least one dimension");
    if (config.restarts < 1) throw DataError("k-means: restarts must be at least 1");
    check_finite(points);

    ClusteringResult best;
    for (std::size_t r = 0; r < config.restarts; ++r) {
        auto seeded = kmeans_plus_plus(points, config.k, derive_seed(config.seed, r));
        auto run = lloyd(points, std::move(seeded), config.max_iterations, config.tolerance);
        run.restart = r;
        if (r == 0 || run.inertia < best.inertia) best = std::move(run);
    }
    return best;
}

std::vector<double> silhouette_samples(const Matrix& points, std::span<const std::size_t> assignments) {
    const std::size_t n = points.rows();
    if (assignments.size() != n) throw DataError("silhouette: one cluster id per point is required");
    std::map<std::size_t, std::size_t> compact;
    for (const auto a : assignments) compact.try_emplace(a, compact.size());
    if (compact.size() < 2) throw DataError("silhouette: at least two distinct clusters are required");
    const std::size_t m = compact.size();

    std::vector<std::size_t> label(n);
    std::vector<std::size_t> sizes(m, 0);
    for (std::size_t i = 0; i < n; ++i) {
        label[i] = compact[assignments[i]];
        ++sizes[label[i]];
    }

    std::vector<double> s(n, 0.0);
    std::vector<double> dist_sum(m);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            dist_sum[label[j]] += std::sqrt(squared_distance(points.row(i), points.row(j)));
        }
        const std::size_t own = label[i];
        if (sizes[own] < 2) continue;
        const double a = dist_sum[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < m; ++c) {
            if (c != own) b = std::min(b, dist_sum[c] / static_cast<double>(sizes[c]));
        }
        const double denom = std::max(a, b);
        s[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return s;
}

double silhouette_mean(const Matrix& points, std::span<const std::size_t> assignments) {
    if (points.rows() < 2) throw DataError("silhouette: at least two points are required");
    const auto s = silhouette_samples(points, assignments);
    double total = 0.0;
    for (const double v : s) total += v;
    return total / static_cast<double>(s.size());
}

std::uint64_t seed_for_k(std::uint64_t base_seed, std::size_t k) { return derive_seed(base_seed, k); }

SilhouetteReport select_k(const Matrix& points, std::size_t k_min, std::size_t k_max,
                          const KmeansConfig& base_config) {
    const std::size_t n = points.rows();
    if (k_min < 2 || k_min > k_max || n < 1 || k_max > n - 1) {
        throw DataError("select_k: need 2 <= k_min <= k_max <= n - 1 (k_min = " + std::to_string(k_min) +
                        ", k_max = " + std::to_string(k_max) + ", n = " + std::to_string(n) + ")");
    }
    SilhouetteReport report;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = k_min; k <= k_max; ++k) {
        KmeansConfig config = base_config;
        config.k = k;
        config.seed = seed_for_k(base_config.seed, k);
        const auto fit = kmeans_fit(points, config);
        const double score = silhouette_mean(points, fit.assignments);
        report.scores.emplace_back(k, score);
        if (score > best) {
            best = score;
            report.best_k = k;
        }
    }
    return report;
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.size() != b.size()) throw DataError("adjusted Rand index: labelings differ in length");
    const std::size_t n = a.size();
    auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> joint;
    std::map<std::size_t, std::size_t> rows, cols;
    for (std::size_t i = 0; i < n; ++i) {
        ++joint[{a[i], b[i]}];
        ++rows[a[i]];
        ++cols[b[i]];
    }
    double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (const auto& [key, c] : joint) index += choose2(static_cast<double>(c));
    for (const auto& [key, c] : rows) sum_rows += choose2(static_cast<double>(c));
    for (const auto& [key, c] : cols) sum_cols += choose2(static_cast<double>(c));
    const double total = choose2(static_cast<double>(n));
    const double expected = total > 0.0 ? sum_rows * sum_cols / total : 0.0;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    // Both labelings trivial (all-one-cluster or all-singletons): identical partitions.
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

}  // namespace drmine::cluster
