#include "drmine/embed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "drmine/error.hpp"
#include "drmine/random.hpp"

namespace drmine::embed {
namespace {

constexpr double kFloor = 1e-12;
constexpr std::size_t kMaxBisectionSteps = 50;
constexpr double kEntropyTolerance = 1e-5;
constexpr double kMinGain = 0.01;

// Fills row with exp(-beta (d - d_min)) over j != i and returns the entropy
// in bits.
double row_entropy(const std::vector<double>& dist, std::size_t self, double d_min, double beta,
                   std::span<double> row) {
    double sum = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) {
        row[j] = j == self ? 0.0 : std::exp(-beta * (dist[j] - d_min));
        sum += row[j];
    }
    double weighted = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) {
        if (j == self) continue;
        row[j] /= sum;
        weighted += row[j] * (dist[j] - d_min);
    }
    return (std::log(sum) + beta * weighted) / std::numbers::ln2;
}

}  // namespace

ConditionalAffinities conditional_affinities(const Matrix& points, double perplexity) {
    const std::size_t n = points.rows();
    ConditionalAffinities out{Matrix(n, n), std::vector<double>(n, 0.0), std::vector<bool>(n, false)};
    const double target = std::log2(perplexity);
    std::vector<double> dist(n);

    for (std::size_t i = 0; i < n; ++i) {
        double d_min = std::numeric_limits<double>::infinity();
        double d_max = 0.0;
        double d_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            dist[j] = squared_distance(points.row(i), points.row(j));
            if (j == i) continue;
            d_min = std::min(d_min, dist[j]);
            d_max = std::max(d_max, dist[j]);
            d_sum += dist[j];
        }
        auto row = out.probabilities.row(i);
        if (d_max == d_min) {
            // Equidistant from every other point: no bandwidth changes anything.
            for (std::size_t j = 0; j < n; ++j) row[j] = j == i ? 0.0 : 1.0 / static_cast<double>(n - 1);
            out.perplexity[i] = static_cast<double>(n - 1);
            out.degenerate[i] = true;
            continue;
        }

        double beta = static_cast<double>(n - 1) / d_sum;
        double lo = 0.0;
        double hi = std::numeric_limits<double>::infinity();
        double entropy = row_entropy(dist, i, d_min, beta, row);
        for (std::size_t step = 0; step < kMaxBisectionSteps; ++step) {
            const double diff = entropy - target;
            if (std::abs(diff) < kEntropyTolerance) break;
            if (diff > 0.0) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
            } else {
                hi = beta;
                beta = 0.5 * (beta + lo);
            }
            entropy = row_entropy(dist, i, d_min, beta, row);
        }
        out.perplexity[i] = std::exp2(entropy);
    }
    return out;
}

Matrix joint_affinities(const ConditionalAffinities& conditional) {
    const auto& cond = conditional.probabilities;
    const std::size_t n = cond.rows();
    Matrix joint(n, n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double p = std::max((cond(i, j) + cond(j, i)) / (2.0 * static_cast<double>(n)), kFloor);
            joint(i, j) = p;
            total += p;
        }
    }
    for (auto& v : joint.values()) v /= total;
    return joint;
}

double kl_divergence(const Matrix& joint, const Matrix& coordinates) {
    const std::size_t n = joint.rows();
    Matrix num(n, n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double q = 1.0 / (1.0 + squared_distance(coordinates.row(i), coordinates.row(j)));
            num(i, j) = q;
            num(j, i) = q;
            sum += 2.0 * q;
        }
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double p = joint(i, j);
            if (p <= 0.0) continue;
            const double q = std::max(num(i, j) / sum, kFloor);
            kl += p * std::log(p / q);
        }
    }
    return std::max(kl, 0.0);
}

double perplexity_limit(std::size_t n) { return n < 1 ? 0.0 : static_cast<double>(n - 1) / 3.0; }

Embedding2D tsne_embed(const Matrix& points, const TsneConfig& config) {
    const std::size_t n = points.rows();
    if (n < 4) throw DataError("t-SNE: at least 4 points are required, got " + std::to_string(n));
    if (!(config.perplexity > 0.0) || !(config.perplexity < perplexity_limit(n))) {
        throw DataError("t-SNE: perplexity must be positive and below (n - 1) / 3 = " +
                        std::to_string(perplexity_limit(n)));
    }
    if (config.iterations < 250) throw DataError("t-SNE: at least 250 iterations are required");
    if (!(config.learning_rate > 0.0)) throw DataError("t-SNE: learning rate must be positive");
    for (const double v : points.values()) {
        if (!std::isfinite(v)) throw DataError("t-SNE: input contains non-finite values");
    }

    const Matrix joint = joint_affinities(conditional_affinities(points, config.perplexity));

    Rng rng(config.seed);
    Matrix y(n, 2);
    for (auto& v : y.values()) v = 1e-4 * rng.normal();
    Matrix velocity(n, 2);
    Matrix gains(n, 2, 1.0);
    Matrix grad(n, 2);
    Matrix num(n, n);

    Embedding2D result;
    for (std::size_t it = 0; it < config.iterations; ++it) {
        const double exaggeration = it < config.exaggeration_iterations ? config.early_exaggeration : 1.0;
        const double momentum = it < config.momentum_switch ? config.initial_momentum : config.final_momentum;

        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double q = 1.0 / (1.0 + squared_distance(y.row(i), y.row(j)));
                num(i, j) = q;
                num(j, i) = q;
                sum += 2.0 * q;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            double gx = 0.0, gy = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double q = std::max(num(i, j) / sum, kFloor);
                const double mult = (exaggeration * joint(i, j) - q) * num(i, j);
                gx += mult * (y(i, 0) - y(j, 0));
                gy += mult * (y(i, 1) - y(j, 1));
            }
            grad(i, 0) = 4.0 * gx;
            grad(i, 1) = 4.0 * gy;
        }

        // Momentum with per-coordinate adaptive gains.
        for (std::size_t idx = 0; idx < n * 2; ++idx) {
            double& g = gains.values()[idx];
            const double dy = grad.values()[idx];
            double& v = velocity.values()[idx];
            g = dy * v < 0.0 ? g + 0.2 : g * 0.8;
            g = std::max(g, kMinGain);
            v = momentum * v - config.learning_rate * g * dy;
            y.values()[idx] += v;
        }
        double mean_x = 0.0, mean_y = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean_x += y(i, 0);
            mean_y += y(i, 1);
        }
        mean_x /= static_cast<double>(n);
        mean_y /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            y(i, 0) -= mean_x;
            y(i, 1) -= mean_y;
        }

        const std::size_t done = it + 1;
        const bool checkpoint = done >= config.exaggeration_iterations &&
                                (done - config.exaggeration_iterations) % 50 == 0;
        if (checkpoint || done == config.iterations) {
            result.kl_trace.emplace_back(done, kl_divergence(joint, y));
        }
    }

    for (const double v : y.values()) {
        if (!std::isfinite(v)) throw DataError("t-SNE: optimization diverged to non-finite coordinates");
    }
    result.final_kl = result.kl_trace.back().second;
    result.coordinates = std::move(y);
    return result;
}

}  // namespace drmine::embed
