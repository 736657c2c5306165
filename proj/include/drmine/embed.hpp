#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "drmine/matrix.hpp"

namespace drmine::embed {

struct TsneConfig {
    double perplexity = 30.0;
    double learning_rate = 200.0;
    std::size_t iterations = 1000;
    double early_exaggeration = 12.0;
    std::size_t exaggeration_iterations = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    std::size_t momentum_switch = 250;
    std::uint64_t seed = 42;
};

struct Embedding2D {
    Matrix coordinates;  // n x 2
    double final_kl = 0.0;  // KL(P || Q) without exaggeration
    // (completed iterations, KL) sampled every 50 iterations from the end of
    // early exaggeration, plus the final iteration.
    std::vector<std::pair<std::size_t, double>> kl_trace;
};

struct ConditionalAffinities {
    Matrix probabilities;  // row i holds p_{j|i}; diagonal is 0
    std::vector<double> perplexity;  // achieved 2^H per row
    std::vector<bool> degenerate;    // row fell back to uniform
};

// Per-row Gaussian bandwidth by bisection on the precision (at most 50
// steps, tolerance 1e-5 on the entropy in bits).
ConditionalAffinities conditional_affinities(const Matrix& points, double perplexity);

// p_ij = (p_{j|i} + p_{i|j}) / 2n, floored at 1e-12 off the diagonal and
// renormalized to sum to 1.
Matrix joint_affinities(const ConditionalAffinities& conditional);

// KL(P || Q) for Student-t map affinities of the given coordinates.
double kl_divergence(const Matrix& joint, const Matrix& coordinates);

// Largest perplexity tsne_embed accepts for n points (exclusive bound).
double perplexity_limit(std::size_t n);

// Exact O(n^2) t-SNE. Throws DataError for n < 4, perplexity >= (n - 1) / 3,
// fewer than 250 iterations or non-finite input.
Embedding2D tsne_embed(const Matrix& points, const TsneConfig& config);

}  // namespace drmine::embed
