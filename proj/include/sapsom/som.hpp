/**
 * @file som.hpp
 * @brief Self-organizing map over environment states.
 *
 * A Kohonen-style map on a 2D rectangular grid. Each unit holds a codebook
 * vector in input space; the winner is the unit with the closest codebook.
 * The neighborhood width adapts to the quantization error, so the activation
 * pattern (and the recognition density derived from it) is sharply peaked for
 * well-represented inputs and spreads out for novel ones.
 */

#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sapsom {

using Vec = Eigen::VectorXd;

/// Lower bound on the neighborhood width. The adaptive width is zero on an
/// exact codebook match, which would degenerate the Gaussian; the floor keeps
/// the winner at activation 1 with all neighbors effectively at 0.
inline constexpr double kSigmaFloor = 1e-3;

/// Rectangular grid geometry. Units are addressed by row-major linear index.
struct MapGeometry {
    int rows = 16;
    int cols = 16;

    int units() const { return rows * cols; }
    int row_of(int s) const { return s / cols; }
    int col_of(int s) const { return s % cols; }
    int index(int r, int c) const { return r * cols + c; }

    /// Euclidean distance between two units in grid coordinates (no wraparound).
    double grid_distance(int a, int b) const {
        const double dr = row_of(a) - row_of(b);
        const double dc = col_of(a) - col_of(b);
        return std::sqrt(dr * dr + dc * dc);
    }

    double diameter() const {
        return std::sqrt(double(rows) * rows + double(cols) * cols);
    }
};

/// Grid of codebook vectors. Codebooks are stored as columns of a D x N matrix.
class SomMap {
public:
    SomMap(MapGeometry geometry, int dim)
        : geometry_(geometry), codebook_(Eigen::MatrixXd::Zero(dim, geometry.units())) {
        if (geometry.rows < 1 || geometry.cols < 1)
            throw std::invalid_argument("SomMap: grid must have at least one unit");
        if (dim < 1) throw std::invalid_argument("SomMap: input dimension must be >= 1");
    }

    /// Codebooks drawn uniformly from [-range, range]^D.
    static SomMap random_init(MapGeometry geometry, int dim, double range,
                              std::mt19937_64& rng) {
        SomMap map(geometry, dim);
        std::uniform_real_distribution<double> dist(-range, range);
        for (int s = 0; s < map.units(); ++s)
            for (int d = 0; d < dim; ++d) map.codebook_(d, s) = dist(rng);
        return map;
    }

    const MapGeometry& geometry() const { return geometry_; }
    int units() const { return geometry_.units(); }
    int dim() const { return static_cast<int>(codebook_.rows()); }

    Eigen::MatrixXd& codebook() { return codebook_; }
    const Eigen::MatrixXd& codebook() const { return codebook_; }

    /// Generative prediction of the input for unit s: its codebook vector.
    Vec decode(int s) const {
        if (s < 0 || s >= units()) throw std::out_of_range("SomMap::decode: unit out of grid");
        return codebook_.col(s);
    }

private:
    MapGeometry geometry_;
    Eigen::MatrixXd codebook_;  // D x N, column s = w(s)
};

inline void check_finite(const Vec& u, const char* what) {
    if (!u.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

/// Euclidean distances ||u - w(s)|| for every unit.
inline Vec codebook_distances(const Vec& u, const SomMap& map) {
    if (u.size() != map.dim())
        throw std::invalid_argument("codebook_distances: dimension mismatch");
    return (map.codebook().colwise() - u).colwise().norm().transpose();
}

/// Best-matching unit: argmin_s ||u - w(s)||, ties broken by lowest linear index.
inline int find_winner(const Vec& u, const SomMap& map) {
    check_finite(u, "find_winner");
    const Vec d2 = (map.codebook().colwise() - u).colwise().squaredNorm().transpose();
    int best = 0;
    for (int s = 1; s < map.units(); ++s)
        if (d2[s] < d2[best]) best = s;
    return best;
}

/// Input-space prediction error: distance between u and its winner's codebook.
inline double quantization_error(const Vec& u, const SomMap& map) {
    return codebook_distances(u, map).minCoeff();
}

/// Data-driven neighborhood width: sigma0 scaled by the ratio of minimum to
/// mean codebook distance, floored at kSigmaFloor.
inline double adaptive_width(const Vec& u, const SomMap& map, double sigma0,
                             double sigma_floor = kSigmaFloor) {
    check_finite(u, "adaptive_width");
    const Vec d = codebook_distances(u, map);
    const double mean = d.mean();
    if (mean <= 0.0) return sigma_floor;
    return std::max(sigma_floor, sigma0 * d.minCoeff() / mean);
}

/// Gaussian activation pattern h(s) = exp(-||s* - s||^2 / (2 sigma^2)),
/// centered at the winner in grid coordinates. h(winner) = 1 exactly.
inline Vec neighborhood(int winner, double sigma, const MapGeometry& geometry) {
    if (sigma <= 0.0) throw std::invalid_argument("neighborhood: sigma must be > 0");
    Vec h(geometry.units());
    const double denom = 2.0 * sigma * sigma;
    for (int s = 0; s < geometry.units(); ++s) {
        const double g = geometry.grid_distance(winner, s);
        h[s] = std::exp(-g * g / denom);
    }
    h[winner] = 1.0;
    return h;
}

/// Hebbian update: each codebook moves fraction eta*h(s) toward u.
inline void som_update(SomMap& map, const Vec& u, double eta, const Vec& h) {
    if (h.size() != map.units())
        throw std::invalid_argument("som_update: activation length mismatch");
    if (u.size() != map.dim())
        throw std::invalid_argument("som_update: input dimension mismatch");
    auto& w = map.codebook();
    w += ((-w).colwise() + u) * (eta * h).asDiagonal();
}

/// Normalized activation pattern, interpreted as a probability over map units.
inline Vec recognition_density(const Vec& h) {
    const double total = h.sum();
    if (!(total > 0.0))
        throw std::logic_error("recognition_density: activation pattern sums to zero");
    return h / total;
}

/// Recognition density for input u at the given base width (winner lookup,
/// adaptive width, Gaussian neighborhood, normalization).
inline Vec recognition_density(const Vec& u, const SomMap& map, double sigma0) {
    const int winner = find_winner(u, map);
    const double sigma = adaptive_width(u, map, sigma0);
    return recognition_density(neighborhood(winner, sigma, map.geometry()));
}

}  // namespace sapsom
