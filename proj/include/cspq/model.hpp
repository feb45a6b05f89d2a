#ifndef CSPQ_MODEL_HPP
#define CSPQ_MODEL_HPP

/// Domain entities: moving objects under the distance-based update policy,
/// restricted areas, queries, location PDFs and the world configuration.

#include <cstdint>
#include <string>
#include <vector>

#include "cspq/geometry.hpp"

namespace cspq {

class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

using ObjectId = std::uint32_t;

enum class PdfKind : std::uint8_t { Uniform, DistortedGaussian };

/// Location PDF of an object within its uncertainty region.  Densities are
/// unnormalized: the probability estimator is a ratio of sums over points
/// sampled inside u, so the normalizer over u cancels.
struct Pdf {
    PdfKind kind = PdfKind::Uniform;
    double sigma = 0;  // DistortedGaussian only; generators default it to tau/5

    static Pdf uniform() { return {PdfKind::Uniform, 0}; }
    static Pdf distorted_gaussian(double sigma) { return {PdfKind::DistortedGaussian, sigma}; }
};

/// Moving object: recorded location l_r and distance threshold tau.  The
/// object reports a new location once it has moved at least tau away, so its
/// true position always lies within the circle C(l_r, tau).
struct MovingObject {
    ObjectId id = 0;
    Point l_r;
    double tau = 0;
    Pdf pdf;

    /// MBR of C(l_r, tau): the 2tau x 2tau square centered at l_r.
    [[nodiscard]] Mbr square() const noexcept {
        return {{l_r.x - tau, l_r.y - tau}, {l_r.x + tau, l_r.y + tau}};
    }
};

/// Obstacle polygon objects can never occupy.
struct RestrictedArea {
    ObjectId id = 0;
    Ring shape;
    Mbr mbr;

    RestrictedArea() = default;
    RestrictedArea(ObjectId i, Ring s) : id(i), shape(std::move(s)), mbr(shape.mbr()) {}
    [[nodiscard]] double span() const noexcept { return std::max(mbr.width(), mbr.height()); }
};

struct QueryRange {
    Ring shape;
    Mbr mbr;

    QueryRange() = default;
    explicit QueryRange(Ring s) : shape(std::move(s)), mbr(shape.mbr()) {}
};

enum class QueryMode : std::uint8_t { Explicit, Implicit };

struct Query {
    QueryRange range;
    double p_t = 0;
    QueryMode mode = QueryMode::Explicit;
};

/// Calibrated workload errors per coarse version, delta[k] for version k+1.
/// Values are absolute errors and nonincreasing in k; the last entry is an
/// average error while earlier ones are maxima.
struct DeltaTable {
    std::vector<int> samples;
    std::vector<double> delta;

    [[nodiscard]] std::size_t versions() const noexcept { return delta.size(); }
};

/// Workload-error table shipped as the default calibration (100..700 points).
DeltaTable default_delta_table();

struct WorldConfig {
    double width = 10000.0;
    int grid_bits = 20;       // snap quantum = width / 2^grid_bits
    int circle_vertices = 64; // polygonization of C(l_r, tau)
    int n1 = 700;             // pre-set Monte Carlo sample count
    int theta = 7;            // number of coarse versions
    DeltaTable delta_table = default_delta_table();

    [[nodiscard]] SnapGrid grid() const { return SnapGrid::for_world(width, grid_bits); }
    void validate() const;
};

struct AnswerExplicit {
    std::vector<std::pair<ObjectId, double>> tuples;  // sorted by id, p >= p_t
};

using AnswerImplicit = std::vector<ObjectId>;  // sorted, unique

/// Unnormalized location density of object `o` at point `p`.
/// Uniform -> 1; DistortedGaussian -> exp(-|p - l_r|^2 / (2 sigma^2)).
/// Zero-outside-u is enforced by callers sampling only inside u.
double pdf_density(const Pdf& pdf, const MovingObject& o, const Point& p);

}  // namespace cspq

#endif  // CSPQ_MODEL_HPP
