#ifndef CSPQ_DATAGEN_HPP
#define CSPQ_DATAGEN_HPP

/// Synthetic workload generation (uniformly placed disjoint obstacle
/// polygons, objects rejected out of them), loaders for external
/// point/rectangle datasets with min-max normalization, and query-range
/// generation.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cspq/model.hpp"

namespace cspq {

enum class RangeShape : std::uint8_t { Sq, Ta, Dm, Tz, Cc };

RangeShape range_shape_from_string(const std::string& s);
std::string to_string(RangeShape s);

struct WorkloadSpec {
    int objects = 5000;        // N
    int areas = 5000;          // M
    int area_edges = 4;        // zeta; 4 selects the default 40x10 rectangle
    int query_edges = 4;       // psi, for regular-polygon query ranges
    double epsilon = 500;      // query MBR side
    RangeShape eta = RangeShape::Sq;
    double tau_min = 20;
    double tau_max = 50;
    double world = 10000;
    PdfKind pdf = PdfKind::Uniform;
    std::uint64_t seed = 1;

    void validate() const;
};

/// M disjoint areas placed uniformly: 40x10 rectangles when area_edges == 4,
/// otherwise regular area_edges-gons with circumradius 20.  Throws
/// validation_error if M disjoint areas cannot be placed.
std::vector<RestrictedArea> gen_restricted_areas(const WorkloadSpec& spec, const SnapGrid& grid);

/// N objects with l_r uniform over the world minus the areas and tau uniform
/// in (tau_min, tau_max); DistortedGaussian sigma defaults to tau/5.
std::vector<MovingObject> gen_objects(const WorkloadSpec& spec,
                                      std::span<const RestrictedArea> areas,
                                      const SnapGrid& grid);

/// One query range with random placement: the fixed vertex-table shapes
/// (L = epsilon) for eta != Sq or psi == 4, the axis-aligned square for Sq,
/// or — when `psi_override` > 4 — the regular psi-gon with circumradius
/// epsilon/2 and first vertex at angle 0 (MBR side is exactly epsilon for
/// psi divisible by 4).
QueryRange gen_query_range(const WorkloadSpec& spec, std::mt19937_64& rng, const SnapGrid& grid,
                           int psi_override = 0);

/// CSV loaders for external datasets, normalized to [0, world]^2.
/// Points: "x,y" per line.  Rects: "xmin,ymin,xmax,ymax" per line; rects
/// that overlap an earlier rect are dropped unless keep_overlaps.
std::vector<Point> load_points(const std::filesystem::path& file, double world);
std::vector<RestrictedArea> load_rects(const std::filesystem::path& file, double world,
                                       const SnapGrid& grid, bool keep_overlaps = false);

/// Dataset directory layout: objects.csv, areas.csv, manifest.json.
void save_dataset(const std::filesystem::path& dir, const WorkloadSpec& spec,
                  std::span<const MovingObject> objects, std::span<const RestrictedArea> areas);

struct Dataset {
    WorkloadSpec spec;
    std::vector<MovingObject> objects;
    std::vector<RestrictedArea> areas;
};

Dataset load_dataset(const std::filesystem::path& dir, const SnapGrid& grid);

/// Model-invariant sweep over a dataset: disjoint areas, every l_r inside
/// the world and outside every area, tau positive.  Throws validation_error.
void validate_dataset(const Dataset& data, double world);

}  // namespace cspq

#endif  // CSPQ_DATAGEN_HPP
