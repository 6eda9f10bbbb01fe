#pragma once

#include "torus_atlas/fibration.hpp"

#include <Eigen/Core>

#include <vector>

namespace torus_atlas {

// Closed polyline of regular values (first vertex repeated at the end).
struct LoopPath {
    std::vector<EMValue> vertices;

    // Closedness and regularity of the vertices and of samples_per_edge
    // points on every edge.
    void validate(int samples_per_edge = 16) const;
    LoopPath reversed() const;
    // Both loops must start at the same vertex.
    LoopPath then(const LoopPath& other) const;

    static LoopPath circle(const EMValue& center, double radius, int vertices, bool counterclockwise = true,
                           double phase = 0.0);
};

struct RefinementParams {
    double max_jump = 0.7853981633974483;  // pi / 4
    int initial_per_edge = 8;
    std::size_t max_samples = std::size_t(1) << 20;
};

struct RotationReport {
    double delta_theta = 0.0;
    std::size_t samples = 0;
    std::size_t refinements = 0;
    double largest_jump = 0.0;  // over consecutive samples, after refinement
};

// Total change of the continuously tracked rotation angle along the loop.
RotationReport continue_rotation(const LoopPath& loop, const RefinementParams& rp = {}, int jobs = 0);

// Integer matrix acting on column coordinates in the basis (z-cycle, azimuth cycle).
using MonodromyMatrix = Eigen::Matrix<long long, 2, 2>;

// [[1, k], [0, 1]] with k = delta_theta / 2 pi.
MonodromyMatrix monodromy_matrix(const LoopPath& loop, const RefinementParams& rp = {}, int jobs = 0,
                                 RotationReport* report = nullptr);

// Angle-summation winding number of the loop about c.
int winding_number(const LoopPath& loop, const EMValue& c = {0.0, 1.0});

}  // namespace torus_atlas
