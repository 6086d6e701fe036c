#pragma once

#include "rsr/mesh_out.hpp"
#include "rsr/pointcloud.hpp"
#include "rsr/reconstruct.hpp"

#include <stdexcept>
#include <vector>

namespace rsr {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct PipelineOptions {
    /// Estimate normals when the cloud has none. When false such clouds are rejected.
    bool allow_estimation = true;
    InsertionObserver observer;
};

struct PipelineResult {
    TriangleMesh mesh;
    Metrics metrics;
    std::vector<ComponentState> components;
    RejectionStats rejections;
    std::size_t graph_edges = 0;
    std::size_t graph_components = 0;
    std::size_t degenerate_normals = 0;
    bool normals_estimated = false;

    std::size_t handle_count() const;
};

/// Load-free pipeline: normals, optional smoothing, graph, per-component
/// reconstruction, triangle extraction on the original positions.
PipelineResult reconstruct(const PointCloud& cloud, const Params& params, const PipelineOptions& options = {});

} // namespace rsr
