#include "rsr/pipeline.hpp"
#include "rsr/graph.hpp"
#include "rsr/spatial_index.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <memory>

namespace rsr {

std::size_t PipelineResult::handle_count() const
{
    std::size_t n = 0;
    for (const ComponentState& c : components) {
        n += c.handles.size();
    }
    return n;
}

PipelineResult reconstruct(const PointCloud& cloud, const Params& params, const PipelineOptions& options)
{
    params.validate();
    if (cloud.size() == 0) {
        throw EmptyInput();
    }
    const auto start = std::chrono::steady_clock::now();
    PipelineResult out;

    std::vector<Point3> positions = cloud.positions;
    std::vector<UnitNormal> normals = cloud.normals;
    auto tree = std::make_unique<KdTree>(positions);

    if (normals.empty()) {
        if (!options.allow_estimation) {
            throw ConfigError("input has no normals and estimation is disabled");
        }
        auto est = estimate_normals(positions, *tree, params.k);
        normals = std::move(est.normals);
        out.degenerate_normals = est.degenerate.size();
        out.normals_estimated = true;
        spdlog::debug("estimated normals, {} degenerate neighborhoods", est.degenerate.size());
    }

    if (params.noisy) {
        for (std::uint32_t it = 0; it < params.smoothing_iterations; ++it) {
            positions = smooth_project(positions, normals, *tree, params.k, params.theta);
            tree = std::make_unique<KdTree>(positions);
        }
        if (out.normals_estimated) {
            auto est = estimate_normals(positions, *tree, params.k);
            normals = std::move(est.normals);
            out.degenerate_normals = est.degenerate.size();
        }
    }

    const Graph graph = build_knn_graph(positions, normals, *tree, params);
    out.graph_edges = graph.edge_count();
    out.graph_components = graph.component_count;
    spdlog::debug("graph: {} edges, {} components, mean length {}, max length {}", graph.edge_count(),
                  graph.component_count, graph.mean_length, graph.l_max);
    const double prep_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    Reconstructor engine(graph, positions, normals, *tree, params);
    if (options.observer) {
        engine.set_observer(options.observer);
    }
    engine.run();

    out.mesh = extract_triangles(engine.rotation_system(), cloud.original_positions, normals);
    out.metrics = compute_metrics(out.mesh, cloud.size());
    out.metrics.timings_ms = {prep_ms + engine.init_ms(), engine.insertion_ms(), engine.handles_ms(),
                              engine.triangulation_ms()};
    out.components = engine.components();
    out.rejections = engine.rejections();
    spdlog::info("reconstructed {} triangles, {} holes, {} handles, r_v {}", out.mesh.triangles.size(),
                 out.metrics.holes, out.handle_count(), out.metrics.r_v);
    return out;
}

} // namespace rsr
