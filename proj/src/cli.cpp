#include "rsr/cli.hpp"
#include "rsr/mesh_out.hpp"
#include "rsr/pipeline.hpp"
#include "rsr/spatial_index.hpp"
#include "rsr/synth.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace rsr {

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitInternal = 3;

void configure_logging()
{
    auto logger = spdlog::get("rsr");
    if (!logger) {
        logger = spdlog::stderr_color_mt("rsr");
    }
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("RSR_LOG")) {
        spdlog::set_level(spdlog::level::from_str(env));
    }
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size()))) {
        throw IoError("cannot write '" + path + "'");
    }
}

struct ReconstructArgs {
    std::string input;
    std::string output;
    std::string metrics;
    std::uint32_t k = 30;
    double r = 20.0;
    double theta_deg = 60.0;
    std::uint32_t n = 50;
    std::string max_genus = "unbounded";
    bool genus0 = false;
    bool noisy = false;
    bool no_estimate = false;
    std::uint64_t seed = 0;
};

Params to_params(const ReconstructArgs& a)
{
    Params p;
    p.k = a.k;
    p.r = a.r;
    p.theta = deg_to_rad(a.theta_deg);
    p.n = a.n;
    p.noisy = a.noisy;
    p.seed = a.seed;
    if (a.genus0) {
        p.max_genus = 0;
    } else if (a.max_genus != "unbounded") {
        try {
            std::size_t used = 0;
            const unsigned long g = std::stoul(a.max_genus, &used);
            if (used != a.max_genus.size() || g >= kUnboundedGenus) {
                throw std::invalid_argument("");
            }
            p.max_genus = static_cast<std::uint32_t>(g);
        } catch (const std::exception&) {
            throw ConfigError("--max-genus takes a count or 'unbounded'");
        }
    }
    if (!(a.theta_deg > 0.0 && a.theta_deg <= 180.0)) {
        throw ConfigError("--theta must lie in (0, 180]");
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return p;
}

int do_reconstruct(const ReconstructArgs& a)
{
    const Params params = to_params(a);
    const PointCloud cloud = load_cloud(a.input);
    PipelineOptions opts;
    opts.allow_estimation = !a.no_estimate;
    if (a.no_estimate && !cloud.has_normals()) {
        throw ConfigError("--no-estimate-normals given but '" + a.input + "' has no normals");
    }
    const PipelineResult res = reconstruct(cloud, params, opts);
    export_mesh(res.mesh, a.output);
    if (!a.metrics.empty()) {
        write_text(a.metrics, metrics_to_json(res.metrics));
    }
    std::cout << res.mesh.triangles.size() << " triangles, " << res.metrics.boundary_edges << " boundary edges, "
              << res.handle_count() << " handles\n";
    return 0;
}

struct SynthArgs {
    std::string shape;
    std::string output;
    std::size_t n = 2000;
    std::uint64_t seed = 0;
    double major = 2.0;
    double minor = 0.7;
    double gap = 0.0;
    double noise = 0.0;
    std::string noise_mode = "full";
    double e_bar = 0.0;
    double normal_noise = 0.0;
};

int do_synth(const SynthArgs& a)
{
    PointCloud cloud;
    if (a.shape == "sphere") {
        cloud = sample_sphere(a.n, a.seed);
    } else if (a.shape == "torus") {
        cloud = sample_torus(a.n, a.major, a.minor, a.seed);
    } else {
        const double gap = a.gap > 0.0 ? a.gap : 0.5 * two_sheets_spacing(a.n);
        cloud = sample_two_sheets(a.n, gap);
    }
    if (a.noise > 0.0) {
        if (!(a.e_bar > 0.0)) {
            throw ConfigError("--noise needs --e-bar, the mean edge length of a clean reconstruction");
        }
        NoiseSpec spec;
        spec.amplitude = a.noise;
        spec.seed = a.seed + 1;
        spec.mode = a.noise_mode == "tangential" ? NoiseMode::Tangential
                    : a.noise_mode == "normal"   ? NoiseMode::Normal
                                                 : NoiseMode::Full;
        cloud = add_position_noise(cloud, spec, a.e_bar);
    }
    if (a.normal_noise > 0.0) {
        cloud = add_normal_noise(cloud, a.normal_noise, a.seed + 2);
    }
    save_cloud(cloud, a.output);
    return 0;
}

int do_metrics(const std::string& input, std::size_t input_vertices, const std::string& output)
{
    const TriangleMesh mesh = load_mesh(input);
    const Metrics m = compute_metrics(mesh, input_vertices > 0 ? input_vertices : mesh.vertices.size());
    const std::string json = metrics_to_json(m, false);
    if (output.empty()) {
        std::cout << json;
    } else {
        write_text(output, json);
    }
    return 0;
}

} // namespace

int run(int argc, const char* const* argv)
{
    configure_logging();
    CLI::App app{"Surface reconstruction from oriented point clouds via rotation systems"};
    app.require_subcommand(1);

    ReconstructArgs ra;
    auto* rec = app.add_subcommand("reconstruct", "Reconstruct a triangle mesh from a point cloud");
    rec->add_option("input", ra.input, "Point cloud (.ply, .obj, .xyz)")->required();
    rec->add_option("-o,--output", ra.output, "Output mesh (.obj or .ply)")->required();
    rec->add_option("--metrics", ra.metrics, "Write metrics JSON here");
    rec->add_option("--k", ra.k, "Neighbors per point")->capture_default_str();
    rec->add_option("--r", ra.r, "Outlier edge-length multiplier")->capture_default_str();
    rec->add_option("--theta", ra.theta_deg, "Max normal angle for graph edges, degrees")->capture_default_str();
    rec->add_option("--n", ra.n, "Minimum hop distance for handle endpoints")->capture_default_str();
    rec->add_option("--max-genus", ra.max_genus, "Genus cap per component, or 'unbounded'")->capture_default_str();
    rec->add_flag("--genus0", ra.genus0, "Skip handles; same as --max-genus 0");
    rec->add_flag("--noisy", ra.noisy, "Smooth points and use projection distance");
    rec->add_flag("--no-estimate-normals", ra.no_estimate, "Require normals in the input");
    rec->add_option("--seed", ra.seed, "Seed for internal randomization")->capture_default_str();

    SynthArgs sa;
    auto* syn = app.add_subcommand("synth", "Write a synthetic point cloud");
    syn->add_option("shape", sa.shape, "sphere, torus or sheets")
        ->required()
        ->check(CLI::IsMember({"sphere", "torus", "sheets"}));
    syn->add_option("-o,--output", sa.output, "Output cloud (.ply, .obj, .xyz)")->required();
    syn->add_option("--n", sa.n, "Number of points")->capture_default_str();
    syn->add_option("--seed", sa.seed, "Random seed")->capture_default_str();
    syn->add_option("--major", sa.major, "Torus major radius")->capture_default_str();
    syn->add_option("--minor", sa.minor, "Torus minor radius")->capture_default_str();
    syn->add_option("--gap", sa.gap, "Sheet separation (default half the grid spacing)");
    syn->add_option("--noise", sa.noise, "Position noise amplitude");
    syn->add_option("--noise-mode", sa.noise_mode, "full, tangential or normal")
        ->check(CLI::IsMember({"full", "tangential", "normal"}))
        ->capture_default_str();
    syn->add_option("--e-bar", sa.e_bar, "Mean edge length that scales the noise");
    syn->add_option("--normal-noise", sa.normal_noise, "Max normal tilt, degrees");

    std::string mesh_in;
    std::string metrics_out;
    std::size_t input_vertices = 0;
    auto* met = app.add_subcommand("metrics", "Print metrics of a triangle mesh");
    met->add_option("mesh", mesh_in, "Mesh (.obj or .ply)")->required();
    met->add_option("--input-vertices", input_vertices, "Input point count (default: mesh vertex count)");
    met->add_option("-o,--output", metrics_out, "Write JSON here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (rec->parsed()) {
            return do_reconstruct(ra);
        }
        if (syn->parsed()) {
            return do_synth(sa);
        }
        return do_metrics(mesh_in, input_vertices, metrics_out);
    } catch (const ConfigError& e) {
        spdlog::error("{}", e.what());
        return kExitConfig;
    } catch (const IoError& e) {
        spdlog::error("{}", e.what());
        return kExitIo;
    } catch (const ParseError& e) {
        spdlog::error("{}", e.what());
        return kExitIo;
    } catch (const UnsupportedFormat& e) {
        spdlog::error("{}", e.what());
        return kExitIo;
    } catch (const EmptyInput& e) {
        spdlog::error("{}", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        spdlog::error("{}", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        spdlog::error("reconstruction failed: {}", e.what());
        return kExitInternal;
    }
}

} // namespace rsr
