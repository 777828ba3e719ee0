#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ivis/error.hpp"
#include "ivis/eval/metrics.hpp"
#include "ivis/geometry/scene_json.hpp"
#include "ivis/kernels/kernels.hpp"
#include "ivis/mask/pipeline.hpp"
#include "ivis/service/ops.hpp"
#include "ivis/service/server.hpp"
#include "ivis/synth/experiment.hpp"
#include "ivis/synth/scene_gen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ivis;

namespace {

json read_json(const fs::path& path) { return json::parse(mask::read_file(path)); }

void write_json(const fs::path& path, const json& j) { mask::write_file(path, service::serialize(j)); }

void make_dirs(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::pair<int, int> parse_size(const std::string& s) {
    int w = 0, h = 0;
    char x = 0;
    std::istringstream in(s);
    if (!(in >> w >> x >> h) || x != 'x' || w <= 0 || h <= 0 || !in.eof()) {
        throw InvalidArgument("size must look like 640x480, got " + s);
    }
    return {w, h};
}

struct SceneChoice {
    std::string file;
    std::uint64_t seed = synth::kDefaultSceneSeed;

    geo::Scene load() const { return file.empty() ? synth::synth_scene(seed) : geo::load_scene(file); }
};

void scene_options(CLI::App* cmd, SceneChoice& c) {
    auto* f = cmd->add_option("--scene", c.file, "Scene JSON (default: generated synth scene)");
    cmd->add_option("--scene-seed", c.seed, "Seed of the generated synth scene")->excludes(f);
}

struct SynthChoice {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<int> num_images;

    synth::SynthConfig load() const {
        synth::SynthConfig c;
        if (!config_file.empty()) c = synth::config_from_json(read_json(config_file));
        if (seed) c.seed = *seed;
        if (num_images) c.num_images = *num_images;
        synth::validate(c);
        return c;
    }
};

void synth_options(CLI::App* cmd, SynthChoice& c) {
    cmd->add_option("--config", c.config_file, "Synth config JSON");
    cmd->add_option("--seed", c.seed, "Dataset seed");
    cmd->add_option("--num-images", c.num_images, "Number of images");
}

// ---- plan

struct PlanArgs {
    std::string scene, mounts, config, out, scene_out;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_mirrors, iterations;
};

void run_plan(const PlanArgs& a) {
    const auto scene = geo::load_scene(a.scene);
    json request = {{"mounts", read_json(a.mounts)}};
    if (!a.config.empty()) request["config"] = read_json(a.config);
    auto r = service::plan_request_from_json(request);
    if (a.seed) r.config.seed = *a.seed;
    if (a.max_mirrors) r.config.max_mirrors = *a.max_mirrors;
    if (a.iterations) r.config.iterations = *a.iterations;
    planner::validate(r.config);
    const auto doc = service::plan_document(scene, r.mounts, r.config);
    write_json(a.out, doc);
    if (!a.scene_out.empty()) {
        auto placed = scene;
        placed.mirrors.clear();
        for (const auto& mj : doc.at("mirrors")) placed.mirrors.push_back(geo::mirror_from_json(mj));
        geo::save_scene(placed, a.scene_out);
    }
    const auto& m = doc.at("metrics");
    std::printf("mirrors %d  coverage %.4f  leakage %.4f  score %.6f\n", m.at("mirror_count").get<int>(),
                m.at("coverage_fraction").get<double>(), m.at("leakage_fraction").get<double>(),
                m.at("score").get<double>());
}

// ---- coverage / align

struct CoverageArgs {
    std::string scene, out;
    double cell = geo::kDefaultCellSize;
};

void run_coverage(const CoverageArgs& a) {
    const auto doc = service::coverage_document(geo::load_scene(a.scene), a.cell);
    write_json(a.out, doc);
    const auto& s = doc.at("summary");
    std::printf("markers covered %zu of %zu  target cells covered %zu of %zu\n",
                s.at("markers_covered").get<std::size_t>(), s.at("markers_total").get<std::size_t>(),
                s.at("target_cells_covered").get<std::size_t>(), s.at("target_cells").get<std::size_t>());
}

void run_align(const CoverageArgs& a) {
    const auto doc = service::alignment_document(geo::load_scene(a.scene), a.cell);
    write_json(a.out, doc);
    for (const auto& m : doc.at("mirrors")) {
        std::printf("mirror %d  target cells %zu  leakage %zu  %s\n", m.at("mirror_id").get<int>(),
                    m.at("target_cells_covered").get<std::size_t>(), m.at("leakage_cells").get<std::size_t>(),
                    m.at("aligned").get<bool>() ? "aligned" : "MISALIGNED");
    }
}

// ---- mask

struct MaskArgs {
    std::string regions, scene, adapter, size, image, image_id = "0", out, image_out, regions_out;
    double min_score = 0.0;
    bool no_ivr = false, no_tmg = false, no_mb = false;
};

void run_mask(const MaskArgs& a) {
    mask::RegionSource source;
    std::optional<geo::Scene> scene;
    if (!a.regions.empty()) {
        source = mask::AnnotationSource{a.regions};
    } else if (!a.scene.empty()) {
        scene = geo::load_scene(a.scene);
        source = mask::ProjectionSource{*scene};
    } else {
        source = mask::AdapterSource{a.adapter, a.min_score};
    }
    const mask::AblationConfig ablation{!a.no_ivr, !a.no_tmg, !a.no_mb};

    std::optional<mask::ImageBuffer> image;
    if (!a.image.empty()) image = mask::read_pnm(a.image);
    int w = 0, h = 0;
    if (!a.size.empty()) {
        std::tie(w, h) = parse_size(a.size);
    } else if (image) {
        w = image->width, h = image->height;
    } else if (scene) {
        w = scene->camera.image_w, h = scene->camera.image_h;
    } else {
        throw InvalidArgument("mask needs --size or --image to know the frame size");
    }
    if (image && (image->width != w || image->height != h)) {
        throw ValidationError("--size does not match the image dimensions");
    }

    if (!a.regions_out.empty()) {
        auto quads = ablation.ivr ? mask::identify_regions(a.image_id, source) : std::vector<mask::QuadRegion>{};
        write_json(a.regions_out, mask::to_json(quads));
    }
    const auto m = mask::pipeline_mask(a.image_id, w, h, source, ablation);
    if (!a.out.empty()) {
        if (!m) throw InvalidArgument("no mask is produced with the target mask generator or blender off");
        mask::write_mask(*m, a.out);
    }
    if (!a.image_out.empty()) {
        if (!image) throw InvalidArgument("--image-out needs --image");
        mask::write_pnm(mask::run_pipeline(*image, a.image_id, source, ablation).image, a.image_out);
    }
    if (m) std::printf("%dx%d mask, %zu pixels kept\n", w, h, m->popcount());
    else std::printf("%dx%d pass-through, no mask\n", w, h);
}

// ---- filter / eval

struct FilterArgs {
    std::string dets, mask, out;
    double min_inside = synth::kDefaultMinInside;
};

void run_filter(const FilterArgs& a) {
    const auto dets = eval::load_detections(a.dets);
    const auto m = mask::read_mask(a.mask);
    const auto kept = eval::filter_detections(dets, m, a.min_inside, m.width, m.height);
    mask::write_file(a.out, eval::to_jsonl(kept));
    std::printf("kept %zu of %zu detections\n", kept.size(), dets.size());
}

struct EvalArgs {
    std::string dets, gt, out;
    double iou = eval::kDefaultIou;
    double conf = eval::kDefaultConfidenceFloor;
};

void run_eval(const EvalArgs& a) {
    const auto report = eval::evaluate(eval::load_detections(a.dets), eval::load_ground_truths(a.gt), a.iou, a.conf);
    const auto j = eval::to_json(report);
    if (!a.out.empty()) write_json(a.out, j);
    std::cout << service::serialize(j);
}

// ---- synth

struct SynthArgs {
    SceneChoice scene;
    SynthChoice config;
    bool direct_only = false, benchmark = false, no_images = false;
    std::string out, scene_out, mounts_out;
};

void run_synth(const SynthArgs& a) {
    if (a.out.empty() && a.scene_out.empty() && a.mounts_out.empty()) {
        throw InvalidArgument("synth needs --out, --scene-out or --mounts-out");
    }
    if (a.benchmark) {
        if (!a.out.empty()) throw InvalidArgument("the planner benchmark scene has no mirrors to build a dataset on");
        const auto b = synth::planner_benchmark();
        if (!a.scene_out.empty()) geo::save_scene(b.scene, a.scene_out);
        if (!a.mounts_out.empty()) {
            json mounts = json::array();
            for (const auto& m : b.mounts) mounts.push_back(planner::to_json(m));
            write_json(a.mounts_out, {{"mounts", mounts}});
        }
        return;
    }
    if (!a.mounts_out.empty()) throw InvalidArgument("--mounts-out needs --benchmark");
    auto scene = a.scene.load();
    if (!a.scene_out.empty()) {
        auto s = scene;
        if (a.direct_only) s.mirrors.clear();
        geo::save_scene(s, a.scene_out);
    }
    if (a.out.empty()) return;

    const auto config = a.config.load();
    const auto data = synth::synth_dataset(scene, config);
    const fs::path dir = a.out;
    make_dirs(dir / "masks");
    make_dirs(dir / "regions");
    if (!a.no_images) make_dirs(dir / "images");
    const auto m = mask::generate_mask(data.regions, config.image_w, config.image_h);
    const auto regions = service::serialize(mask::to_json(data.regions));
    for (std::size_t i = 0; i < data.images.size(); ++i) {
        const auto& id = data.images[i].id;
        if (!a.no_images) mask::write_pnm(synth::render_image(data, i), dir / "images" / (id + ".ppm"));
        mask::write_mask(m, dir / "masks" / (id + ".pgm"));
        mask::write_file(dir / "regions" / (id + ".json"), regions);
    }
    mask::write_file(dir / "gt.jsonl", eval::to_jsonl(data.ground_truth()));
    mask::write_file(dir / "detections.jsonl", eval::to_jsonl(synth::oracle_detector(data, config)));
    write_json(dir / "split.json", synth::split_json(data));
    write_json(dir / "flags.json", synth::flags_json(data));
    write_json(dir / "config.json", synth::to_json(config));
    geo::save_scene(scene, dir / "scene.json");
    std::printf("%zu images (train %zu, val %zu, test %zu) in %s\n", data.images.size(),
                data.count(synth::Split::train), data.count(synth::Split::val), data.count(synth::Split::test),
                dir.string().c_str());
}

// ---- experiment

struct ExperimentArgs {
    SceneChoice scene;
    SynthChoice config;
    double min_inside = synth::kDefaultMinInside;
    std::string out, tables_out;
};

void run_experiment(const ExperimentArgs& a) {
    const auto scene = a.scene.load();
    const auto config = a.config.load();
    const auto data = synth::synth_dataset(scene, config);
    const auto report = synth::run_experiment(scene, data, synth::oracle_detector(data, config), a.min_inside);
    write_json(a.out, synth::to_json(report));
    const auto tables = synth::format_tables(report);
    if (!a.tables_out.empty()) mask::write_file(a.tables_out, tables);
    std::cout << tables;
    std::printf("\nmask pipeline throughput: %.0f images/s (%s kernels)\n", synth::pipeline_throughput(scene, data),
                std::string(kernels::isa_name(kernels::active_isa())).c_str());
}

// ---- serve

struct ServeArgs {
    std::string store, host = "127.0.0.1";
    int port = 8080;
};

void run_serve(const ServeArgs& a) {
    service::Server server(a.store);
    const int port = server.bind(a.host, a.port);
    if (port < 0) throw IoError("cannot bind " + a.host + ":" + std::to_string(a.port));
    std::printf("listening on http://%s:%d\n", a.host.c_str(), port);
    std::fflush(stdout);
    server.run();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Indirect-vision surveillance toolkit"};
    app.name("ivis");
    app.require_subcommand(1);

    PlanArgs plan;
    auto* p = app.add_subcommand("plan", "Optimize mirror placement");
    p->add_option("--scene", plan.scene, "Scene JSON")->required();
    p->add_option("--mounts", plan.mounts, "Mount segments JSON")->required();
    p->add_option("--config", plan.config, "Planner config JSON");
    p->add_option("--seed", plan.seed, "Annealing seed");
    p->add_option("--max-mirrors", plan.max_mirrors, "Mirror budget");
    p->add_option("--iterations", plan.iterations, "Annealing iterations");
    p->add_option("--out", plan.out, "Placement JSON")->required();
    p->add_option("--scene-out", plan.scene_out, "Scene with the placement applied");

    CoverageArgs cov;
    auto* c = app.add_subcommand("coverage", "Coverage grid of a scene");
    c->add_option("--scene", cov.scene, "Scene JSON")->required();
    c->add_option("--cell", cov.cell, "Cell size in meters");
    c->add_option("--out", cov.out, "Grid JSON")->required();

    CoverageArgs align;
    auto* al = app.add_subcommand("align", "Per-mirror alignment report");
    al->add_option("--scene", align.scene, "Scene JSON")->required();
    al->add_option("--cell", align.cell, "Cell size in meters");
    al->add_option("--out", align.out, "Report JSON")->required();

    MaskArgs mk;
    auto* m = app.add_subcommand("mask", "Target mask from mirror regions");
    auto* src_r = m->add_option("--regions", mk.regions, "Annotated quads: JSON file or directory");
    auto* src_s = m->add_option("--scene", mk.scene, "Project the scene's mirrors");
    auto* src_a = m->add_option("--adapter", mk.adapter, "Region detector output (JSONL)");
    src_r->excludes(src_s)->excludes(src_a);
    src_s->excludes(src_a);
    m->add_option("--min-score", mk.min_score, "Adapter score threshold");
    m->add_option("--size", mk.size, "Frame size WxH");
    m->add_option("--image", mk.image, "Input PPM/PGM");
    m->add_option("--image-id", mk.image_id, "Image id for per-image sources");
    m->add_flag("--no-ivr", mk.no_ivr, "Disable the indirect-vision recognizer");
    m->add_flag("--no-tmg", mk.no_tmg, "Disable the mask generator");
    m->add_flag("--no-mb", mk.no_mb, "Disable the mask blender");
    m->add_option("--out", mk.out, "Mask PGM");
    m->add_option("--image-out", mk.image_out, "Pipeline output image");
    m->add_option("--regions-out", mk.regions_out, "Identified quads JSON");

    FilterArgs flt;
    auto* f = app.add_subcommand("filter", "Drop detections outside the mask");
    f->add_option("--dets", flt.dets, "Detections JSONL")->required();
    f->add_option("--mask", flt.mask, "Mask PGM")->required();
    f->add_option("--min-inside", flt.min_inside, "Minimum masked fraction of a box");
    f->add_option("--out", flt.out, "Kept detections JSONL")->required();

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Precision, recall and mAP");
    e->add_option("--dets", ev.dets, "Detections JSONL")->required();
    e->add_option("--gt", ev.gt, "Ground truth JSONL")->required();
    e->add_option("--iou", ev.iou, "IoU threshold");
    e->add_option("--conf", ev.conf, "Confidence floor for precision and recall");
    e->add_option("--out", ev.out, "Report JSON");

    SynthArgs sy;
    auto* s = app.add_subcommand("synth", "Synthetic scenes and datasets");
    scene_options(s, sy.scene);
    synth_options(s, sy.config);
    s->add_flag("--direct-only", sy.direct_only, "Drop mirrors from the written scene");
    s->add_flag("--benchmark", sy.benchmark, "Planner benchmark scene and mounts");
    s->add_flag("--no-images", sy.no_images, "Skip rendering images");
    s->add_option("--out", sy.out, "Dataset directory");
    s->add_option("--scene-out", sy.scene_out, "Scene JSON");
    s->add_option("--mounts-out", sy.mounts_out, "Mounts JSON (with --benchmark)");

    ExperimentArgs ex;
    auto* x = app.add_subcommand("experiment", "Masked vs baseline detection comparison");
    scene_options(x, ex.scene);
    synth_options(x, ex.config);
    x->add_option("--min-inside", ex.min_inside, "Minimum masked fraction of a box");
    x->add_option("--out", ex.out, "Report JSON")->required();
    x->add_option("--tables-out", ex.tables_out, "Text tables");

    ServeArgs sv;
    auto* v = app.add_subcommand("serve", "HTTP service for the planner UI");
    v->add_option("--store", sv.store, "Scene store directory")->required();
    v->add_option("--host", sv.host, "Bind address");
    v->add_option("--port", sv.port, "Port (0 picks a free one)");

    if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
        std::cerr << "error: unknown subcommand " << argv[1] << "\n\n" << app.help();
        return 1;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForAllHelp& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        std::cerr << "error: " << err.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*p) run_plan(plan);
        else if (*c) run_coverage(cov);
        else if (*al) run_align(align);
        else if (*m) {
            if (mk.regions.empty() && mk.scene.empty() && mk.adapter.empty()) {
                throw InvalidArgument("mask needs one of --regions, --scene, --adapter");
            }
            run_mask(mk);
        } else if (*f) run_filter(flt);
        else if (*e) run_eval(ev);
        else if (*s) run_synth(sy);
        else if (*x) run_experiment(ex);
        else if (*v) run_serve(sv);
    } catch (const IoError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const ValidationError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
