// One line per primary acceptance criterion; exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "eval_oracle.hpp"
#include "ivis/eval/metrics.hpp"
#include "ivis/geometry/coverage.hpp"
#include "ivis/mask/pipeline.hpp"
#include "ivis/planner/planner.hpp"
#include "ivis/synth/experiment.hpp"
#include "ivis/synth/scene_gen.hpp"
#include "oracles.hpp"
#include "random_scenes.hpp"

using namespace ivis;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome geometry_oracle() {
    const auto t0 = Clock::now();
    double worst = 1.0;
    std::size_t regions = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = testgen::random_scene(seed);
        const auto walls = geo::walls_of(s.plan);
        const auto pts = oracle::sample_free_space(s.plan, 10000, seed + 1000);
        const auto direct = geo::visibility_polygon(s.camera.position, {s.camera.yaw, s.camera.fov}, s.plan);
        const auto rays = oracle::cast_direct(s.camera.position, s.camera.yaw, s.camera.fov, walls, 100000);
        std::size_t agree = 0;
        for (const auto& p : pts) agree += direct.contains(p) == rays.contains(p);
        worst = std::min(worst, static_cast<double>(agree) / pts.size());
        ++regions;
        for (const auto& m : s.mirrors) {
            const auto view = geo::mirror_view_region(s.camera, m, s.plan);
            const auto refl = oracle::cast_reflected(s.camera, m, walls, 100000);
            std::size_t ok = 0;
            for (const auto& p : pts) {
                bool in = false;
                for (const auto& r : view) in = in || r.contains(p);
                ok += in == refl.contains(p);
            }
            worst = std::min(worst, static_cast<double>(ok) / pts.size());
            ++regions;
        }
    }
    const double t = seconds_since(t0);
    return {worst >= 0.99 && t < 30.0,
            fmt("10 scenes, %zu regions, min agreement %.4f%%, %.2f s", regions, 100 * worst, t)};
}

Outcome reflection_identity() {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> u(0, 1);
    int cases = 0;
    double worst = 0;
    for (int trial = 0; cases < 20 && trial < 2000; ++trial) {
        geo::FloorPlan plan;
        const double W = 7 + 5 * u(rng), H = 5 + 5 * u(rng);
        if (u(rng) < 0.5) {
            plan.boundary = testgen::rect_ccw(0, 0, W, H);
        } else {
            plan.boundary = {{0, 0}, {W, 0}, {W, 0.6 * H}, {0.6 * W, 0.6 * H}, {0.6 * W, H}, {0, H}};
        }
        if (u(rng) < 0.5) plan.obstacles = {testgen::rect_cw(2.5, 2.5, 3 + u(rng), 3 + u(rng))};
        geo::Camera cam;
        cam.position = {0.5 + (0.6 * W - 1) * u(rng), 1 + 1.2 * u(rng)};
        cam.yaw = geo::kTwoPi * u(rng);
        cam.fov = u(rng) < 0.3 ? geo::kTwoPi : geo::kPi / 2 + geo::kPi * u(rng);
        const auto mirror = geo::make_mirror(1, {0.5 + (0.6 * W - 1) * u(rng), 0.25}, geo::kPi / 2 + 1.2 * (u(rng) - 0.5),
                                             0.4 + u(rng), 1.0, 1.6, {});
        if (!geo::mirror_errors(plan, mirror).empty() || !geo::strictly_in_free_space(plan, cam.position, 0.1)) continue;
        const auto walls = geo::walls_of(plan);
        const auto facet = geo::facets_of(mirror).at(0);
        const auto vis = geo::visible_intervals(cam, facet, walls);
        // Whole mirror in view, so the virtual camera's window is the full chord.
        if (vis.size() != 1 || vis[0].first > 1e-9 || vis[0].second < 1 - 1e-9) continue;
        double a = 0;
        for (const auto& r : geo::mirror_view_region(cam, mirror, plan)) a += r.area();
        const auto window = geo::windowed_visibility(geo::reflect_point(cam.position, mirror.segment), mirror.segment, walls);
        const double b = geo::area(window);
        worst = std::max(worst, std::abs(a - b) / b);
        ++cases;
    }
    return {cases == 20 && worst < 0.005, fmt("%d flat cases, max area difference %.2e%%", cases, 100 * worst)};
}

Outcome marker_reproduction() {
    const auto with = synth::synth_scene();
    const auto without = synth::synth_scene_direct_only();
    const auto s0 = geo::summarize(without, geo::coverage_map(without));
    const auto s1 = geo::summarize(with, geo::coverage_map(with));
    return {s0.markers_covered == 2 && s0.markers_total == 4 && s1.markers_covered == 4 && s1.markers_total == 4,
            fmt("direct %zu of %zu markers, with mirrors %zu of %zu", s0.markers_covered, s0.markers_total,
                s1.markers_covered, s1.markers_total)};
}

Outcome ablation() {
    const auto scene = synth::synth_scene();
    synth::SynthConfig cfg;
    cfg.num_images = 8;
    const auto data = synth::synth_dataset(scene, cfg);
    const mask::RegionSource src = mask::ProjectionSource{scene};
    bool tmg_off = true, mb_off = true, ivr_off = true;
    for (std::size_t i = 0; i < data.images.size(); ++i) {
        const auto img = synth::render_image(data, i);
        const auto bytes = mask::encode_pnm(img);
        const auto& id = data.images[i].id;
        tmg_off = tmg_off && mask::encode_pnm(mask::run_pipeline(img, id, src, {true, false, true}).image) == bytes;
        mb_off = mb_off && mask::encode_pnm(mask::run_pipeline(img, id, src, {true, true, false}).image) == bytes;
        const auto dark = mask::run_pipeline(img, id, src, {false, true, true}).image;
        ivr_off = ivr_off && std::all_of(dark.pixels.begin(), dark.pixels.end(), [](std::uint8_t v) { return v == 0; });
    }
    const auto r = synth::run_experiment(scene, synth::SynthConfig{});
    bool rows_equal = true;
    for (const auto& row : r.ablation) {
        if (!row.ablation.tmg || !row.ablation.mb) rows_equal = rows_equal && row.report == r.baseline;
    }
    return {tmg_off && mb_off && ivr_off && rows_equal,
            fmt("TMG off identical: %s, MB off identical: %s, IVR off all-zero: %s, pass-through rows = baseline: %s",
                tmg_off ? "yes" : "no", mb_off ? "yes" : "no", ivr_off ? "yes" : "no", rows_equal ? "yes" : "no")};
}

Outcome metrics() {
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto [d, g] = eval_oracle::random_instance(seed);
        const auto r = eval::evaluate(d, g);
        const auto o = eval_oracle::evaluate(d, g, 0.5, 0.25);
        worst = std::max({worst, std::abs(r.precision - o.precision), std::abs(r.recall - o.recall),
                          std::abs(r.map50 - o.map50)});
        for (const auto& [c, ap] : o.ap) worst = std::max(worst, std::abs(r.per_class_ap.at(c) - ap));
    }
    using eval::BBox;
    const std::vector<eval::GroundTruthBox> gts{{"a", 0, BBox{0, 0, 10, 10}}, {"a", 0, BBox{20, 0, 30, 10}}};
    const std::vector<eval::Detection> dets{{"a", 0, BBox{0, 0, 10, 10}, 0.9}, {"a", 0, BBox{50, 50, 60, 60}, 0.8},
                                            {"a", 0, BBox{20, 0, 30, 10}, 0.7}};
    const double ap = eval::average_precision(dets, gts, 0).value();
    return {worst <= 1e-9 && ap == 5.0 / 6.0, fmt("50 instances, max |delta| %.1e; worked example AP %.17g", worst, ap)};
}

Outcome noise_rejection() {
    const auto t0 = Clock::now();
    const auto scene = synth::synth_scene();
    const synth::SynthConfig cfg;
    const auto data = synth::synth_dataset(scene, cfg);
    const auto dets = synth::oracle_detector(data, cfg);
    const auto r = synth::run_experiment(scene, data, dets);

    // Pixel path: every image through the pipeline; flag pixels must go dark
    // and fire pixels must survive.
    mask::MaskCache cache;
    const mask::RegionSource src = mask::ProjectionSource{scene};
    bool pixels_ok = true;
    for (std::size_t i = 0; i < data.images.size(); ++i) {
        const auto img = synth::render_image(data, i);
        const auto out = mask::run_pipeline(img, data.images[i].id, src, {}, &cache).image;
        auto at_center = [&](const eval::BBox& b, const mask::ImageBuffer& m) {
            return m.at(static_cast<int>((b.x_min + b.x_max) / 2), static_cast<int>((b.y_min + b.y_max) / 2));
        };
        for (const auto& f : data.images[i].flags) pixels_ok = pixels_ok && at_center(f, out)[0] == 0 && at_center(f, out)[1] == 0;
        for (const auto& f : data.images[i].fires) pixels_ok = pixels_ok && at_center(f, out)[0] == at_center(f, img)[0];
    }
    const double t = seconds_since(t0);
    const bool pass = r.images == 800 && r.noise_images == 100 && r.masked.precision > r.baseline.precision &&
                      r.band_fp_masked == 0 && r.masked.tp == r.baseline.tp && pixels_ok && t < 120.0;
    return {pass, fmt("%zu images, %zu noisy; precision %.1f%% -> %.1f%%, band FP %zu -> %zu, TP %zu = %zu, "
                      "mAP50 %.1f%% -> %.1f%%, %.1f s",
                      r.images, r.noise_images, 100 * r.baseline.precision, 100 * r.masked.precision, r.band_fp_baseline,
                      r.band_fp_masked, r.baseline.tp, r.masked.tp, 100 * r.baseline.map50, 100 * r.masked.map50, t)};
}

Outcome planner_efficacy() {
    const auto b = synth::planner_benchmark();
    planner::PlannerConfig cfg;
    cfg.max_mirrors = 1;
    // Baseline from the ray oracle over the target cell centers.
    const auto grid = geo::make_grid(b.scene.plan, cfg.cell_size);
    const auto rays = oracle::cast_direct(b.scene.camera.position, b.scene.camera.yaw, b.scene.camera.fov,
                                          geo::walls_of(b.scene.plan));
    std::size_t target = 0, seen = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.free[i]) continue;
        bool in = false;
        for (const auto& z : b.scene.zones) {
            in = in || (z.kind == geo::ZoneKind::target && geo::point_in_polygon(grid.center(i), z.polygon));
        }
        if (!in) continue;
        ++target;
        seen += rays.contains(grid.center(i));
    }
    const double baseline = static_cast<double>(seen) / target;
    const auto p1 = planner::optimize(b.scene, b.mounts, cfg);
    const auto p2 = planner::optimize(b.scene, b.mounts, cfg);
    const bool same = planner::to_json(p1).dump() == planner::to_json(p2).dump();
    return {p1.coverage_fraction >= 0.95 && p1.leakage_fraction == 0.0 && baseline < p1.coverage_fraction && same &&
                p1.mirrors.size() == 1,
            fmt("baseline %.1f%%, optimized %.1f%% with %zu mirror, leakage %.1f%%, repeat identical: %s", 100 * baseline,
                100 * p1.coverage_fraction, p1.mirrors.size(), 100 * p1.leakage_fraction, same ? "yes" : "no")};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
    std::vector<fs::path> fa, fb;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (e.is_regular_file()) fa.push_back(fs::relative(e.path(), a));
    }
    for (const auto& e : fs::recursive_directory_iterator(b)) {
        if (e.is_regular_file()) fb.push_back(fs::relative(e.path(), b));
    }
    std::sort(fa.begin(), fa.end());
    std::sort(fb.begin(), fb.end());
    files = fa.size();
    if (fa != fb || fa.empty()) return false;
    for (const auto& f : fa) {
        if (slurp(a / f) != slurp(b / f)) return false;
    }
    return true;
}

Outcome determinism() {
    const auto root = fs::temp_directory_path() / "ivis_acceptance_determinism";
    fs::remove_all(root);
    bool ran = true;
    for (const char* run : {"a", "b"}) {
        const auto d = root / run;
        fs::create_directories(d);
        const std::string cd = "cd '" + d.string() + "' && '" + IVIS_CLI_PATH + "' ";
        for (const std::string args :
             {"synth --num-images 100 --seed 11 --out ds", "synth --benchmark --scene-out bench.json --mounts-out mounts.json",
              "plan --scene bench.json --mounts mounts.json --max-mirrors 2 --seed 4 --out plan.json",
              "experiment --seed 11 --out experiment.json --tables-out tables.txt"}) {
            const int status = std::system((cd + args + " > /dev/null").c_str());
            ran = ran && WIFEXITED(status) && WEXITSTATUS(status) == 0;
        }
    }
    std::size_t files = 0;
    const bool same = ran && same_tree(root / "a", root / "b", files);
    fs::remove_all(root);
    return {same, fmt("synth, plan, experiment: %zu output files, byte-identical: %s", files, same ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> checks[] = {
        {"geometry oracle equivalence", geometry_oracle},
        {"reflection identity", reflection_identity},
        {"marker reproduction", marker_reproduction},
        {"ablation table semantics", ablation},
        {"metric correctness", metrics},
        {"noise rejection direction", noise_rejection},
        {"planner efficacy", planner_efficacy},
        {"determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, fn] : checks) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(checks)) - failed, std::size(checks));
    return failed == 0 ? 0 : 1;
}
