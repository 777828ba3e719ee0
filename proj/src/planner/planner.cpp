#include "ivis/planner/planner.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ivis/error.hpp"
#include "ivis/geometry/scene_json.hpp"

namespace ivis::planner {

using geo::CoverageGrid;
using geo::Point2;

void validate(const PlannerConfig& c) {
    if (c.max_mirrors < 0) throw InvalidArgument("max_mirrors must be >= 0");
    if (!(c.w_cover >= 0 && c.w_leak >= 0 && c.w_count >= 0)) throw InvalidArgument("weights must be >= 0");
    if (c.iterations < 1) throw InvalidArgument("iterations must be >= 1");
    if (!(c.initial_temperature > 0)) throw InvalidArgument("initial_temperature must be positive");
    if (!(c.cooling > 0 && c.cooling < 1)) throw InvalidArgument("cooling must be in (0, 1)");
    const auto& m = c.mirror;
    if (!(m.width > 0)) throw InvalidArgument("mirror width must be positive");
    if (!(m.z_top > m.z_bottom)) throw InvalidArgument("mirror z_top must exceed z_bottom");
    if (!m.allow_flat && !m.allow_convex) throw InvalidArgument("no mirror kind allowed");
    if (m.allow_convex) {
        if (!(m.radius_min > m.width / 2 && m.radius_max >= m.radius_min)) {
            throw InvalidArgument("convex radius range must satisfy width/2 < radius_min <= radius_max");
        }
        if (m.facet_count < 1) throw InvalidArgument("facet_count must be >= 1");
    }
    if (!(m.clearance >= 0)) throw InvalidArgument("clearance must be >= 0");
}

namespace {

// Per-scene data shared by every candidate evaluation.
struct Context {
    CoverageGrid grid;
    std::vector<std::size_t> target;  // cell indices
    std::vector<std::size_t> quiet;
    std::vector<std::uint8_t> is_quiet;

    Context(const Scene& scene, double cell_size) : grid(geo::make_grid(scene.plan, cell_size)) {
        const auto& cam = scene.camera;
        const auto direct = geo::visibility_polygon(cam.position, {cam.yaw, cam.fov}, scene.plan);
        for (std::size_t i : geo::cells_in_region(grid, direct)) grid.direct[i] = 1;
        const auto t = geo::zone_membership(scene, grid, geo::ZoneKind::target);
        is_quiet = geo::zone_membership(scene, grid, geo::ZoneKind::non_interest);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (t[i]) target.push_back(i);
            if (is_quiet[i]) quiet.push_back(i);
        }
    }

    Metrics score(const std::vector<const std::vector<std::size_t>*>& views, const PlannerConfig& c) const {
        std::vector<std::uint8_t> seen(grid.size(), 0);
        for (const auto* v : views) {
            for (std::size_t i : *v) seen[i] = 1;
        }
        Metrics m;
        m.target_cells = target.size();
        m.non_interest_cells = quiet.size();
        std::size_t covered = 0, leaked = 0;
        for (std::size_t i : target) covered += (grid.direct[i] || seen[i]) ? 1 : 0;
        for (std::size_t i : quiet) leaked += seen[i];
        m.coverage_fraction = target.empty() ? 0.0 : static_cast<double>(covered) / target.size();
        m.leakage_fraction = quiet.empty() ? 0.0 : static_cast<double>(leaked) / quiet.size();
        const double count_term =
            c.max_mirrors > 0 ? static_cast<double>(views.size()) / c.max_mirrors : 0.0;
        m.score = c.w_cover * m.coverage_fraction - c.w_leak * m.leakage_fraction - c.w_count * count_term;
        return m;
    }
};

}  // namespace

Metrics evaluate_scene(const Scene& scene, const PlannerConfig& config) {
    const Context ctx(scene, config.cell_size);
    std::vector<std::vector<std::size_t>> views;
    for (const auto& m : scene.mirrors) views.push_back(geo::mirror_cells(ctx.grid, scene.camera, m, scene.plan));
    std::vector<const std::vector<std::size_t>*> ptrs;
    for (const auto& v : views) ptrs.push_back(&v);
    return ctx.score(ptrs, config);
}

double objective(const Scene& scene, const PlannerConfig& config) {
    return evaluate_scene(scene, config).score;
}

Mirror mount_mirror(int id, const MountSegment& mount, double s, double yaw, double radius,
                    const MirrorSpec& spec) {
    const Point2 foot = mount.segment.at(s);
    const Point2 mid_dir = geo::unit_from_angle(0.5 * (mount.yaw_lo + mount.yaw_hi));
    // A point mount has no wall direction; push off along the mid yaw.
    Point2 inward = mid_dir;
    if (mount.segment.length() > 0) {
        inward = geo::normalized(geo::perp_ccw(mount.segment.direction()));
        if (geo::dot(inward, mid_dir) < 0) inward = inward * -1.0;
    }
    const double tilt = std::remainder(yaw - std::atan2(inward.y, inward.x), geo::kTwoPi);
    const double standoff = spec.width / 2 * std::abs(std::sin(tilt)) + spec.clearance;
    geo::Curvature curv;
    if (radius > 0) curv = {geo::CurvatureKind::convex, radius, spec.facet_count};
    return geo::make_mirror(id, foot + inward * standoff, yaw, spec.width, spec.z_bottom, spec.z_top, curv);
}

namespace {

struct Gene {
    int mount = 0;
    double s = 0.5;
    double yaw = 0.0;
    double radius = 0.0;  // 0 = flat
};

struct State {
    std::vector<Gene> genes;
    std::vector<std::vector<std::size_t>> views;
    double score = 0.0;
};

class Annealer {
public:
    Annealer(const Scene& scene, const std::vector<MountSegment>& mounts, const PlannerConfig& config)
        : scene_(scene), mounts_(mounts), cfg_(config), ctx_(scene, config.cell_size), rng_(config.seed) {}

    State run() {
        State cur;
        cur.score = score_of(cur);
        State best = cur;
        double temp = cfg_.initial_temperature;

        for (int it = 0; it < cfg_.iterations; ++it, temp *= cfg_.cooling) {
            enum Move { add, remove, perturb };
            std::vector<Move> moves;
            const int n = static_cast<int>(cur.genes.size());
            if (n < cfg_.max_mirrors) moves.push_back(add);
            if (n > 0) {
                moves.push_back(remove);
                moves.push_back(perturb);
            }
            if (moves.empty()) break;

            State cand = cur;
            const Move mv = moves[pick(moves.size())];
            if (mv == add) {
                Gene g = random_gene();
                if (!feasible(g)) continue;
                cand.views.push_back(view_of(g));
                cand.genes.push_back(g);
            } else if (mv == remove) {
                const std::size_t k = pick(cand.genes.size());
                cand.genes.erase(cand.genes.begin() + static_cast<std::ptrdiff_t>(k));
                cand.views.erase(cand.views.begin() + static_cast<std::ptrdiff_t>(k));
            } else {
                const std::size_t k = pick(cand.genes.size());
                Gene g = jitter(cand.genes[k], temp / cfg_.initial_temperature);
                if (!feasible(g)) continue;
                cand.views[k] = view_of(g);
                cand.genes[k] = g;
            }
            cand.score = score_of(cand);

            const double delta = cand.score - cur.score;
            const bool accept = delta >= 0 || unit() < std::exp(delta / temp);
            if (!accept) continue;
            cur = std::move(cand);
            if (cur.score > best.score + 1e-12 ||
                (std::abs(cur.score - best.score) <= 1e-12 && cur.genes.size() < best.genes.size())) {
                best = cur;
            }
        }
        return best;
    }

    Mirror mirror_of(const Gene& g, int id) const {
        return mount_mirror(id, mounts_[static_cast<std::size_t>(g.mount)], g.s, g.yaw, g.radius, cfg_.mirror);
    }

private:
    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
    double uniform(double lo, double hi) { return lo == hi ? lo : lo + (hi - lo) * unit(); }
    double gauss() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

    double random_radius() {
        const auto& m = cfg_.mirror;
        const bool convex = m.allow_convex && (!m.allow_flat || unit() < 0.5);
        return convex ? uniform(m.radius_min, m.radius_max) : 0.0;
    }

    Gene random_gene() {
        Gene g;
        g.mount = static_cast<int>(pick(mounts_.size()));
        const auto& mt = mounts_[static_cast<std::size_t>(g.mount)];
        g.s = uniform(0.0, 1.0);
        g.yaw = uniform(mt.yaw_lo, mt.yaw_hi);
        g.radius = random_radius();
        return g;
    }

    static double fold(double v, double lo, double hi) {
        if (hi <= lo) return lo;
        for (int k = 0; k < 4 && (v < lo || v > hi); ++k) v = v < lo ? 2 * lo - v : 2 * hi - v;
        return std::clamp(v, lo, hi);
    }

    Gene jitter(Gene g, double heat) {
        const auto& mt = mounts_[static_cast<std::size_t>(g.mount)];
        const auto& spec = cfg_.mirror;
        g.s = fold(g.s + 0.3 * heat * gauss(), 0.0, 1.0);
        g.yaw = fold(g.yaw + 0.5 * heat * (mt.yaw_hi - mt.yaw_lo) * gauss(), mt.yaw_lo, mt.yaw_hi);
        if (spec.allow_flat && spec.allow_convex && unit() < 0.1) {
            g.radius = g.radius > 0 ? 0.0 : uniform(spec.radius_min, spec.radius_max);
        } else if (g.radius > 0) {
            g.radius = fold(g.radius + 0.5 * heat * (spec.radius_max - spec.radius_min) * gauss(),
                            spec.radius_min, spec.radius_max);
        }
        return g;
    }

    bool feasible(const Gene& g) const { return geo::mirror_errors(scene_.plan, mirror_of(g, 1)).empty(); }

    std::vector<std::size_t> view_of(const Gene& g) const {
        return geo::mirror_cells(ctx_.grid, scene_.camera, mirror_of(g, 1), scene_.plan);
    }

    double score_of(const State& s) const {
        std::vector<const std::vector<std::size_t>*> ptrs;
        for (const auto& v : s.views) ptrs.push_back(&v);
        return ctx_.score(ptrs, cfg_).score;
    }

    const Scene& scene_;
    const std::vector<MountSegment>& mounts_;
    const PlannerConfig& cfg_;
    Context ctx_;
    std::mt19937_64 rng_;
};

}  // namespace

Placement optimize(const Scene& scene, const std::vector<MountSegment>& mounts, const PlannerConfig& config) {
    if (mounts.empty()) throw InvalidArgument("optimize needs at least one mount segment");
    validate(config);
    for (const auto& m : mounts) {
        if (!geo::is_finite(m.segment.a) || !geo::is_finite(m.segment.b)) {
            throw InvalidArgument("mount segment must be finite");
        }
        if (!(m.yaw_hi >= m.yaw_lo)) throw InvalidArgument("mount yaw interval is reversed");
    }
    Scene base = scene;
    base.mirrors.clear();
    geo::validate(base);

    Annealer annealer(base, mounts, config);
    const State best = annealer.run();

    Placement out;
    for (std::size_t k = 0; k < best.genes.size(); ++k) {
        out.mirrors.push_back(annealer.mirror_of(best.genes[k], static_cast<int>(k) + 1));
    }
    const Metrics m = evaluate_scene(apply(base, out), config);
    out.score = m.score;
    out.coverage_fraction = m.coverage_fraction;
    out.leakage_fraction = m.leakage_fraction;
    return out;
}

Scene apply(const Scene& scene, const Placement& placement) {
    Scene s = scene;
    s.mirrors = placement.mirrors;
    return s;
}

nlohmann::json to_json(const Placement& p) {
    nlohmann::json mirrors = nlohmann::json::array();
    for (const auto& m : p.mirrors) mirrors.push_back(geo::to_json(m));
    return {{"mirrors", mirrors},
            {"metrics",
             {{"score", p.score},
              {"coverage_fraction", p.coverage_fraction},
              {"leakage_fraction", p.leakage_fraction},
              {"mirror_count", p.mirrors.size()}}}};
}

nlohmann::json to_json(const MountSegment& m) {
    return {{"segment", {geo::to_json(m.segment.a), geo::to_json(m.segment.b)}},
            {"allowed_yaw", {m.yaw_lo, m.yaw_hi}}};
}

MountSegment mount_from_json(const nlohmann::json& j) {
    try {
        MountSegment m;
        const auto& seg = j.at("segment");
        if (!seg.is_array() || seg.size() != 2) throw InvalidArgument("mount segment needs two points");
        m.segment = {geo::point_from_json(seg[0]), geo::point_from_json(seg[1])};
        const auto& yaw = j.at("allowed_yaw");
        if (!yaw.is_array() || yaw.size() != 2) throw InvalidArgument("allowed_yaw needs [lo, hi]");
        m.yaw_lo = yaw[0].get<double>();
        m.yaw_hi = yaw[1].get<double>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad mount: ") + e.what());
    }
}

std::vector<MountSegment> mounts_from_json(const nlohmann::json& j) {
    const auto& arr = j.is_object() ? j.at("mounts") : j;
    if (!arr.is_array()) throw InvalidArgument("mounts must be an array");
    std::vector<MountSegment> out;
    for (const auto& m : arr) out.push_back(mount_from_json(m));
    return out;
}

PlannerConfig config_from_json(const nlohmann::json& j, PlannerConfig c) {
    try {
        c.max_mirrors = j.value("max_mirrors", c.max_mirrors);
        if (j.contains("weights")) {
            const auto& w = j.at("weights");
            c.w_cover = w.at(0).get<double>();
            c.w_leak = w.at(1).get<double>();
            c.w_count = w.at(2).get<double>();
        }
        c.iterations = j.value("iterations", c.iterations);
        c.initial_temperature = j.value("initial_temperature", c.initial_temperature);
        c.cooling = j.value("cooling", c.cooling);
        c.seed = j.value("seed", c.seed);
        c.cell_size = j.value("cell_size", c.cell_size);
        if (j.contains("mirror")) {
            const auto& m = j.at("mirror");
            auto& s = c.mirror;
            s.width = m.value("width", s.width);
            s.z_bottom = m.value("z_bottom", s.z_bottom);
            s.z_top = m.value("z_top", s.z_top);
            s.allow_flat = m.value("allow_flat", s.allow_flat);
            s.allow_convex = m.value("allow_convex", s.allow_convex);
            s.radius_min = m.value("radius_min", s.radius_min);
            s.radius_max = m.value("radius_max", s.radius_max);
            s.facet_count = m.value("facet_count", s.facet_count);
            s.clearance = m.value("clearance", s.clearance);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad planner config: ") + e.what());
    }
    validate(c);
    return c;
}

}  // namespace ivis::planner
