#include "ivis/synth/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ivis/error.hpp"
#include "ivis/mask/raster.hpp"

namespace ivis::synth {

using eval::BBox;
using geo::Point2;

namespace {

constexpr double kBandBottom = 2.0;  // meters; the non-interest band hangs under the ceiling
constexpr double kBandTop = 3.0;

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string image_name(std::size_t index, std::size_t total) {
    std::string digits = std::to_string(index);
    const std::size_t width = std::max<std::size_t>(4, std::to_string(total > 0 ? total - 1 : 0).size());
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    return "img_" + digits;
}

bool box_in_quad(const BBox& b, double margin, const mask::QuadRegion& q) {
    const geo::Polygon poly(q.corners.begin(), q.corners.end());
    const Point2 corners[4] = {{b.x_min - margin, b.y_min - margin},
                               {b.x_max + margin, b.y_min - margin},
                               {b.x_max + margin, b.y_max + margin},
                               {b.x_min - margin, b.y_max + margin}};
    return std::all_of(std::begin(corners), std::end(corners),
                       [&](Point2 p) { return geo::point_strictly_inside(p, poly, 1e-9); });
}

bool overlaps(const BBox& a, const BBox& b, double gap) {
    return a.x_min < b.x_max + gap && b.x_min < a.x_max + gap && a.y_min < b.y_max + gap && b.y_min < a.y_max + gap;
}

// True when no pixel of `b` grown by `margin` is under the mask.
bool clear_of_mask(const BBox& b, double margin, const mask::MaskRaster& m) {
    const int x0 = std::max(0, static_cast<int>(std::floor(b.x_min - margin)));
    const int y0 = std::max(0, static_cast<int>(std::floor(b.y_min - margin)));
    const int x1 = std::min(m.width - 1, static_cast<int>(std::ceil(b.x_max + margin)));
    const int y1 = std::min(m.height - 1, static_cast<int>(std::ceil(b.y_max + margin)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            if (m.get(x, y)) return false;
        }
    }
    return true;
}

BBox quad_bounds(const mask::QuadRegion& q) {
    BBox b{q.corners[0].x, q.corners[0].y, q.corners[0].x, q.corners[0].y};
    for (const auto& p : q.corners) {
        b.x_min = std::min(b.x_min, p.x);
        b.y_min = std::min(b.y_min, p.y);
        b.x_max = std::max(b.x_max, p.x);
        b.y_max = std::max(b.y_max, p.y);
    }
    return b;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g_); }
    std::uint64_t next() { return g_(); }
    std::mt19937_64& engine() { return g_; }

private:
    std::mt19937_64 g_;
};

}  // namespace

void validate(const SynthConfig& c) {
    auto rate = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (c.num_images < 1) throw InvalidArgument("num_images must be >= 1");
    if (c.image_w < 16 || c.image_h < 16) throw InvalidArgument("images must be at least 16x16");
    if (c.fire_min < 0 || c.fire_max < c.fire_min) throw InvalidArgument("fire count range must satisfy 0 <= min <= max");
    if (!rate(c.noise_image_fraction) || !rate(c.noise_fp_rate) || !rate(c.miss_rate)) {
        throw InvalidArgument("rates and fractions must be in [0, 1]");
    }
    if (!(c.jitter >= 0.0 && c.jitter <= 20.0)) throw InvalidArgument("jitter must be in [0, 20] pixels");
    if (!rate(c.train_fraction) || !rate(c.val_fraction) || c.train_fraction + c.val_fraction > 1.0 + 1e-12) {
        throw InvalidArgument("split fractions must be in [0, 1] and sum to at most 1");
    }
}

std::string_view split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

std::vector<eval::GroundTruthBox> SynthDataset::ground_truth() const {
    std::vector<eval::GroundTruthBox> out;
    for (const auto& img : images) {
        for (const auto& f : img.fires) out.push_back({img.id, kFireClass, f});
    }
    return out;
}

std::size_t SynthDataset::count(Split s) const {
    return static_cast<std::size_t>(
        std::count_if(images.begin(), images.end(), [&](const SynthImage& i) { return i.split == s; }));
}

SynthDataset synth_dataset(const geo::Scene& scene, const SynthConfig& config) {
    validate(config);
    if (scene.mirrors.empty()) throw InvalidArgument("scene has no mirrors");

    SynthDataset data;
    data.config = config;
    data.camera = scene.camera;
    data.camera.focal = scene.camera.focal * config.image_w / scene.camera.image_w;
    data.camera.image_w = config.image_w;
    data.camera.image_h = config.image_h;

    geo::Scene view = scene;
    view.camera = data.camera;
    for (const auto& q : mask::project_all_mirrors(view)) {
        const BBox b = quad_bounds(q);
        if (b.x_max > 0 && b.y_max > 0 && b.x_min < config.image_w && b.y_min < config.image_h) data.regions.push_back(q);
    }
    if (data.regions.empty()) throw InvalidArgument("no mirror projects into the image");
    const mask::MaskRaster quads = mask::generate_mask(data.regions, config.image_w, config.image_h);
    // Fires must sit in exactly one quad, so each quad gets the union of the others.
    std::vector<mask::MaskRaster> others;
    for (std::size_t k = 0; k < data.regions.size(); ++k) {
        auto rest = data.regions;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
        others.push_back(mask::generate_mask(rest, config.image_w, config.image_h));
    }

    const geo::Zone* band_zone = nullptr;
    for (const auto& z : scene.zones) {
        if (z.kind == geo::ZoneKind::non_interest && (config.noise_region == 0 || z.id == config.noise_region)) {
            band_zone = &z;
            break;
        }
    }
    if (!band_zone) throw InvalidArgument("scene has no matching non-interest zone for flag noise");
    bool first = true;
    for (const auto& p : band_zone->polygon) {
        for (double z : {kBandBottom, kBandTop}) {
            const auto px = mask::project_point(data.camera, p, z);
            if (!px) throw InvalidArgument("non-interest zone is behind the camera");
            if (first) data.noise_band = {px->x, px->y, px->x, px->y};
            first = false;
            auto& b = data.noise_band;
            b.x_min = std::min(b.x_min, px->x);
            b.y_min = std::min(b.y_min, px->y);
            b.x_max = std::max(b.x_max, px->x);
            b.y_max = std::max(b.y_max, px->y);
        }
    }
    auto& band = data.noise_band;
    band = {std::max(band.x_min, 0.0), std::max(band.y_min, 0.0), std::min(band.x_max, double(config.image_w)),
            std::min(band.y_max, double(config.image_h))};
    if (!(band.x_max > band.x_min + 8 && band.y_max > band.y_min + 6)) {
        throw InvalidArgument("non-interest zone does not project into the image");
    }

    Rng rng(config.seed);
    const auto n = static_cast<std::size_t>(config.num_images);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::shuffle(order.begin(), order.end(), rng.engine());
    const auto n_noise = static_cast<std::size_t>(std::llround(config.noise_image_fraction * static_cast<double>(n)));
    std::vector<bool> noisy(n, false);
    for (std::size_t k = 0; k < n_noise; ++k) noisy[order[k]] = true;

    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.engine());
    const auto n_train = static_cast<std::size_t>(std::llround(config.train_fraction * static_cast<double>(n)));
    const auto n_val = std::min(n - n_train, static_cast<std::size_t>(std::llround(config.val_fraction * static_cast<double>(n))));
    std::vector<Split> split(n, Split::test);
    for (std::size_t k = 0; k < n_train; ++k) split[order[k]] = Split::train;
    for (std::size_t k = n_train; k < n_train + n_val; ++k) split[order[k]] = Split::val;

    const double margin = std::ceil(config.jitter) + 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        SynthImage img;
        img.id = image_name(i, n);
        img.render_seed = rng.next();
        img.split = split[i];

        const int fires = rng.integer(config.fire_min, config.fire_max);
        for (int f = 0; f < fires; ++f) {
            for (int attempt = 0; attempt < 200; ++attempt) {
                const int qi = rng.integer(0, static_cast<int>(data.regions.size()) - 1);
                const auto& q = data.regions[static_cast<std::size_t>(qi)];
                const BBox qb = quad_bounds(q);
                const double shrink = attempt < 100 ? 1.0 : 0.5;
                const double w = std::floor(rng.uniform(10.0, std::max(11.0, shrink * qb.width() / 2.5)));
                const double h = std::floor(rng.uniform(12.0, std::max(13.0, shrink * qb.height() / 2.0)));
                const double x = std::floor(rng.uniform(qb.x_min, std::max(qb.x_min + 1, qb.x_max - w)));
                const double y = std::floor(rng.uniform(qb.y_min, std::max(qb.y_min + 1, qb.y_max - h)));
                const BBox b{x, y, x + w, y + h};
                if (b.x_min < 0 || b.y_min < 0 || b.x_max > config.image_w || b.y_max > config.image_h) continue;
                if (!box_in_quad(b, margin, q) || !clear_of_mask(b, margin, others[static_cast<std::size_t>(qi)])) continue;
                if (std::any_of(img.fires.begin(), img.fires.end(), [&](const BBox& o) { return overlaps(o, b, 2); })) {
                    continue;
                }
                img.fires.push_back(b);
                img.fire_quad.push_back(qi);
                break;
            }
        }

        if (noisy[i]) {
            const int flags = rng.integer(1, 2);
            for (int f = 0; f < flags; ++f) {
                for (int attempt = 0; attempt < 200; ++attempt) {
                    const double w = std::floor(rng.uniform(12.0, std::min(26.0, band.width() - 2)));
                    const double h = std::floor(rng.uniform(8.0, std::min(16.0, band.height() - 2)));
                    const double x = std::floor(rng.uniform(band.x_min, band.x_max - w));
                    const double y = std::floor(rng.uniform(band.y_min, band.y_max - h));
                    const BBox b{x, y, x + w, y + h};
                    if (!clear_of_mask(b, margin, quads)) continue;
                    if (std::any_of(img.flags.begin(), img.flags.end(), [&](const BBox& o) { return overlaps(o, b, 2); })) {
                        continue;
                    }
                    img.flags.push_back(b);
                    break;
                }
            }
            if (img.flags.empty()) throw InvalidArgument("no room for flags outside the mirror quads");
        }
        data.images.push_back(std::move(img));
    }
    return data;
}

namespace {

void paint_box(mask::ImageBuffer& img, const BBox& b, auto color) {
    const int x0 = std::max(0, static_cast<int>(b.x_min)), x1 = std::min(img.width, static_cast<int>(b.x_max));
    const int y0 = std::max(0, static_cast<int>(b.y_min)), y1 = std::min(img.height, static_cast<int>(b.y_max));
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const auto c = color(x - x0, y - y0);
            if (!c) continue;
            std::uint8_t* p = img.at(x, y);
            p[0] = (*c)[0];
            p[1] = (*c)[1];
            p[2] = (*c)[2];
        }
    }
}

using Rgb = std::array<std::uint8_t, 3>;

std::uint8_t clamp8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

mask::ImageBuffer render_image(const SynthDataset& data, std::size_t index) {
    const auto& meta = data.images.at(index);
    const int w = data.config.image_w, h = data.config.image_h;
    Rng rng(meta.render_seed);
    auto img = mask::ImageBuffer::zeros(w, h, 3);

    const double tint = rng.uniform(-12, 12);
    const int horizon = h / 2 + static_cast<int>(rng.uniform(-6, 6));
    for (int y = 0; y < h; ++y) {
        const bool floor = y >= horizon;
        const double t = static_cast<double>(y) / h;
        const Rgb c = floor ? Rgb{clamp8(118 + tint - 30 * t), clamp8(100 + tint - 25 * t), clamp8(82 + tint - 20 * t)}
                            : Rgb{clamp8(168 + tint + 20 * t), clamp8(160 + tint + 18 * t), clamp8(146 + tint + 15 * t)};
        for (int x = 0; x < w; ++x) std::copy(c.begin(), c.end(), img.at(x, y));
    }

    paint_box(img, data.noise_band, [&](int, int) -> std::optional<Rgb> {
        return Rgb{clamp8(120 + tint), clamp8(112 + tint), clamp8(104 + tint)};
    });

    for (const auto& q : data.regions) {
        auto single = mask::MaskRaster::zeros(w, h);
        mask::rasterize_quad(q, single);
        const double shade = rng.uniform(-10, 10);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!single.get(x, y)) continue;
                const double g = 8.0 * std::sin(0.07 * x + 0.05 * y);
                std::uint8_t* p = img.at(x, y);
                p[0] = clamp8(170 + shade + g);
                p[1] = clamp8(196 + shade + g);
                p[2] = clamp8(212 + shade + g);
            }
        }
    }

    for (const auto& f : meta.fires) {
        const double cx = f.width() / 2, cy = f.height() / 2;
        paint_box(img, f, [&](int dx, int dy) -> std::optional<Rgb> {
            const double u = (dx + 0.5 - cx) / cx, v = (dy + 0.5 - cy) / cy;
            const double r = std::sqrt(u * u + v * v);
            if (r > 1.0) return std::nullopt;
            return Rgb{clamp8(255 - 50 * r * r), clamp8(235 - 190 * r), clamp8(120 - 110 * r)};
        });
    }

    for (const auto& b : meta.flags) {
        paint_box(img, b, [&](int, int dy) -> std::optional<Rgb> {
            if (dy % 5 >= 3) return Rgb{220, 36, 30};
            return Rgb{246, 244, 240};
        });
    }
    return img;
}

std::vector<eval::Detection> oracle_detector(const SynthDataset& data, const SynthConfig& config) {
    validate(config);
    Rng rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
    const double w = data.config.image_w, h = data.config.image_h;
    auto shake = [&](const BBox& b) {
        BBox out = b;
        if (config.jitter > 0) {
            out.x_min += rng.uniform(-config.jitter, config.jitter);
            out.y_min += rng.uniform(-config.jitter, config.jitter);
            out.x_max += rng.uniform(-config.jitter, config.jitter);
            out.y_max += rng.uniform(-config.jitter, config.jitter);
        }
        out = {round2(std::clamp(out.x_min, 0.0, w)), round2(std::clamp(out.y_min, 0.0, h)),
               round2(std::clamp(out.x_max, 0.0, w)), round2(std::clamp(out.y_max, 0.0, h))};
        if (out.x_max <= out.x_min + 1) out.x_max = out.x_min + 1;
        if (out.y_max <= out.y_min + 1) out.y_max = out.y_min + 1;
        return out;
    };

    std::vector<eval::Detection> out;
    for (const auto& img : data.images) {
        for (const auto& f : img.fires) {
            const double roll = rng.uniform(0, 1);
            const BBox b = shake(f);
            const double conf = round2(rng.uniform(0.55, 0.99));
            if (roll < config.miss_rate) continue;
            out.push_back({img.id, kFireClass, b, conf});
        }
        for (const auto& f : img.flags) {
            const double roll = rng.uniform(0, 1);
            const BBox b = shake(f);
            const double conf = round2(rng.uniform(0.30, 0.90));
            if (roll >= config.noise_fp_rate) continue;
            out.push_back({img.id, kFireClass, b, conf});
        }
    }
    return out;
}

nlohmann::json split_json(const SynthDataset& data) {
    nlohmann::json j = {{"train", nlohmann::json::array()}, {"val", nlohmann::json::array()}, {"test", nlohmann::json::array()}};
    for (const auto& img : data.images) j[std::string(split_name(img.split))].push_back(img.id);
    return j;
}

nlohmann::json flags_json(const SynthDataset& data) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& img : data.images) {
        if (img.flags.empty()) continue;
        auto& arr = j[img.id];
        for (const auto& b : img.flags) arr.push_back({b.x_min, b.y_min, b.x_max, b.y_max});
    }
    return j;
}

nlohmann::json to_json(const SynthConfig& c) {
    return {{"seed", c.seed},
            {"num_images", c.num_images},
            {"image_w", c.image_w},
            {"image_h", c.image_h},
            {"fire_count_range", {c.fire_min, c.fire_max}},
            {"noise_image_fraction", c.noise_image_fraction},
            {"noise_fp_rate", c.noise_fp_rate},
            {"noise_region", c.noise_region},
            {"jitter", c.jitter},
            {"miss_rate", c.miss_rate},
            {"split_fractions", {c.train_fraction, c.val_fraction}}};
}

SynthConfig config_from_json(const nlohmann::json& j, SynthConfig c) {
    try {
        c.seed = j.value("seed", c.seed);
        c.num_images = j.value("num_images", c.num_images);
        c.image_w = j.value("image_w", c.image_w);
        c.image_h = j.value("image_h", c.image_h);
        if (j.contains("fire_count_range")) {
            c.fire_min = j.at("fire_count_range").at(0).get<int>();
            c.fire_max = j.at("fire_count_range").at(1).get<int>();
        }
        c.noise_image_fraction = j.value("noise_image_fraction", c.noise_image_fraction);
        c.noise_fp_rate = j.value("noise_fp_rate", c.noise_fp_rate);
        c.noise_region = j.value("noise_region", c.noise_region);
        c.jitter = j.value("jitter", c.jitter);
        c.miss_rate = j.value("miss_rate", c.miss_rate);
        if (j.contains("split_fractions")) {
            c.train_fraction = j.at("split_fractions").at(0).get<double>();
            c.val_fraction = j.at("split_fractions").at(1).get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad synth config: ") + e.what());
    }
    validate(c);
    return c;
}

}  // namespace ivis::synth
