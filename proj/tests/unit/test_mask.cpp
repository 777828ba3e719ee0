#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "ivis/error.hpp"
#include "ivis/mask/pipeline.hpp"
#include "ivis/synth/scene_gen.hpp"

using namespace ivis;
using namespace ivis::mask;
using geo::Point2;
namespace fs = std::filesystem;

namespace {

// Pixel-center membership by brute force: strictly on the inner side of all
// four edges (test quads use non-integer corners, so no center sits on an edge).
bool center_in(const QuadRegion& q, int x, int y) {
    const Point2 c{x + 0.5, y + 0.5};
    int pos = 0, neg = 0;
    for (int k = 0; k < 4; ++k) {
        const Point2 a = q.corners[k], b = q.corners[(k + 1) % 4];
        const double s = geo::cross(b - a, c - a);
        pos += s > 0;
        neg += s < 0;
    }
    return pos == 4 || neg == 4;
}

QuadRegion random_quad(std::mt19937_64& rng, double cx, double cy, double r) {
    std::uniform_real_distribution<double> jit(-0.3, 0.3);
    QuadRegion q;
    const double base = std::uniform_real_distribution<double>(0, 1.5)(rng);
    for (int k = 0; k < 4; ++k) {
        const double th = base + k * M_PI / 2 + jit(rng);
        const double rr = r * (0.6 + 0.4 * std::uniform_real_distribution<double>(0, 1)(rng));
        q.corners[k] = {cx + rr * std::cos(th) + 0.123, cy + rr * std::sin(th) + 0.377};
    }
    return q;
}

ImageBuffer noise_image(int w, int h, int ch, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto img = ImageBuffer::zeros(w, h, ch);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);
    return img;
}

fs::path temp_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("ivis_test_mask_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

QuadRegion rect_quad(double x0, double y0, double x1, double y1) {
    QuadRegion q;
    q.corners = {Point2{x0, y0}, Point2{x1, y0}, Point2{x1, y1}, Point2{x0, y1}};
    return q;
}

}  // namespace

TEST_CASE("rasterization matches per-pixel brute force") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const auto q = random_quad(rng, 20 + trial % 7, 15, 4 + trial % 13);
        auto m = MaskRaster::zeros(48, 36);
        rasterize_quad(q, m);
        for (int y = 0; y < 36; ++y) {
            for (int x = 0; x < 48; ++x) CHECK(static_cast<bool>(m.get(x, y)) == center_in(q, x, y));
        }
    }
}

TEST_CASE("empty regions give an all-zero mask, a full-frame quad an all-one mask") {
    CHECK(generate_mask({}, 64, 48).popcount() == 0);
    const auto full = generate_mask({rect_quad(-1, -1, 65, 49)}, 64, 48);
    CHECK(full.popcount() == 64u * 48u);
}

TEST_CASE("disjoint quads: popcount is the sum of the parts") {
    std::mt19937_64 rng(22);
    const auto a = random_quad(rng, 15, 15, 8);
    const auto b = random_quad(rng, 45, 20, 9);
    const auto ma = generate_mask({a}, 64, 40);
    const auto mb = generate_mask({b}, 64, 40);
    std::size_t brute = 0;
    for (int y = 0; y < 40; ++y) {
        for (int x = 0; x < 64; ++x) brute += center_in(a, x, y) + center_in(b, x, y);
    }
    CHECK(generate_mask({a, b}, 64, 40).popcount() == ma.popcount() + mb.popcount());
    CHECK(ma.popcount() + mb.popcount() == brute);
}

TEST_CASE("quads sharing an edge through pixel centers never both claim a pixel") {
    // Split a 10x10 block along its diagonal-ish line through pixel centers.
    QuadRegion left, right;
    left.corners = {Point2{0, 0}, Point2{4.5, 0}, Point2{6.5, 10}, Point2{0, 10}};
    right.corners = {Point2{4.5, 0}, Point2{10, 0}, Point2{10, 10}, Point2{6.5, 10}};
    const auto ml = generate_mask({left}, 10, 10);
    const auto mr = generate_mask({right}, 10, 10);
    CHECK(ml.popcount() + mr.popcount() == 100);
    for (std::size_t i = 0; i < 100; ++i) CHECK((ml.bits[i] && mr.bits[i]) == false);
}

TEST_CASE("quads hanging off the frame are clipped") {
    const auto m = generate_mask({rect_quad(-10.2, -10.2, 5.2, 3.2)}, 8, 8);
    CHECK(m.popcount() == 5u * 3u);
}

TEST_CASE("blend") {
    for (int ch : {1, 3}) {
        const auto img = noise_image(33, 17, ch, 5 + ch);
        auto ones = MaskRaster::zeros(33, 17);
        std::fill(ones.bits.begin(), ones.bits.end(), 1);
        CHECK(blend(img, ones) == img);
        CHECK(blend(img, MaskRaster::zeros(33, 17)) == ImageBuffer::zeros(33, 17, ch));

        auto half = MaskRaster::zeros(33, 17);
        for (int y = 0; y < 17; ++y) {
            for (int x = 0; x < 16; ++x) half.bits[y * 33 + x] = 1;
        }
        const auto out = blend(img, half);
        for (int y = 0; y < 17; ++y) {
            for (int x = 0; x < 33; ++x) {
                for (int c = 0; c < ch; ++c) CHECK(out.at(x, y)[c] == (x < 16 ? img.at(x, y)[c] : 0));
            }
        }
        CHECK_THROWS_AS(blend(img, MaskRaster::zeros(32, 17)), ValidationError);
    }
}

TEST_CASE("PNM round trip and header parsing") {
    for (int ch : {1, 3}) {
        const auto img = noise_image(13, 7, ch, 9);
        const auto bytes = encode_pnm(img);
        CHECK(bytes.rfind(ch == 1 ? "P5\n" : "P6\n", 0) == 0);
        CHECK(decode_pnm(bytes) == img);
    }
    const std::string commented = std::string("P5\n# made by hand\n2 1\n# depth\n255\n") + '\x07' + '\xff';
    const auto g = decode_pnm(commented);
    CHECK(g.width == 2);
    CHECK(g.pixels == std::vector<std::uint8_t>{7, 255});
    CHECK_THROWS_AS(decode_pnm("P5\n2 1\n65535\n...."), ValidationError);
    CHECK_THROWS_AS(decode_pnm("P5\n4 4\n255\nab"), ValidationError);
    CHECK_THROWS_AS(decode_pnm("P3\n1 1\n255\n0 0 0"), ValidationError);

    const auto dir = temp_dir("pnm");
    const auto m = generate_mask({rect_quad(1.2, 1.2, 6.6, 4.4)}, 9, 6);
    write_mask(m, dir / "m.pgm");
    CHECK(read_mask(dir / "m.pgm") == m);
    CHECK_THROWS_AS(read_pnm(dir / "missing.ppm"), IoError);
}

TEST_CASE("ablation switches") {
    const auto dir = temp_dir("ablation");
    write_text(dir / "quads.json", R"([{"corners": [[10.2, 5.1], [40.7, 5.3], [41.2, 30.4], [9.8, 29.9]]}])");
    const RegionSource src = AnnotationSource{dir / "quads.json"};
    const auto img = noise_image(64, 48, 3, 77);

    const auto full = run_pipeline(img, "a", src, {true, true, true});
    REQUIRE(full.mask);
    CHECK(full.mask->popcount() > 0);
    CHECK(full.image == blend(img, *full.mask));

    const auto no_mb = run_pipeline(img, "a", src, {true, true, false});
    CHECK(no_mb.image == img);
    CHECK_FALSE(no_mb.mask);
    const auto no_tmg = run_pipeline(img, "a", src, {true, false, true});
    CHECK(no_tmg.image == img);
    CHECK_FALSE(no_tmg.mask);
    CHECK(encode_pnm(no_tmg.image) == encode_pnm(img));

    const auto no_ivr = run_pipeline(img, "a", src, {false, true, true});
    CHECK(no_ivr.image == ImageBuffer::zeros(64, 48, 3));
    REQUIRE(no_ivr.mask);
    CHECK(no_ivr.mask->popcount() == 0);
}

TEST_CASE("annotation sources") {
    const auto dir = temp_dir("annotations");
    const std::string four = R"([
      {"corners": [[1.5, 1.5], [9.5, 1.5], [9.5, 9.5], [1.5, 9.5]], "mirror_id": 1},
      {"corners": [[11.5, 1.5], [19.5, 1.5], [19.5, 9.5], [11.5, 9.5]], "mirror_id": 2},
      {"corners": [[1.5, 11.5], [9.5, 11.5], [9.5, 19.5], [1.5, 19.5]], "mirror_id": 3},
      {"corners": [[11.5, 11.5], [19.5, 11.5], [19.5, 19.5], [11.5, 19.5]], "mirror_id": 4}])";
    write_text(dir / "four.json", four);
    write_text(dir / "empty.json", "[]");
    const auto quads = identify_regions("x", AnnotationSource{dir / "four.json"});
    REQUIRE(quads.size() == 4);
    CHECK(quads[3].mirror_id == 4);
    CHECK(identify_regions("x", AnnotationSource{dir / "empty.json"}).empty());

    write_text(dir / "keyed.json", R"({"img_1": [{"corners": [[1.5, 1.5], [9.5, 1.5], [9.5, 9.5], [1.5, 9.5]]}]})");
    CHECK(identify_regions("img_1", AnnotationSource{dir / "keyed.json"}).size() == 1);
    CHECK_THROWS_AS(identify_regions("img_2", AnnotationSource{dir / "keyed.json"}), RegionSourceError);

    fs::create_directories(dir / "per_image");
    write_text(dir / "per_image" / "img_7.json", four);
    CHECK(identify_regions("img_7", AnnotationSource{dir / "per_image"}).size() == 4);
    CHECK_THROWS_AS(identify_regions("img_8", AnnotationSource{dir / "per_image"}), RegionSourceError);
    CHECK_THROWS_AS(identify_regions("x", AnnotationSource{dir / "nope.json"}), RegionSourceError);

    write_text(dir / "bent.json", R"([{"corners": [[0, 0], [10, 0], [2, 2], [0, 10]]}])");
    CHECK_THROWS_AS(identify_regions("x", AnnotationSource{dir / "bent.json"}), ValidationError);
}

TEST_CASE("adapter source filters by image and score") {
    const auto dir = temp_dir("adapter");
    write_text(dir / "r.jsonl",
               "{\"image_id\": \"a\", \"quad\": [[1.5,1.5],[9.5,1.5],[9.5,9.5],[1.5,9.5]], \"score\": 0.9}\n"
               "{\"image_id\": \"a\", \"quad\": [[11.5,1.5],[19.5,1.5],[19.5,9.5],[11.5,9.5]], \"score\": 0.2}\n"
               "\n"
               "{\"image_id\": \"b\", \"quad\": [[1.5,1.5],[9.5,1.5],[9.5,9.5],[1.5,9.5]], \"mirror_id\": 3}\n");
    CHECK(identify_regions("a", AdapterSource{dir / "r.jsonl", 0.0}).size() == 2);
    CHECK(identify_regions("a", AdapterSource{dir / "r.jsonl", 0.5}).size() == 1);
    const auto b = identify_regions("b", AdapterSource{dir / "r.jsonl", 0.5});
    REQUIRE(b.size() == 1);
    CHECK(b[0].mirror_id == 3);
    CHECK(identify_regions("c", AdapterSource{dir / "r.jsonl", 0.0}).empty());
}

TEST_CASE("quad validation") {
    CHECK_NOTHROW(validate(rect_quad(0, 0, 5, 5), 10, 10));
    CHECK_THROWS_AS(validate(rect_quad(0, 0, 5, 0)), ValidationError);
    CHECK_THROWS_AS(validate(rect_quad(0, 0, 50, 5), 10, 10), ValidationError);
    QuadRegion bow;
    bow.corners = {Point2{0, 0}, Point2{5, 5}, Point2{5, 0}, Point2{0, 5}};
    CHECK_THROWS_AS(validate(bow), ValidationError);
    QuadRegion nan = rect_quad(0, 0, 5, 5);
    nan.corners[2].x = std::nan("");
    CHECK_THROWS_AS(validate(nan), ValidationError);
}

namespace {

// Hand-rolled pinhole: forward tilted down by pitch, right = forward x up-axis.
Point2 pinhole(const geo::Camera& c, Point2 p, double z) {
    const double fx = std::cos(c.yaw) * std::cos(c.pitch), fy = std::sin(c.yaw) * std::cos(c.pitch);
    const double fz = -std::sin(c.pitch);
    const double rx = std::sin(c.yaw), ry = -std::cos(c.yaw);
    const double ux = ry * fz, uy = -rx * fz, uz = rx * fy - ry * fx;
    const double dx = p.x - c.position.x, dy = p.y - c.position.y, dz = z - c.height;
    const double depth = dx * fx + dy * fy + dz * fz;
    return {c.image_w / 2.0 + c.focal * (dx * rx + dy * ry) / depth,
            c.image_h / 2.0 - c.focal * (dx * ux + dy * uy + dz * uz) / depth};
}

geo::Scene axis_scene() {
    geo::Scene s;
    s.plan.boundary = {{-5, -5}, {15, -5}, {15, 5}, {-5, 5}};
    s.camera.position = {0, 0};
    s.camera.yaw = 0;
    s.camera.pitch = 0.1;
    s.camera.height = 2.5;
    s.camera.focal = 500;
    s.mirrors.push_back(geo::make_mirror(1, {8, 0}, geo::kPi, 1.0, 1.0, 1.8, {}));
    return s;
}

}  // namespace

TEST_CASE("projection: mirror on the optical axis is horizontally centered") {
    const auto s = axis_scene();
    const auto q = project_mirror_to_image(s, 1);
    REQUIRE(q);
    CHECK(q->corners[0].x + q->corners[1].x == doctest::Approx(640.0));
    CHECK(q->corners[2].x + q->corners[3].x == doctest::Approx(640.0));
    CHECK(q->corners[0].y == doctest::Approx(q->corners[1].y));
    CHECK(q->corners[3].y < q->corners[0].y);  // top edge above the bottom edge
}

TEST_CASE("projection: yawing the camera right shifts the quad left by the pinhole amount") {
    auto s = axis_scene();
    s.camera.yaw = -10.0 * geo::kPi / 180.0;
    const auto q = project_mirror_to_image(s, 1);
    REQUIRE(q);
    const auto* m = s.find_mirror(1);
    const Point2 expect[4] = {pinhole(s.camera, m->segment.a, m->z_bottom), pinhole(s.camera, m->segment.b, m->z_bottom),
                              pinhole(s.camera, m->segment.b, m->z_top), pinhole(s.camera, m->segment.a, m->z_top)};
    for (int k = 0; k < 4; ++k) {
        CHECK(q->corners[k].x == doctest::Approx(expect[k].x).epsilon(1e-9));
        CHECK(q->corners[k].y == doctest::Approx(expect[k].y).epsilon(1e-9));
    }
    const auto centered = project_mirror_to_image(axis_scene(), 1);
    CHECK(q->corners[0].x < centered->corners[0].x);
}

TEST_CASE("projection: mirrors behind the camera") {
    auto s = axis_scene();
    s.camera.yaw = geo::kPi;
    CHECK_FALSE(project_mirror_to_image(s, 1));
    CHECK(identify_regions("any", ProjectionSource{s}).empty());
    CHECK_THROWS_AS(project_mirror_to_image(s, 42), InvalidArgument);
}

TEST_CASE("projection source on the synth scene gives four disjoint quads") {
    const auto s = synth::synth_scene();
    const auto quads = identify_regions("img", ProjectionSource{s});
    REQUIRE(quads.size() == 4);
    std::size_t sum = 0;
    for (const auto& q : quads) sum += generate_mask({q}, 640, 480).popcount();
    CHECK(generate_mask(quads, 640, 480).popcount() == sum);
}

TEST_CASE("mask cache reuses masks for a fixed source and notices edits") {
    const auto dir = temp_dir("cache");
    write_text(dir / "q.json", R"([{"corners": [[1.5, 1.5], [9.5, 1.5], [9.5, 9.5], [1.5, 9.5]]}])");
    MaskCache cache;
    const RegionSource proj = ProjectionSource{synth::synth_scene()};
    const auto a = cache.get(proj, "img_0", 640, 480);
    const auto b = cache.get(proj, "img_1", 640, 480);
    CHECK(a == b);
    CHECK(cache.misses() == 1);

    const RegionSource ann = AnnotationSource{dir / "q.json"};
    CHECK(cache.get(ann, "x", 20, 20).popcount() == 64);
    write_text(dir / "q.json", R"([{"corners": [[1.5, 1.5], [5.5, 1.5], [5.5, 5.5], [1.5, 5.5]], "mirror_id": 2}])");
    CHECK(cache.get(ann, "x", 20, 20).popcount() == 16);
}
