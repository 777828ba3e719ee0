#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <thread>

#include <httplib.h>

#include "ivis/geometry/scene_json.hpp"
#include "ivis/mask/raster.hpp"
#include "ivis/service/ops.hpp"
#include "ivis/service/server.hpp"
#include "ivis/synth/scene_gen.hpp"

using namespace ivis;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string base64_decode(const std::string& in) {
    static const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    unsigned buf = 0;
    int bits = 0;
    for (char c : in) {
        if (c == '=') break;
        buf = (buf << 6) | static_cast<unsigned>(alphabet.find(c));
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((buf >> bits) & 0xff));
        }
    }
    return out;
}

struct Running {
    fs::path store;
    std::unique_ptr<service::Server> server;
    std::thread thread;
    int port = 0;

    explicit Running(fs::path dir) : store(std::move(dir)) {
        server = std::make_unique<service::Server>(store);
        port = server->bind("127.0.0.1", 0);
        REQUIRE(port > 0);
        thread = std::thread([this] { server->run(); });
        httplib::Client probe("127.0.0.1", port);
        for (int i = 0; i < 200 && !probe.Get("/job/none"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    ~Running() {
        server->stop();
        thread.join();
    }
    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(60, 0);
        return c;
    }
};

fs::path fresh_store(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("ivis_test_service_" + name);
    fs::remove_all(d);
    return d;
}

json poll_job(httplib::Client& c, const std::string& id) {
    for (int i = 0; i < 2000; ++i) {
        const auto r = c.Get("/job/" + id);
        REQUIRE(r);
        REQUIRE(r->status == 200);
        auto j = json::parse(r->body);
        if (j.at("status") == "done" || j.at("status") == "failed") return j;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    FAIL("job did not finish");
    return {};
}

}  // namespace

TEST_CASE("scene store: PUT then GET returns the same bytes, also after a restart") {
    const auto store = fresh_store("store");
    // Odd formatting on purpose: the store must keep bytes, not re-serialize.
    const std::string body = "{ \"plan\" : {\"boundary\": [[0,0],[4,0],[4,3],[0,3]]},\n  \"camera\": {\"position\": [2, 1.5]} }";
    {
        Running srv(store);
        auto c = srv.client();
        const auto put = c.Put("/scene/1", body, "application/json");
        REQUIRE(put);
        CHECK(put->status == 200);
        const auto get = c.Get("/scene/1");
        REQUIRE(get);
        CHECK(get->status == 200);
        CHECK(get->body == body);
        CHECK(c.Get("/scene/2")->status == 404);
        CHECK(c.Post("/scene/2/coverage", "", "application/json")->status == 404);
        CHECK(c.Get("/job/job-99")->status == 404);
    }
    Running again(store);
    auto c = again.client();
    CHECK(c.Get("/scene/1")->body == body);
}

TEST_CASE("invalid scenes are rejected with 422 and detail") {
    Running srv(fresh_store("invalid"));
    auto c = srv.client();
    const auto bad = c.Put("/scene/x", R"({"plan": {"boundary": [[0,0],[0,3],[4,3],[4,0]]}, "camera": {"position": [2, 1]}})",
                           "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 422);
    const auto j = json::parse(bad->body);
    CHECK(j.at("details").size() >= 1);
    CHECK(c.Put("/scene/x", "{oops", "application/json")->status == 422);
    CHECK(c.Get("/scene/x")->status == 404);
}

TEST_CASE("coverage and alignment endpoints") {
    Running srv(fresh_store("coverage"));
    auto c = srv.client();
    const std::string room = R"({"plan": {"boundary": [[0,0],[6,0],[8,3],[5,6],[0,5]]}, "camera": {"position": [3, 3]}})";
    REQUIRE(c.Put("/scene/room", room, "application/json")->status == 200);
    const auto cov = c.Post("/scene/room/coverage", R"({"cell_size": 0.2})", "application/json");
    REQUIRE(cov);
    REQUIRE(cov->status == 200);
    const auto j = json::parse(cov->body);
    CHECK(j.at("summary").at("uncovered_cells") == 0);
    CHECK(j.at("cell_size") == 0.2);

    const auto scene = synth::synth_scene();
    REQUIRE(c.Put("/scene/hall", service::serialize(geo::to_json(scene)), "application/json")->status == 200);
    const auto hall = json::parse(c.Post("/scene/hall/coverage", "", "application/json")->body);
    CHECK(hall.at("summary").at("markers_covered") == 4);
    CHECK(hall == service::coverage_document(scene, geo::kDefaultCellSize));
    const auto al = c.Post("/scene/hall/alignment", "{}", "application/json");
    REQUIRE(al->status == 200);
    const auto aj = json::parse(al->body);
    REQUIRE(aj.at("mirrors").size() == 4);
    for (const auto& m : aj.at("mirrors")) CHECK(m.at("aligned") == true);
    CHECK(c.Post("/scene/hall/coverage", R"({"cell_size": -1})", "application/json")->status == 422);
}

TEST_CASE("optimize job matches a direct planner run; second submission conflicts") {
    Running srv(fresh_store("optimize"));
    auto c = srv.client();
    const auto b = synth::planner_benchmark();
    REQUIRE(c.Put("/scene/bench", service::serialize(geo::to_json(b.scene)), "application/json")->status == 200);
    json mounts = json::array();
    for (const auto& m : b.mounts) mounts.push_back(planner::to_json(m));
    const json request = {{"mounts", mounts}, {"config", {{"max_mirrors", 1}, {"seed", 5}}}};

    const auto sub = c.Post("/scene/bench/optimize", request.dump(), "application/json");
    REQUIRE(sub);
    CHECK(sub->status == 202);
    const auto rec = json::parse(sub->body);
    CHECK(rec.at("kind") == "optimize");
    CHECK_FALSE(rec.contains("result"));
    const auto again = c.Post("/scene/bench/optimize", request.dump(), "application/json");
    CHECK(again->status == 409);

    const auto done = poll_job(c, rec.at("job_id"));
    REQUIRE(done.at("status") == "done");
    planner::PlannerConfig cfg;
    cfg.max_mirrors = 1;
    cfg.seed = 5;
    const auto direct = planner::to_json(planner::optimize(b.scene, b.mounts, cfg));
    CHECK(service::serialize(done.at("result")) == service::serialize(direct));
    CHECK(done.at("result").at("metrics").at("coverage_fraction").get<double>() >= 0.95);

    // The scene is free again once the job has finished.
    const auto third = c.Post("/scene/bench/optimize", request.dump(), "application/json");
    CHECK(third->status == 202);
    srv.server->wait_for_jobs();
    CHECK(c.Post("/scene/bench/optimize", R"({"config": {}})", "application/json")->status == 422);
}

TEST_CASE("mask preview carries the projected quads and the mask") {
    Running srv(fresh_store("preview"));
    auto c = srv.client();
    const auto scene = synth::synth_scene();
    REQUIRE(c.Put("/scene/hall", geo::to_json(scene).dump(), "application/json")->status == 200);
    const auto r = c.Post("/scene/hall/mask-preview", "", "application/json");
    REQUIRE(r);
    REQUIRE(r->status == 200);
    const auto j = json::parse(r->body);
    CHECK(j.at("regions").size() == 4);
    const auto img = mask::decode_pnm(base64_decode(j.at("mask_pgm_base64").get<std::string>()));
    const auto expect = mask::generate_mask(mask::project_all_mirrors(scene), scene.camera.image_w, scene.camera.image_h);
    CHECK(mask::mask_from_image(img) == expect);
    CHECK(j.at("masked_pixels") == expect.popcount());
}

TEST_CASE("concurrent requests") {
    Running srv(fresh_store("concurrent"));
    {
        auto c = srv.client();
        REQUIRE(c.Put("/scene/hall", geo::to_json(synth::synth_scene()).dump(), "application/json")->status == 200);
    }
    const auto expect = service::serialize(service::coverage_document(synth::synth_scene(), 0.2));
    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int t = 0; t < 6; ++t) {
        threads.emplace_back([&] {
            auto c = srv.client();
            const auto r = c.Post("/scene/hall/coverage", R"({"cell_size": 0.2})", "application/json");
            if (r && r->status == 200 && r->body == expect) ++ok;
        });
    }
    for (auto& t : threads) t.join();
    CHECK(ok == 6);
}
