#include "ivis/service/server.hpp"

#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <httplib.h>

#include "ivis/error.hpp"
#include "ivis/geometry/scene_json.hpp"
#include "ivis/service/ops.hpp"

namespace ivis::service {

using nlohmann::json;

namespace {

enum class JobStatus { pending, running, done, failed };

const char* status_name(JobStatus s) {
    switch (s) {
        case JobStatus::pending: return "pending";
        case JobStatus::running: return "running";
        case JobStatus::done: return "done";
        case JobStatus::failed: return "failed";
    }
    return "failed";
}

struct Job {
    std::string id;
    std::string scene_id;
    JobStatus status = JobStatus::pending;
    json result;
    std::string error;
};

json record(const Job& job) {
    json j = {{"job_id", job.id}, {"kind", "optimize"}, {"scene_id", job.scene_id}, {"status", status_name(job.status)}};
    if (job.status == JobStatus::done) j["result"] = job.result;
    if (job.status == JobStatus::failed) j["error"] = job.error;
    return j;
}

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(serialize(body), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) {
    json body = {{"error", message}};
    if (status == 422) body["details"] = json::array({message});
    reply(res, status, body);
}

json body_json(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    return json::parse(req.body);
}

double cell_size_of(const json& body) {
    return body.is_object() && body.contains("cell_size") ? body.at("cell_size").get<double>()
                                                          : geo::kDefaultCellSize;
}

}  // namespace

struct Server::Impl {
    std::filesystem::path store;
    httplib::Server http;

    std::mutex store_mu;
    std::mutex jobs_mu;
    std::condition_variable jobs_cv;
    std::map<std::string, Job> jobs;
    std::vector<std::thread> workers;
    std::size_t next_job = 1;
    std::size_t active = 0;

    std::filesystem::path scene_path(const std::string& id) const { return store / (id + ".json"); }

    std::optional<std::string> read_scene(const std::string& id) {
        std::lock_guard lock(store_mu);
        std::ifstream in(scene_path(id), std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write_scene(const std::string& id, const std::string& bytes) {
        std::lock_guard lock(store_mu);
        const auto path = scene_path(id);
        auto tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot write " + tmp.string());
            out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
            if (!out) throw IoError("cannot write " + tmp.string());
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec) throw IoError("cannot store scene " + id + ": " + ec.message());
    }

    // Runs `fn` on the stored, validated scene; maps failures to status codes.
    template <typename Fn>
    void with_scene(const httplib::Request& req, httplib::Response& res, Fn fn) {
        const std::string id = req.matches[1];
        const auto bytes = read_scene(id);
        if (!bytes) return fail(res, 404, "unknown scene " + id);
        try {
            const auto scene = geo::parse_scene(*bytes);
            fn(id, scene);
        } catch (const json::exception& e) {
            fail(res, 422, e.what());
        } catch (const ValidationError& e) {
            fail(res, 422, e.what());
        }
    }

    void submit(httplib::Response& res, const std::string& scene_id, const geo::Scene& scene, PlanRequest request) {
        std::lock_guard lock(jobs_mu);
        for (const auto& [_, job] : jobs) {
            if (job.scene_id == scene_id && (job.status == JobStatus::pending || job.status == JobStatus::running)) {
                return reply(res, 409, {{"error", "optimize already in progress for scene " + scene_id},
                                        {"job_id", job.id}});
            }
        }
        Job job;
        job.id = "job-" + std::to_string(next_job++);
        job.scene_id = scene_id;
        jobs[job.id] = job;
        ++active;
        workers.emplace_back([this, id = job.id, scene, request = std::move(request)] {
            {
                std::lock_guard l(jobs_mu);
                jobs[id].status = JobStatus::running;
            }
            json result;
            std::string error;
            try {
                result = plan_document(scene, request.mounts, request.config);
            } catch (const std::exception& e) {
                error = e.what();
            }
            std::lock_guard l(jobs_mu);
            auto& j = jobs[id];
            if (error.empty()) {
                j.result = std::move(result);
                j.status = JobStatus::done;
            } else {
                j.error = error;
                j.status = JobStatus::failed;
            }
            --active;
            jobs_cv.notify_all();
        });
        reply(res, 202, record(jobs[job.id]));
    }

    void routes() {
        http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
        http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });

        http.Put(R"(/scene/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            try {
                geo::parse_scene(req.body);
            } catch (const json::exception& e) {
                return fail(res, 422, e.what());
            } catch (const ValidationError& e) {
                return fail(res, 422, e.what());
            }
            write_scene(id, req.body);
            reply(res, 200, {{"id", id}, {"bytes", req.body.size()}});
        });

        http.Get(R"(/scene/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            const auto bytes = read_scene(id);
            if (!bytes) return fail(res, 404, "unknown scene " + id);
            res.set_content(*bytes, "application/json");
        });

        http.Post(R"(/scene/([A-Za-z0-9_-]+)/coverage)", [this](const httplib::Request& req, httplib::Response& res) {
            with_scene(req, res, [&](const std::string&, const geo::Scene& scene) {
                reply(res, 200, coverage_document(scene, cell_size_of(body_json(req))));
            });
        });

        http.Post(R"(/scene/([A-Za-z0-9_-]+)/alignment)", [this](const httplib::Request& req, httplib::Response& res) {
            with_scene(req, res, [&](const std::string&, const geo::Scene& scene) {
                reply(res, 200, alignment_document(scene, cell_size_of(body_json(req))));
            });
        });

        http.Post(R"(/scene/([A-Za-z0-9_-]+)/optimize)", [this](const httplib::Request& req, httplib::Response& res) {
            with_scene(req, res, [&](const std::string& id, const geo::Scene& scene) {
                submit(res, id, scene, plan_request_from_json(body_json(req)));
            });
        });

        http.Post(R"(/scene/([A-Za-z0-9_-]+)/mask-preview)",
                  [this](const httplib::Request& req, httplib::Response& res) {
                      with_scene(req, res, [&](const std::string&, const geo::Scene& scene) {
                          reply(res, 200, mask_preview(scene));
                      });
                  });

        http.Get(R"(/job/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            std::lock_guard lock(jobs_mu);
            const auto it = jobs.find(id);
            if (it == jobs.end()) return fail(res, 404, "unknown job " + id);
            reply(res, 200, record(it->second));
        });

        http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                fail(res, 500, e.what());
            } catch (...) {
                fail(res, 500, "internal error");
            }
        });
        http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty()) reply(res, res.status, {{"error", httplib::status_message(res.status)}});
        });
    }
};

Server::Server(std::filesystem::path store) : impl_(std::make_unique<Impl>()) {
    std::error_code ec;
    std::filesystem::create_directories(store, ec);
    if (!std::filesystem::is_directory(store)) throw IoError("scene store is not a directory: " + store.string());
    impl_->store = std::move(store);
    impl_->routes();
}

Server::~Server() {
    stop();
    for (auto& t : impl_->workers) {
        if (t.joinable()) t.join();
    }
}

int Server::bind(const std::string& host, int port) {
    if (port == 0) return impl_->http.bind_to_any_port(host);
    return impl_->http.bind_to_port(host, port) ? port : -1;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::stop() {
    if (impl_->http.is_running()) impl_->http.stop();
}

void Server::wait_for_jobs() {
    std::unique_lock lock(impl_->jobs_mu);
    impl_->jobs_cv.wait(lock, [this] { return impl_->active == 0; });
}

}  // namespace ivis::service
