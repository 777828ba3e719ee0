#pragma once

#include <filesystem>
#include <memory>
#include <string>

namespace ivis::service {

// HTTP front end over a directory of scene files (<id>.json) and an in-memory
// job table. Optimize requests run as background jobs, one per scene at a time.
//
//   PUT  /scene/{id}               store the body verbatim after validation
//   GET  /scene/{id}               stored bytes
//   POST /scene/{id}/coverage      {"cell_size"?} -> coverage grid
//   POST /scene/{id}/alignment     {"cell_size"?} -> alignment report
//   POST /scene/{id}/optimize      {"mounts", "config"?} -> job record (202)
//   GET  /job/{id}                 job record, with "result" once done
//   POST /scene/{id}/mask-preview  projected quads and base64 PGM mask
class Server {
public:
    explicit Server(std::filesystem::path store);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Port 0 picks a free port. Returns the bound port, or -1.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    void run();
    void stop();
    // Blocks until every submitted job has finished.
    void wait_for_jobs();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ivis::service
