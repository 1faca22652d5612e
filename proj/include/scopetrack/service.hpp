#pragma once

#include "scopetrack/store.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace scopetrack {

/// Directory of project files, one `<procedure_id>.json` per procedure.
///
/// Writes to one procedure are serialized and persisted before they become
/// visible; writes to different procedures proceed independently. Readers get
/// an immutable snapshot of the last persisted state.
class ProcedureStore {
public:
    using Clock = std::function<std::string()>;

    explicit ProcedureStore(std::filesystem::path data_dir, Clock clock = utc_timestamp_now);

    ProcedureStore(const ProcedureStore&) = delete;
    ProcedureStore& operator=(const ProcedureStore&) = delete;

    [[nodiscard]] const std::filesystem::path& data_dir() const noexcept { return data_dir_; }
    [[nodiscard]] std::filesystem::path path_for(const std::string& procedure_id) const;

    /// Sorted procedure ids present on disk.
    [[nodiscard]] std::vector<std::string> list() const;

    /// Throws UnknownProcedure.
    [[nodiscard]] std::shared_ptr<const ProjectFile> get(const std::string& procedure_id);

    /// Throws ProcedureExists.
    std::shared_ptr<const ProjectFile> create(Timeline timeline);

    /// Applies `change` to a copy of the current project and saves it. When
    /// `expected_revision` is given and differs from the stored revision,
    /// throws RevisionConflict without calling `change`.
    std::shared_ptr<const ProjectFile> mutate(const std::string& procedure_id,
                                              std::optional<std::int64_t> expected_revision,
                                              const std::function<void(ProjectFile&)>& change);

    /// Procedure ids are restricted to [A-Za-z0-9_.-] so they map to file names.
    [[nodiscard]] static bool valid_id(const std::string& procedure_id);

private:
    struct Entry {
        std::mutex write;
        std::mutex snapshot_guard;
        std::shared_ptr<const ProjectFile> snapshot;
    };

    Entry& entry(const std::string& procedure_id);
    std::shared_ptr<const ProjectFile> load_snapshot(const std::string& procedure_id, Entry& e);

    std::filesystem::path data_dir_;
    Clock clock_;
    std::mutex entries_guard_;
    std::map<std::string, std::unique_ptr<Entry>> entries_;
};

struct ServiceConfig {
    std::string host = "127.0.0.1";
    /// 0 picks a free port.
    int port = 8080;
    std::filesystem::path data_dir;
    ProcedureStore::Clock clock = utc_timestamp_now;
};

/// HTTP front end over a ProcedureStore. See README for the route table.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds the listening socket and returns the bound port. Throws BindFailure.
    int bind();
    /// Serves until stop(); call bind() first.
    void run();
    void stop();
    void wait_until_ready() const;

    [[nodiscard]] ProcedureStore& store() noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace scopetrack
