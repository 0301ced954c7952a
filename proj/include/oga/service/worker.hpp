#pragma once

#include <oga/analysis.hpp>
#include <oga/archive/store.hpp>
#include <oga/layout.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace oga::service {

struct WorkerConfig {
    analysis::AnalysisConfig analysis;
    /// Graphs with more nodes get properties but no layout or drawing.
    std::size_t layout_node_limit = 5000;
    int layout_iterations = layout::default_iterations;
    std::size_t threads = 1;
    std::chrono::milliseconds idle_poll{250};
};

/// What one job did, for logging and tests.
struct JobOutcome {
    archive::GraphId id;
    archive::Status status = archive::Status::pending_analysis;
    bool layout = false;
    std::string message;
};

/// Analyzes one record and stores properties, layout and drawing together.
/// Safe to repeat: a record that is no longer pending is left alone, and the
/// computation is deterministic, so a re-run converges to the same state.
inline JobOutcome process_record(archive::Archive& store, const archive::GraphId& id, const WorkerConfig& cfg) {
    JobOutcome out{id, archive::Status::pending_analysis, false, {}};
    archive::GraphRecord record;
    try {
        record = store.get_record(id);
    } catch (const archive::NotFound&) {
        out.message = "record vanished";
        return out;
    }
    out.status = record.status;
    if (record.deleted_at || record.status != archive::Status::pending_analysis) return out;
    try {
        auto props = analysis::analyze(record.canonical, cfg.analysis);
        std::optional<layout::Layout> drawing;
        std::optional<std::string> svg;
        if (record.canonical.node_count() <= cfg.layout_node_limit) {
            drawing = layout::layout_force_directed(record.canonical, cfg.layout_iterations, 0);
            svg = layout::render_svg(record.canonical, *drawing);
        }
        store.complete_analysis(id, props, drawing, svg);
        out.status = props.analysis_skipped ? archive::Status::analysis_skipped : archive::Status::analyzed;
        out.layout = drawing.has_value();
    } catch (const archive::Gone&) {
        out.message = "record deleted during analysis";
    } catch (const std::exception& ex) {
        store.mark_analysis_failed(id, ex.what());
        out.status = archive::Status::analysis_failed;
        out.message = ex.what();
    }
    return out;
}

/// Pool of threads draining the archive's job queue. Jobs are removed only
/// after they finished, so a crash leads to at-least-once execution.
class Worker {
public:
    Worker(archive::Archive& store, WorkerConfig cfg) : store_(store), cfg_(std::move(cfg)) {}
    Worker(const Worker&) = delete;
    Worker& operator=(const Worker&) = delete;
    ~Worker() { stop(); }

    void start() {
        if (running_.exchange(true)) return;
        for (std::size_t i = 0; i < std::max<std::size_t>(1, cfg_.threads); ++i) threads_.emplace_back([this] { loop(); });
    }

    void stop() {
        if (!running_.exchange(false)) return;
        wake_.notify_all();
        for (auto& t : threads_) t.join();
        threads_.clear();
    }

    /// Wakes idle threads after a job was queued.
    void notify() { wake_.notify_all(); }

    /// Processes queued jobs on the calling thread until the queue is empty.
    std::size_t drain() {
        std::size_t done = 0;
        while (auto job = store_.claim_job()) {
            if (!run(*job)) break;
            ++done;
        }
        return done;
    }

    void on_job(std::function<void(const JobOutcome&)> callback) { callback_ = std::move(callback); }

    std::size_t processed() const noexcept { return processed_; }

private:
    /// False when the job went back to the queue.
    bool run(const archive::Job& job) {
        JobOutcome outcome;
        try {
            outcome = process_record(store_, job.graph_id, cfg_);
        } catch (const std::exception& ex) {
            // Storage trouble: leave the job for a later attempt.
            outcome.id = job.graph_id;
            outcome.message = ex.what();
            store_.release_job(job.seq);
            if (callback_) callback_(outcome);
            return false;
        }
        store_.complete_job(job.seq);
        ++processed_;
        if (callback_) callback_(outcome);
        return true;
    }

    void loop() {
        while (running_) {
            std::optional<archive::Job> job;
            try {
                job = store_.claim_job();
            } catch (const std::exception&) {
                job.reset();
            }
            if (job && run(*job)) continue;
            std::unique_lock lock(mutex_);
            wake_.wait_for(lock, cfg_.idle_poll, [this] { return !running_; });
        }
    }

    archive::Archive& store_;
    WorkerConfig cfg_;
    std::atomic<bool> running_{false};
    std::atomic<std::size_t> processed_{0};
    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::function<void(const JobOutcome&)> callback_;
};

} // namespace oga::service
