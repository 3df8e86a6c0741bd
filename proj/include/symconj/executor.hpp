#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace symconj {

/// Fixed-size worker pool running index-parallel loops.
///
/// for_each(count, f) calls f(i) once for every i in [0, count) and returns
/// when all calls are done. Which worker runs which index is unspecified;
/// callers write results into slot i and reduce afterwards. If any call
/// throws, the exception of the lowest failing index is rethrown.
class BranchExecutor {
public:
    explicit BranchExecutor(std::size_t workers = 1) : workers_(std::max<std::size_t>(1, workers)) {
        for (std::size_t t = 1; t < workers_; ++t) threads_.emplace_back([this] { worker_loop(); });
    }

    BranchExecutor(const BranchExecutor&) = delete;
    BranchExecutor& operator=(const BranchExecutor&) = delete;

    ~BranchExecutor() {
        {
            std::lock_guard lock(mutex_);
            stop_ = true;
        }
        wake_.notify_all();
        for (auto& t : threads_) t.join();
    }

    [[nodiscard]] std::size_t workers() const { return workers_; }

    template <class F>
    void for_each(std::size_t count, F&& f) {
        if (count == 0) return;
        if (workers_ == 1 || count == 1) {
            for (std::size_t i = 0; i < count; ++i) f(i);
            return;
        }
        std::lock_guard run_lock(run_mutex_);
        std::vector<std::exception_ptr> errors(count);
        job_ = [&](std::size_t i) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        };
        {
            std::lock_guard lock(mutex_);
            count_.store(count);
            next_.store(0);
            remaining_ = count;
            ++generation_;
        }
        wake_.notify_all();
        drain();
        {
            std::unique_lock lock(mutex_);
            done_.wait(lock, [this] { return remaining_ == 0 && active_ == 0; });
        }
        job_ = nullptr;
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

private:
    void drain() {
        for (;;) {
            const std::size_t i = next_.fetch_add(1);
            if (i >= count_) return;
            job_(i);
            std::lock_guard lock(mutex_);
            if (--remaining_ == 0) done_.notify_all();
        }
    }

    void worker_loop() {
        std::size_t seen = 0;
        for (;;) {
            {
                std::unique_lock lock(mutex_);
                wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
                if (stop_) return;
                seen = generation_;
                // Woke after the loop already finished: nothing left to claim.
                if (remaining_ == 0) continue;
                ++active_;
            }
            drain();
            std::lock_guard lock(mutex_);
            if (--active_ == 0) done_.notify_all();
        }
    }

    std::size_t workers_;
    std::vector<std::thread> threads_;
    std::mutex run_mutex_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    std::function<void(std::size_t)> job_;
    std::atomic<std::size_t> next_{0};
    std::atomic<std::size_t> count_{0};
    std::size_t remaining_ = 0;
    std::size_t active_ = 0;
    std::size_t generation_ = 0;
    bool stop_ = false;
};

}  // namespace symconj
