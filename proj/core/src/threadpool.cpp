#include "cife/threadpool.hpp"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <vector>

namespace cife {
namespace {

class Pool {
  public:
    static Pool& instance() {
        static Pool p;
        return p;
    }

    int threads() const { return n_threads_; }

    void resize(int n) {
        if (n < 1) n = 1;
        std::lock_guard<std::mutex> api_lock(api_mu_);
        if (n == n_threads_) return;
        shutdown();
        n_threads_ = n;
        if (n_threads_ > 1) start();
    }

    // fn(chunk) for chunk in [0, chunks); caller thread participates.
    void run(int chunks, const std::function<void(int)>& fn) {
        std::lock_guard<std::mutex> api_lock(api_mu_);
        if (n_threads_ <= 1 || chunks <= 1) {
            for (int c = 0; c < chunks; ++c) fn(c);
            return;
        }
        {
            std::lock_guard<std::mutex> lk(mu_);
            job_ = &fn;
            next_chunk_.store(0, std::memory_order_relaxed);
            pending_ = chunks;
            total_chunks_ = chunks;
            ++generation_;
        }
        cv_.notify_all();
        work_loop();
        std::unique_lock<std::mutex> lk(mu_);
        done_cv_.wait(lk, [&] { return pending_ == 0; });
        job_ = nullptr;
    }

  private:
    void start() {
        stop_ = false;
        for (int i = 0; i < n_threads_ - 1; ++i) {
            workers_.emplace_back([this] {
                uint64_t seen = 0;
                for (;;) {
                    {
                        std::unique_lock<std::mutex> lk(mu_);
                        cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
                        if (stop_) return;
                        seen = generation_;
                    }
                    work_loop();
                }
            });
        }
    }

    void work_loop() {
        for (;;) {
            int c = next_chunk_.fetch_add(1, std::memory_order_relaxed);
            if (c >= total_chunks_) return;
            (*job_)(c);
            std::lock_guard<std::mutex> lk(mu_);
            if (--pending_ == 0) done_cv_.notify_all();
        }
    }

    void shutdown() {
        if (workers_.empty()) return;
        {
            std::lock_guard<std::mutex> lk(mu_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& w : workers_) w.join();
        workers_.clear();
    }

    ~Pool() { shutdown(); }

    std::mutex api_mu_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::condition_variable done_cv_;
    std::vector<std::thread> workers_;
    const std::function<void(int)>* job_ = nullptr;
    std::atomic<int> next_chunk_{0};
    int total_chunks_ = 0;
    int pending_ = 0;
    uint64_t generation_ = 0;
    bool stop_ = false;
    int n_threads_ = 1;
};

}  // namespace

int pool_threads() { return Pool::instance().threads(); }

void set_pool_threads(int n) { Pool::instance().resize(n); }

void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& fn) {
    if (n <= 0) return;
    int t = Pool::instance().threads();
    if (t <= 1 || n < 256) {
        fn(0, n);
        return;
    }
    int chunks = t;
    int64_t per = (n + chunks - 1) / chunks;
    Pool::instance().run(chunks, [&](int c) {
        int64_t lo = c * per;
        int64_t hi = std::min<int64_t>(n, lo + per);
        if (lo < hi) fn(lo, hi);
    });
}

}  // namespace cife
