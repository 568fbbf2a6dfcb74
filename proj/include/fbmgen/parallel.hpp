#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace fbmgen {

// Worker pool size: FBMGEN_WORKERS if set, else hardware concurrency.
inline unsigned worker_count() {
	if (const char* env = std::getenv("FBMGEN_WORKERS")) {
		long v = std::strtol(env, nullptr, 10);
		if (v >= 1) return static_cast<unsigned>(v);
	}
	unsigned hc = std::thread::hardware_concurrency();
	return hc ? hc : 1;
}

// Run fn(i) for i in [0, count) across worker threads. Tasks must be
// independent; iteration order is unspecified when workers > 1.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         unsigned workers = worker_count()) {
	if (workers <= 1 || count <= 1) {
		for (std::size_t i = 0; i < count; ++i) fn(i);
		return;
	}
	if (workers > count) workers = static_cast<unsigned>(count);
	std::atomic<std::size_t> next{0};
	std::exception_ptr err;
	std::atomic<bool> failed{false};
	std::vector<std::thread> pool;
	pool.reserve(workers);
	for (unsigned w = 0; w < workers; ++w) {
		pool.emplace_back([&] {
			for (;;) {
				std::size_t i = next.fetch_add(1);
				if (i >= count || failed.load()) return;
				try {
					fn(i);
				} catch (...) {
					if (!failed.exchange(true)) err = std::current_exception();
					return;
				}
			}
		});
	}
	for (auto& th : pool) th.join();
	if (failed.load() && err) std::rethrow_exception(err);
}

}  // namespace fbmgen
