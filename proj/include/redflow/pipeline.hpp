#pragma once

// Work distribution for corpus scans. Results land in slots indexed by input
// position, so the output is identical for any worker count; only the
// aggregation thread touches shared state after the join.

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace redflow {

// Applies fn to every item, with up to `jobs` workers. If any invocation
// throws, the exception from the lowest input index is rethrown after all
// workers finish, so failure behavior does not depend on scheduling either.
template <typename Item, typename Fn>
auto parallel_map(const std::vector<Item>& items, int jobs, Fn fn)
    -> std::vector<decltype(fn(items.front()))> {
  using Result = decltype(fn(items.front()));
  std::vector<Result> results(items.size());
  if (items.empty()) return results;

  size_t workers = static_cast<size_t>(jobs < 1 ? 1 : jobs);
  if (workers > items.size()) workers = items.size();
  std::vector<std::exception_ptr> errors(items.size());

  if (workers == 1) {
    for (size_t i = 0; i < items.size(); ++i) {
      try {
        results[i] = fn(items[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= items.size()) return;
        try {
          results[i] = fn(items[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

} // namespace redflow
