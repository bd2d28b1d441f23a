#pragma once

#include <cstddef>
#include <functional>

namespace taperscat {

// Worker count: TAPERSCAT_THREADS if set (clamped to >= 1), else
// hardware_concurrency.
int worker_count();

// Runs fn(i) for i in [0, count). Work is partitioned by index; fn must only
// write to slots owned by its own i, so results are identical for any worker
// count. Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace taperscat
