#pragma once

#include <cstddef>
#include <functional>

namespace qcmps {

/// Worker count used by the engines. 0 resets to hardware concurrency.
void set_num_threads(unsigned n);
unsigned num_threads();

/// Runs task(i) for i in [0, n_tasks). Tasks must write only to their own
/// output slots; callers reduce the slots in index order, which keeps every
/// result independent of the worker count.
void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& task);

} // namespace qcmps
