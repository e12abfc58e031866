#include "vortex/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace vortex {

int thread_budget() {
    const int available = omp_get_num_procs();
    const char* env = std::getenv("VORTEX_ALPHA_THREADS");
    if (env == nullptr || *env == '\0') return available;
    try {
        const int requested = std::stoi(env);
        if (requested <= 0) return available;
        return requested;
    } catch (const std::exception&) {
        return available;
    }
}

void apply_thread_budget() { omp_set_num_threads(thread_budget()); }

}  // namespace vortex
