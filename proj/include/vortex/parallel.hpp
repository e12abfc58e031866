#pragma once

namespace vortex {

// Thread budget for OpenMP regions. VORTEX_ALPHA_THREADS > 0 caps it; 0 or
// unset leaves the OpenMP default.
int thread_budget();

// Applies thread_budget() to the OpenMP runtime.
void apply_thread_budget();

}  // namespace vortex
