#pragma once

namespace sparsep
{

/// Environment variable holding the default worker count.
inline constexpr const char* kThreadsEnv = "SPARSEP_THREADS";

/// Caps the OpenMP worker count; values below 1 restore the default.
void set_thread_count(int n);
int thread_count();
/// Applies SPARSEP_THREADS if it is set to a positive integer.
void apply_thread_env();

}  // namespace sparsep
