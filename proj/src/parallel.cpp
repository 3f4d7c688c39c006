#include "sparsep/parallel.hpp"

#include <cstdlib>
#include <omp.h>
#include <string>

namespace sparsep
{

namespace
{
int default_threads = 0;
}

void set_thread_count(int n)
{
    if (default_threads == 0)
        default_threads = omp_get_max_threads();
    omp_set_num_threads(n >= 1 ? n : default_threads);
}

int thread_count()
{
    return omp_get_max_threads();
}

void apply_thread_env()
{
    const char* v = std::getenv(kThreadsEnv);
    if (v == nullptr)
        return;
    try
    {
        const int n = std::stoi(v);
        if (n >= 1)
            set_thread_count(n);
    }
    catch (const std::exception&)
    {
    }
}

}  // namespace sparsep
