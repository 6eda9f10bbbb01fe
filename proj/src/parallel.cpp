#include "torus_atlas/parallel.hpp"

namespace torus_atlas {

namespace {
std::atomic<int> g_jobs{0};
}

int default_jobs() {
    int j = g_jobs.load();
    if (j > 0) return j;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

void set_default_jobs(int jobs) { g_jobs.store(jobs > 0 ? jobs : 0); }

}  // namespace torus_atlas
