#include "nsais/parallel.hpp"

#include <atomic>

namespace nsais {

namespace {
std::atomic<unsigned> g_jobs{1};
}

unsigned default_jobs() { return g_jobs.load(); }
void set_default_jobs(unsigned jobs) { g_jobs.store(jobs == 0 ? 1 : jobs); }

}  // namespace nsais
