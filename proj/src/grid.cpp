#include "gravfluid/grid.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace gravfluid {

void GridSpec::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (n[a] < 1) throw ValidationError("grid.n", "points per axis must be >= 1");
        if (active(a) && n[a] < 4)
            throw ValidationError("grid.n", "active axes need at least 4 points");
        if (active(a) && extent[a] <= 0.0)
            throw ValidationError("grid.extent", "extent must be positive");
    }
    if (fd_order != 2 && fd_order != 4)
        throw ValidationError("grid.fd_order", "finite-difference order must be 2 or 4");
}

double GridSpec::min_spacing() const {
    double h = 1e300;
    for (int a = 0; a < 3; ++a)
        if (active(a)) h = std::min(h, spacing(a));
    return h;
}

std::size_t GridSpec::neighbor(std::size_t p, int axis, int shift) const {
    auto [i, j, k] = unravel(p);
    int idx[3] = {i, j, k};
    int v = idx[axis] + shift;
    if (boundary == BoundaryMode::Periodic) {
        v %= n[axis];
        if (v < 0) v += n[axis];
    } else {
        v = std::clamp(v, 0, n[axis] - 1);
    }
    idx[axis] = v;
    return index(idx[0], idx[1], idx[2]);
}

bool GridSpec::evolves(std::size_t p) const {
    if (boundary == BoundaryMode::Periodic) return true;
    const int hw = stencil_halfwidth();
    auto [i, j, k] = unravel(p);
    const int idx[3] = {i, j, k};
    for (int a = 0; a < 3; ++a) {
        if (!active(a)) continue;
        if (idx[a] < hw || idx[a] >= n[a] - hw) return false;
    }
    return true;
}

bool GridSpec::in_interior(std::size_t p, int margin) const {
    if (boundary == BoundaryMode::Periodic) return true;
    auto [i, j, k] = unravel(p);
    const int idx[3] = {i, j, k};
    for (int a = 0; a < 3; ++a) {
        if (!active(a)) continue;
        if (idx[a] < margin || idx[a] >= n[a] - margin) return false;
    }
    return true;
}

namespace {
int g_threads = int(std::thread::hardware_concurrency());
}

void set_thread_count(int threads) { g_threads = std::max(1, threads); }
int thread_count() { return std::max(1, g_threads); }

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& fn) {
    const int nt = thread_count();
    if (nt == 1 || count < 4096) {
        fn(0, count);
        return;
    }
    // fixed chunk size, independent of thread count
    const std::size_t chunk = 2048;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t b = next.fetch_add(chunk);
            if (b >= count) return;
            fn(b, std::min(b + chunk, count));
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < nt - 1; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

}  // namespace gravfluid
