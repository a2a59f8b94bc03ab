// Timing harness for the dense state kernels: the OpenMP path against the
// serial reference, on the workloads the representation layer actually runs
// (caret splits, one-site operators, cyclic relabelings, inner products).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "tft/kernels.hpp"
#include "tft/tensorlab.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace tft;

namespace {

CVec random_state(std::size_t n, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    CVec v(n);
    for (auto& z : v) z = Complex{dist(rng), dist(rng)};
    return v;
}

// Runs op() until at least ~40ms have accumulated; returns ms per call.
template <class F>
double time_ms(F&& op) {
    using clock = std::chrono::steady_clock;
    int reps = 1;
    for (;;) {
        const auto start = clock::now();
        for (int i = 0; i < reps; ++i) op();
        const double ms =
            std::chrono::duration<double, std::milli>(clock::now() - start).count();
        if (ms >= 40.0 || reps >= 1 << 14) return ms / reps;
        reps *= 4;
    }
}

double max_diff(const CVec& a, const CVec& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

} // namespace

int main() {
    const int d = 3;
    std::mt19937 rng(20260823u);
    const CVec V = qutrit_tensor().flat();
    CVec M(static_cast<std::size_t>(d) * d);
    for (auto& z : M) z = Complex{std::uniform_real_distribution<double>(-1, 1)(rng), 0.0};

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif
    std::printf("%-14s %4s %12s %12s %9s %10s\n", "kernel", "n", "serial ms", "parallel ms",
                "speedup", "max diff");

    set_exec_policy(ExecPolicy::parallel);
    for (int n = 8; n <= 12; ++n) {
        const CVec in = random_state(pow_size(d, n), rng);
        const int pos = n / 2;

        struct Row {
            const char* name;
            CVec serial_out, parallel_out;
            double serial_ms, parallel_ms;
        };
        Row rows[4];

        rows[0] = {"caret", apply_caret_serial(in, n, pos, d, V), apply_caret(in, n, pos, d, V),
                   time_ms([&] { return apply_caret_serial(in, n, pos, d, V); }),
                   time_ms([&] { return apply_caret(in, n, pos, d, V); })};
        rows[1] = {"site", apply_site_serial(in, n, pos, d, M), apply_site(in, n, pos, d, M),
                   time_ms([&] { return apply_site_serial(in, n, pos, d, M); }),
                   time_ms([&] { return apply_site(in, n, pos, d, M); })};
        rows[2] = {"relabel", cyclic_relabel_serial(in, n, d, 1), cyclic_relabel(in, n, d, 1),
                   time_ms([&] { return cyclic_relabel_serial(in, n, d, 1); }),
                   time_ms([&] { return cyclic_relabel(in, n, d, 1); })};

        for (int r = 0; r < 3; ++r) {
            const Row& row = rows[r];
            std::printf("%-14s %4d %12.4f %12.4f %8.2fx %10.2e\n", row.name, n, row.serial_ms,
                        row.parallel_ms, row.serial_ms / row.parallel_ms,
                        max_diff(row.serial_out, row.parallel_out));
        }

        const Complex is = inner_serial(in, in), ip = inner(in, in);
        const double ts = time_ms([&] { return inner_serial(in, in); });
        const double tp = time_ms([&] { return inner(in, in); });
        std::printf("%-14s %4d %12.4f %12.4f %8.2fx %10.2e\n", "inner", n, ts, tp, ts / tp,
                    std::abs(is - ip));
    }
    return 0;
}
