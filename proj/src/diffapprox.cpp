#include "tft/diffapprox.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tft/error.hpp"

namespace tft {

namespace {

// Nearest dyadic with 48 fractional bits; exact enough that the bracketing
// tolerance of the approximation scheme (1e-12) dominates any rounding here.
Dyadic dyadic_from_double(double x) {
    double scaled = std::ldexp(x, 48);
    if (!(std::abs(scaled) < 9.0e18))
        throw DyadicError("value " + std::to_string(x) + " is out of dyadic range");
    return Dyadic(static_cast<std::int64_t>(std::llround(scaled)), 48);
}

} // namespace

Dyadic dyadic_between(const Rational& p, const Rational& q) {
    if (!(p < q))
        throw IntervalError("(" + p.str() + ", " + q.str() + ") is not a nonempty interval");
    if (p < Rational(0, 1))
        throw IntervalError("interval (" + p.str() + ", " + q.str() + ") must lie in [0, oo)");
    const Rational gap = q - p;
    // Smallest k >= 0 with 2^-k strictly below the gap; the mesh 2^-k then has
    // a point strictly inside (p, q).
    int k = 0;
    while (k < 62 && !(Rational(1, std::int64_t(1) << k) < gap)) ++k;
    if (k >= 62) throw DyadicError("interval (" + p.str() + ", " + q.str() + ") is too small");
    // First mesh point above p: the smallest integer strictly greater than
    // 2^k p (p >= 0, so floor is plain integer division).
    const Rational scaled = p * Rational(std::int64_t(1) << k, 1);
    const std::int64_t m = scaled.p / scaled.q + 1;
    return Dyadic(m, k);
}

std::vector<std::pair<Dyadic, Dyadic>> dyadic_interpolation(const std::pair<Dyadic, Dyadic>& p,
                                                            const std::pair<Dyadic, Dyadic>& q,
                                                            int kx, int ky) {
    if (!(p.first < q.first) || !(p.second < q.second))
        throw IntervalError("interpolation endpoints must increase in both coordinates");
    const Dyadic lenx = q.first - p.first;
    const Dyadic leny = q.second - p.second;

    // Mesh data (interval count, exponent) for one side, honouring an
    // explicitly requested unreduced exponent.
    auto mesh = [](const Dyadic& len, int k_opt) -> std::pair<std::int64_t, int> {
        if (k_opt < 0) return {len.m, len.k};
        if (k_opt < len.k || k_opt > 62 || k_opt - len.k > 40)
            throw DyadicError("exponent " + std::to_string(k_opt) + " cannot represent " +
                              len.str());
        return {len.m << (k_opt - len.k), k_opt};
    };
    const auto [mx, ex] = mesh(lenx, kx);
    const auto [my, ey] = mesh(leny, ky);

    // Interior cut offsets for a side that starts with `m0` uniform intervals
    // of 2^-e0 and is refined, by left-to-right halving sweeps, to `target`
    // intervals in total.
    auto refine = [](std::int64_t m0, int e0, std::int64_t target) {
        std::vector<Dyadic> cuts;
        cuts.reserve(static_cast<std::size_t>(target - 1));
        for (std::int64_t i = 1; i < m0; ++i) cuts.emplace_back(i, e0);
        std::int64_t need = target - m0;
        std::int64_t level = m0; // intervals present before the current sweep
        int sweep = 1;
        while (need > 0) {
            if (e0 + sweep > 62) throw DyadicError("interpolation requires too deep a mesh");
            for (std::int64_t i = 1; i <= level && need > 0; ++i, --need)
                cuts.emplace_back(2 * i - 1, e0 + sweep);
            level *= 2;
            ++sweep;
        }
        std::sort(cuts.begin(), cuts.end());
        return cuts;
    };
    auto uniform = [](std::int64_t m0, int e0) {
        std::vector<Dyadic> cuts;
        cuts.reserve(static_cast<std::size_t>(m0 - 1));
        for (std::int64_t i = 1; i < m0; ++i) cuts.emplace_back(i, e0);
        return cuts;
    };

    std::vector<Dyadic> xo, yo;
    if (mx <= my) {
        xo = refine(mx, ex, my);
        yo = uniform(my, ey);
    } else {
        xo = uniform(mx, ex);
        yo = refine(my, ey, mx);
    }

    std::vector<std::pair<Dyadic, Dyadic>> out;
    out.reserve(xo.size() + 2);
    out.emplace_back(p.first, p.second);
    for (std::size_t i = 0; i < xo.size(); ++i)
        out.emplace_back(p.first + xo[i], p.second + yo[i]);
    out.emplace_back(q.first, q.second);
    return out;
}

GroupElement approximate(const std::function<double(double)>& f, double S, double eps,
                         ApproxMode mode) {
    if (!(eps > 0.0) || !(eps < 1.0))
        throw ParameterError("approximation target eps must lie in (0, 1)");
    const bool circle = (mode == ApproxMode::circle);

    if (S <= 0.0) {
        // No derivative bound supplied: estimate sup f' by central differences
        // on a fine grid and pad the result.
        const int grid = 1 << 14;
        double best = 0.0;
        for (int i = 1; i < grid; ++i) {
            const double d = (f((i + 1.0) / grid) - f((i - 1.0) / grid)) * (grid / 2.0);
            best = std::max(best, d);
        }
        S = best * 1.1;
    }
    S = std::max(S, 1.0); // an increasing bijection of [0,1] has sup f' >= 1

    int levels = static_cast<int>(std::ceil(-std::log2(eps / (3.0 * S))));
    levels = std::max(levels, 1);
    if (levels > 24)
        throw ResourceError("approximation needs a 2^" + std::to_string(levels) +
                            " grid; tighten S or loosen eps");
    const std::int64_t n = std::int64_t(1) << levels;

    std::vector<double> fx(static_cast<std::size_t>(n) + 1);
    for (std::int64_t i = 0; i <= n; ++i)
        fx[static_cast<std::size_t>(i)] = f(static_cast<double>(i) / static_cast<double>(n));

    const double tol = 1e-9;
    if (circle) {
        // Normalize the lift so it starts in [0, 1).
        const double base = std::floor(fx[0]);
        for (double& v : fx) v -= base;
        if (std::abs(fx.back() - fx.front() - 1.0) > tol)
            throw NotDiffeoError("circle lift must advance by exactly one turn");
    } else {
        if (std::abs(fx.front()) > tol || std::abs(fx.back() - 1.0) > tol)
            throw NotDiffeoError("interval map must fix 0 and 1");
        fx.front() = 0.0;
        fx.back() = 1.0;
    }
    for (std::int64_t i = 1; i <= n; ++i)
        if (!(fx[static_cast<std::size_t>(i)] > fx[static_cast<std::size_t>(i - 1)]))
            throw NotDiffeoError("map samples are not strictly increasing");

    // Upward slack: small enough that nudging every node up by less than
    // `slack` keeps the last node below the right endpoint (first node, on the
    // circle, where the endpoint is the shifted start).
    const double slack = circle ? std::min(eps / 2.0, (fx[1] - fx[0]) / 2.0)
                                : std::min(eps / 2.0, (fx[static_cast<std::size_t>(n)] -
                                                       fx[static_cast<std::size_t>(n - 1)]) /
                                                          2.0);

    std::vector<Dyadic> eta(static_cast<std::size_t>(n) + 1);
    for (std::int64_t i = 1; i < n; ++i) {
        const double lo = std::max(fx[static_cast<std::size_t>(i - 1)] + slack,
                                   fx[static_cast<std::size_t>(i)]);
        const double hi = fx[static_cast<std::size_t>(i)] + slack;
        eta[static_cast<std::size_t>(i)] =
            dyadic_between(Rational(dyadic_from_double(lo)), Rational(dyadic_from_double(hi)));
    }
    if (circle) {
        eta[0] = dyadic_between(Rational(dyadic_from_double(fx[0] + slack)),
                                Rational(dyadic_from_double(fx[1])));
        if (!(eta[0] < Dyadic::integer(1))) {
            // Lift started close to 1 and the nudge crossed it; shift the whole
            // lift down one turn.
            for (std::int64_t i = 0; i < n; ++i)
                eta[static_cast<std::size_t>(i)] =
                    eta[static_cast<std::size_t>(i)] - Dyadic::integer(1);
        }
        eta[static_cast<std::size_t>(n)] = eta[0] + Dyadic::integer(1);
    } else {
        eta[0] = Dyadic::integer(0);
        eta[static_cast<std::size_t>(n)] = Dyadic::integer(1);
    }

    // Stitch power-of-two-slope interpolations between consecutive nodes.
    std::vector<std::pair<Dyadic, Dyadic>> pts;
    for (std::int64_t i = 1; i <= n; ++i) {
        const auto seg = dyadic_interpolation(
            {Dyadic(i - 1, levels), eta[static_cast<std::size_t>(i - 1)]},
            {Dyadic(i, levels), eta[static_cast<std::size_t>(i)]});
        const std::size_t start = pts.empty() ? 0 : 1;
        pts.insert(pts.end(), seg.begin() + static_cast<std::ptrdiff_t>(start), seg.end());
    }

    PLMap g;
    g.circle = circle;
    g.points = std::move(pts);
    g.validate();
    return pl_to_element(g);
}

double derivative_distance(const std::function<double(double)>& fprime, const GroupElement& g,
                           int samples_per_segment) {
    if (samples_per_segment < 1)
        throw ParameterError("samples_per_segment must be positive");
    const PLMap pl = element_to_pl(g);
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < pl.points.size(); ++i) {
        const double x0 = pl.points[i].first.to_double();
        const double x1 = pl.points[i + 1].first.to_double();
        const double slope =
            (pl.points[i + 1].second.to_double() - pl.points[i].second.to_double()) / (x1 - x0);
        for (int s = 1; s <= samples_per_segment; ++s) {
            const double x = x0 + (x1 - x0) * s / (samples_per_segment + 1.0);
            worst = std::max(worst, std::abs(fprime(x) - slope));
        }
    }
    return worst;
}

} // namespace tft
