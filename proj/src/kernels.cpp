#include "tft/kernels.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "tft/error.hpp"

namespace tft {

namespace {

std::atomic<ExecPolicy> g_policy{ExecPolicy::parallel};

void check_state(const CVec& in, int legs, int d) {
    if (d < 2) throw ShapeError("local dimension must be at least 2, got " + std::to_string(d));
    if (legs < 0) throw ShapeError("negative leg count");
    if (in.size() != pow_size(d, legs))
        throw ShapeError("state has " + std::to_string(in.size()) + " entries, expected " +
                         std::to_string(pow_size(d, legs)));
}

using Size = long long;

} // namespace

std::size_t pow_size(int d, int n) {
    if (d < 1 || n < 0) throw ShapeError("bad tensor shape");
    std::size_t r = 1;
    for (int i = 0; i < n; ++i) {
        r *= static_cast<std::size_t>(d);
        if (r > (std::size_t(1) << 40))
            throw ShapeError("state of " + std::to_string(d) + "^" + std::to_string(n) +
                             " entries is too large");
    }
    return r;
}

ExecPolicy exec_policy() { return g_policy.load(); }
void set_exec_policy(ExecPolicy p) { g_policy.store(p); }

// Both caret kernels are written in gather form: every output entry sums the
// same d input terms in the same order, so the serial and parallel results
// agree bit for bit.

CVec apply_caret_serial(const CVec& in, int legs, int pos, int d, const CVec& V) {
    check_state(in, legs, d);
    if (pos < 0 || pos >= legs) throw ShapeError("caret position out of range");
    if (V.size() != pow_size(d, 3)) throw ShapeError("caret tensor must have d^3 entries");
    const Size S = static_cast<Size>(pow_size(d, legs - 1 - pos));
    const Size dd = d;
    CVec out(in.size() * static_cast<std::size_t>(d));
    const Size total = static_cast<Size>(out.size());
    for (Size o = 0; o < total; ++o) {
        const Size suffix = o % S;
        const Size jk = (o / S) % (dd * dd);
        const Size prefix = o / (S * dd * dd);
        Complex acc = 0;
        for (Size l = 0; l < dd; ++l)
            acc += V[static_cast<std::size_t>(jk * dd + l)] *
                   in[static_cast<std::size_t>((prefix * dd + l) * S + suffix)];
        out[static_cast<std::size_t>(o)] = acc;
    }
    return out;
}

CVec apply_caret(const CVec& in, int legs, int pos, int d, const CVec& V) {
#ifdef _OPENMP
    if (exec_policy() == ExecPolicy::parallel) {
        check_state(in, legs, d);
        if (pos < 0 || pos >= legs) throw ShapeError("caret position out of range");
        if (V.size() != pow_size(d, 3)) throw ShapeError("caret tensor must have d^3 entries");
        const Size S = static_cast<Size>(pow_size(d, legs - 1 - pos));
        const Size dd = d;
        CVec out(in.size() * static_cast<std::size_t>(d));
        const Size total = static_cast<Size>(out.size());
#pragma omp parallel for schedule(static)
        for (Size o = 0; o < total; ++o) {
            const Size suffix = o % S;
            const Size jk = (o / S) % (dd * dd);
            const Size prefix = o / (S * dd * dd);
            Complex acc = 0;
            for (Size l = 0; l < dd; ++l)
                acc += V[static_cast<std::size_t>(jk * dd + l)] *
                       in[static_cast<std::size_t>((prefix * dd + l) * S + suffix)];
            out[static_cast<std::size_t>(o)] = acc;
        }
        return out;
    }
#endif
    return apply_caret_serial(in, legs, pos, d, V);
}

CVec apply_site_serial(const CVec& in, int legs, int pos, int d, const CVec& M) {
    check_state(in, legs, d);
    if (pos < 0 || pos >= legs) throw ShapeError("site position out of range");
    if (M.size() != pow_size(d, 2)) throw ShapeError("site operator must have d^2 entries");
    const Size S = static_cast<Size>(pow_size(d, legs - 1 - pos));
    const Size dd = d;
    CVec out(in.size());
    const Size total = static_cast<Size>(out.size());
    for (Size o = 0; o < total; ++o) {
        const Size suffix = o % S;
        const Size j = (o / S) % dd;
        const Size prefix = o / (S * dd);
        Complex acc = 0;
        for (Size l = 0; l < dd; ++l)
            acc += M[static_cast<std::size_t>(j * dd + l)] *
                   in[static_cast<std::size_t>((prefix * dd + l) * S + suffix)];
        out[static_cast<std::size_t>(o)] = acc;
    }
    return out;
}

CVec apply_site(const CVec& in, int legs, int pos, int d, const CVec& M) {
#ifdef _OPENMP
    if (exec_policy() == ExecPolicy::parallel) {
        check_state(in, legs, d);
        if (pos < 0 || pos >= legs) throw ShapeError("site position out of range");
        if (M.size() != pow_size(d, 2)) throw ShapeError("site operator must have d^2 entries");
        const Size S = static_cast<Size>(pow_size(d, legs - 1 - pos));
        const Size dd = d;
        CVec out(in.size());
        const Size total = static_cast<Size>(out.size());
#pragma omp parallel for schedule(static)
        for (Size o = 0; o < total; ++o) {
            const Size suffix = o % S;
            const Size j = (o / S) % dd;
            const Size prefix = o / (S * dd);
            Complex acc = 0;
            for (Size l = 0; l < dd; ++l)
                acc += M[static_cast<std::size_t>(j * dd + l)] *
                       in[static_cast<std::size_t>((prefix * dd + l) * S + suffix)];
            out[static_cast<std::size_t>(o)] = acc;
        }
        return out;
    }
#endif
    return apply_site_serial(in, legs, pos, d, M);
}

namespace {

// Shared digit shuffle: output index -> input index.
inline Size relabel_source(Size y, int legs, Size dd, int shift,
                           const Size* powers) {
    Size x = 0;
    for (int i = 0; i < legs; ++i) {
        const int src = (i + shift) % legs; // output leg holding input leg i
        const Size digit = (y / powers[src]) % dd;
        x += digit * powers[i];
    }
    return x;
}

} // namespace

CVec cyclic_relabel_serial(const CVec& in, int legs, int d, int shift) {
    check_state(in, legs, d);
    if (legs == 0) return in;
    shift = ((shift % legs) + legs) % legs;
    if (shift == 0) return in;
    const Size dd = d;
    std::vector<Size> powers(static_cast<std::size_t>(legs));
    powers[static_cast<std::size_t>(legs - 1)] = 1;
    for (int i = legs - 2; i >= 0; --i)
        powers[static_cast<std::size_t>(i)] = powers[static_cast<std::size_t>(i + 1)] * dd;
    CVec out(in.size());
    const Size total = static_cast<Size>(in.size());
    for (Size y = 0; y < total; ++y)
        out[static_cast<std::size_t>(y)] =
            in[static_cast<std::size_t>(relabel_source(y, legs, dd, shift, powers.data()))];
    return out;
}

CVec cyclic_relabel(const CVec& in, int legs, int d, int shift) {
#ifdef _OPENMP
    if (exec_policy() == ExecPolicy::parallel) {
        check_state(in, legs, d);
        if (legs == 0) return in;
        shift = ((shift % legs) + legs) % legs;
        if (shift == 0) return in;
        const Size dd = d;
        std::vector<Size> powers(static_cast<std::size_t>(legs));
        powers[static_cast<std::size_t>(legs - 1)] = 1;
        for (int i = legs - 2; i >= 0; --i)
            powers[static_cast<std::size_t>(i)] = powers[static_cast<std::size_t>(i + 1)] * dd;
        CVec out(in.size());
        const Size total = static_cast<Size>(in.size());
        const Size* pw = powers.data();
#pragma omp parallel for schedule(static)
        for (Size y = 0; y < total; ++y)
            out[static_cast<std::size_t>(y)] =
                in[static_cast<std::size_t>(relabel_source(y, legs, dd, shift, pw))];
        return out;
    }
#endif
    return cyclic_relabel_serial(in, legs, d, shift);
}

Complex inner_serial(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw ShapeError("inner product of vectors of different length");
    Complex acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

Complex inner(const CVec& a, const CVec& b) {
#ifdef _OPENMP
    if (exec_policy() == ExecPolicy::parallel) {
        if (a.size() != b.size())
            throw ShapeError("inner product of vectors of different length");
        const Size total = static_cast<Size>(a.size());
        double re = 0, im = 0;
#pragma omp parallel for schedule(static) reduction(+ : re, im)
        for (Size i = 0; i < total; ++i) {
            const Complex t = std::conj(a[static_cast<std::size_t>(i)]) * b[static_cast<std::size_t>(i)];
            re += t.real();
            im += t.imag();
        }
        return {re, im};
    }
#endif
    return inner_serial(a, b);
}

double norm(const CVec& a) { return std::sqrt(std::abs(inner(a, a))); }

} // namespace tft
