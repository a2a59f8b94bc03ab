#include "tft/correlators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <utility>

#include "tft/error.hpp"
#include "tft/kernels.hpp"

namespace tft {

namespace {

// Integer power with an explicit guard: negative powers of a (numerically)
// vanishing base have no meaning here.
Complex ipow(Complex z, long long e, const char* what) {
    if (e < 0) {
        if (std::abs(z) < 1e-14)
            throw SingularEigenvalueError(std::string(what) +
                                          " vanishes; cannot take a negative power");
        return Complex{1.0, 0.0} / ipow(z, -e, what);
    }
    Complex r{1.0, 0.0};
    while (e > 0) {
        if (e & 1) r *= z;
        z *= z;
        e >>= 1;
    }
    return r;
}

CVec flat_rm(const CMat& M) {
    CVec v(static_cast<std::size_t>(M.rows()) * static_cast<std::size_t>(M.cols()));
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c)
            v[static_cast<std::size_t>(r) * M.cols() + c] = M(r, c);
    return v;
}

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// M acting on leg `pos` of `legs` legs of dimension d.
CMat site_matrix(std::size_t legs, std::size_t pos, int d, const CMat& M) {
    const auto eye = [](std::size_t n) { return CMat::Identity(n, n); };
    const std::size_t left = pow_size(d, static_cast<int>(pos));
    const std::size_t right = pow_size(d, static_cast<int>(legs - 1 - pos));
    return kron(eye(left), kron(M, eye(right)));
}

void check_field_index(const AscendingSystem& sys, int alpha) {
    if (alpha < 0 || static_cast<std::size_t>(alpha) >= sys.fields())
        throw ParameterError("field index " + std::to_string(alpha) + " out of range (have " +
                             std::to_string(sys.fields()) + " fields)");
}

// Depth of a standard dyadic interval from its length 2^-t.
int interval_depth(const Dyadic& a, const Dyadic& b) {
    const Dyadic len = b - a;
    return len.k; // normal form of 2^-t is 1/2^t
}

// Index of the partition interval [p_i, p_{i+1}) containing z.
std::size_t locate(const DyadicPartition& P, const Rational& z) {
    if (z < Rational(0, 1) || !(z < Rational(1, 1)))
        throw SupportError("sample point " + z.str() + " lies outside [0,1)");
    std::size_t i = 0;
    while (i + 1 < P.intervals() && !(z < Rational(P.points[i + 1]))) ++i;
    return i;
}

// Exponent of the power-of-two ratio dy/dx of two positive dyadics.
int log2_ratio(const Dyadic& dy, const Dyadic& dx) {
    const auto split = [](const Dyadic& v) {
        std::int64_t m = v.m;
        int e = -v.k;
        while (m != 0 && m % 2 == 0) {
            m /= 2;
            ++e;
        }
        return std::pair<std::int64_t, int>(m, e);
    };
    const auto [my, ey] = split(dy);
    const auto [mx, ex] = split(dx);
    if (my != mx) throw NotInGroupError("segment slope is not a power of two");
    return ey - ex;
}

} // namespace

DyadicPoint DyadicPoint::parse(const std::string& text) {
    std::size_t start = 0;
    if (text.rfind("0.", 0) == 0)
        start = 2;
    else if (!text.empty() && text[0] == '.')
        start = 1;
    DyadicPoint p;
    for (std::size_t i = start; i < text.size(); ++i) {
        if (text[i] != '0' && text[i] != '1')
            throw ParseError("binary expansion may contain only 0 and 1: \"" + text + "\"");
        p.digits.push_back(text[i] - '0');
    }
    return p;
}

DyadicPoint DyadicPoint::from_dyadic(const Dyadic& x) {
    if (x < Dyadic::integer(0) || !(x < Dyadic::integer(1)))
        throw DyadicError("expansion point must lie in [0,1): " + x.str());
    DyadicPoint p;
    for (int i = x.k - 1; i >= 0; --i) p.digits.push_back(static_cast<int>((x.m >> i) & 1));
    return p;
}

Dyadic DyadicPoint::value() const {
    std::int64_t m = 0;
    for (int d : digits) m = 2 * m + d;
    return Dyadic(m, level());
}

DyadicPoint DyadicPoint::at_level(int l) const {
    if (l < 0) throw DyadicError("expansion level must be nonnegative");
    DyadicPoint p = *this;
    if (l >= level()) {
        p.digits.resize(l, 0);
        return p;
    }
    for (std::size_t i = l; i < digits.size(); ++i)
        if (digits[i] != 0)
            throw DyadicError(value().str() + " is not representable at level " +
                              std::to_string(l));
    p.digits.resize(l);
    return p;
}

DyadicPoint DyadicPoint::coarsen(int steps) const {
    if (steps < 0 || steps > level())
        throw DyadicError("cannot drop " + std::to_string(steps) + " digits of a level-" +
                          std::to_string(level()) + " expansion");
    DyadicPoint p = *this;
    p.digits.resize(digits.size() - steps);
    return p;
}

bool DyadicPoint::operator==(const DyadicPoint& o) const {
    std::size_t la = digits.size(), lb = o.digits.size();
    while (la > 0 && digits[la - 1] == 0) --la;
    while (lb > 0 && o.digits[lb - 1] == 0) --lb;
    if (la != lb) return false;
    return std::equal(digits.begin(), digits.begin() + la, o.digits.begin());
}

TreeMetric xor_and_tree_metric(const DyadicPoint& x, const DyadicPoint& y, int level) {
    const DyadicPoint a = x.at_level(level);
    const DyadicPoint b = y.at_level(level);
    DyadicPoint diff;
    diff.digits.resize(level);
    int first = -1;
    for (int i = 0; i < level; ++i) {
        diff.digits[i] = a.digits[i] ^ b.digits[i];
        if (first < 0 && diff.digits[i] != 0) first = i;
    }
    TreeMetric out;
    out.diff = diff.value();
    out.dt_closed = (first < 0) ? 0 : level - first;

    // Digit recursion: 0 when equal, 1 for siblings, else recurse one level up.
    std::vector<int> da = a.digits, db = b.digits;
    int steps = 0;
    while (da != db) {
        ++steps;
        const bool siblings = !da.empty() && da.back() != db.back() &&
                              std::equal(da.begin(), da.end() - 1, db.begin());
        if (siblings) break;
        da.pop_back();
        db.pop_back();
    }
    out.dt_recursive = steps;
    return out;
}

Dyadic coarse_distance(const Dyadic& x, const Dyadic& y) {
    const DyadicPoint px = DyadicPoint::from_dyadic(x);
    const DyadicPoint py = DyadicPoint::from_dyadic(y);
    const int level = std::max(px.level(), py.level());
    const TreeMetric m = xor_and_tree_metric(px, py, level);
    if (m.dt_closed == 0) throw SupportError("coarse-graining distance needs distinct points");
    // diff has its leading digit at position level + 1 - dt.
    return Dyadic(1, level + 1 - m.dt_closed);
}

DyadicPartition minimal_supporting_partition(const std::vector<Rational>& points) {
    const Rational zero(0, 1), one(1, 1);
    for (const auto& p : points)
        if (p < zero || !(p < one))
            throw SupportError("sample point " + p.str() + " lies outside [0,1)");
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (!(points[i] < points[i + 1]))
            throw SupportError("sample points must be strictly increasing");

    std::vector<Dyadic> cuts{Dyadic::integer(0)};
    const std::function<void(Dyadic, Dyadic, std::size_t, std::size_t, int)> split =
        [&](Dyadic a, Dyadic b, std::size_t lo, std::size_t hi, int depth) {
            if (hi - lo <= 1) {
                cuts.push_back(b);
                return;
            }
            if (depth > 62) throw SupportError("points too close together to separate");
            const Dyadic mid = a + (b - a).times_pow2(-1);
            std::size_t cut = lo;
            while (cut < hi && points[cut] < Rational(mid)) ++cut;
            split(a, mid, lo, cut, depth + 1);
            split(mid, b, cut, hi, depth + 1);
        };
    split(Dyadic::integer(0), Dyadic::integer(1), 0, points.size(), 0);
    return DyadicPartition(cuts);
}

CMat discrete_field(const DyadicPartition& P, const Rational& z, int alpha,
                    const AscendingSystem& sys) {
    if (!sys.has_matrix() || sys.mu.empty())
        throw ShapeError("discretized fields need the matrix realization of the system");
    check_field_index(sys, alpha);
    const std::size_t n = P.intervals();
    if (n == 0) throw ShapeError("partition has no intervals");
    if (n > 8)
        throw ResourceError("partition has " + std::to_string(n) +
                            " intervals; the field-operator cap is 8");
    const std::size_t dim = pow_size(sys.d, static_cast<int>(n));
    if (dim > (std::size_t{1} << 23) / dim)
        throw ResourceError("dense operator on " + std::to_string(dim) +
                            " amplitudes is above the entry budget");
    const std::size_t i = locate(P, z);
    const int depth = interval_depth(P.points[i], P.points[i + 1]);
    return ipow(sys.lambda[alpha], -depth, "field eigenvalue") *
           site_matrix(n, i, sys.d, sys.mu[alpha]);
}

CMat smeared_field(const DyadicPartition& P, const std::function<CMat(double)>& f,
                   const AscendingSystem& sys) {
    if (!sys.has_matrix() || sys.mu.empty() || sys.nu.empty())
        throw ShapeError("smeared fields need the matrix realization of the system");
    const std::size_t n = P.intervals();
    if (n == 0) throw ShapeError("partition has no intervals");
    if (n > 8)
        throw ResourceError("partition has " + std::to_string(n) +
                            " intervals; the field-operator cap is 8");
    const std::size_t dim = pow_size(sys.d, static_cast<int>(n));
    if (dim > (std::size_t{1} << 23) / dim)
        throw ResourceError("dense operator on " + std::to_string(dim) +
                            " amplitudes is above the entry budget");
    const std::size_t nf = sys.fields();

    CMat out = CMat::Zero(dim, dim);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = P.points[i].to_double();
        const double b = P.points[i + 1].to_double();
        const double h = (b - a) / 64.0;
        std::vector<Complex> acc(nf, Complex{0.0, 0.0});
        for (int node = 0; node <= 64; ++node) {
            const CMat F = f(a + h * node);
            if (F.rows() != sys.d || F.cols() != sys.d)
                throw ShapeError("profile must return d-by-d matrices");
            const double w = (node == 0 || node == 64) ? 1.0 : (node % 2 ? 4.0 : 2.0);
            for (std::size_t al = 0; al < nf; ++al)
                acc[al] += w * (sys.nu[al].adjoint() * F).trace();
        }
        const int depth = interval_depth(P.points[i], P.points[i + 1]);
        for (std::size_t al = 0; al < nf; ++al) {
            const Complex fbar = acc[al] * (h / 3.0) / static_cast<double>(sys.d);
            if (std::abs(fbar) < 1e-15) continue;
            out += fbar * ipow(sys.lambda[al], -depth, "field eigenvalue") *
                   site_matrix(n, i, sys.d, sys.mu[al]);
        }
    }
    return out;
}

Complex npoint(const std::vector<Rational>& points, const std::vector<int>& alphas,
               const AscendingSystem& sys, const std::optional<GroupElement>& state,
               const std::optional<BinaryTree>& refinement) {
    if (points.size() != alphas.size())
        throw ShapeError("need one field index per sample point, got " +
                         std::to_string(points.size()) + " points and " +
                         std::to_string(alphas.size()) + " indices");
    if (!sys.has_matrix() || sys.mu.empty())
        throw ShapeError("n-point evaluation needs the matrix realization of the system");

    std::vector<FieldInsertion> ins;
    ins.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        check_field_index(sys, alphas[i]);
        ins.push_back(FieldInsertion{points[i], alphas[i]});
    }
    std::sort(ins.begin(), ins.end(),
              [](const FieldInsertion& a, const FieldInsertion& b) {
                  return a.position < b.position;
              });
    std::vector<Rational> sorted;
    sorted.reserve(ins.size());
    for (const auto& fi : ins) sorted.push_back(fi.position);

    const DyadicPartition P = minimal_supporting_partition(sorted);
    if (P.intervals() > 8)
        throw ResourceError("minimal supporting partition has " +
                            std::to_string(P.intervals()) + " intervals; the n-point cap is 8");

    const Isometry3 V = Isometry3::from_entries(sys.d, sys.V);

    // The vacuum is the tree state with the top edge traced out, so the
    // expectation is an average over contractions with one basis vector at
    // the top.  Its trivial representative lives on a single leaf.
    Complex acc{0.0, 0.0};
    Complex pref{1.0, 0.0};
    for (int top = 0; top < sys.d; ++top) {
        LimitState psi{BinaryTree::leaf(), 0,
                       CVec(static_cast<std::size_t>(sys.d), Complex{0.0, 0.0})};
        psi.amps[top] = Complex{1.0, 0.0};
        if (state) psi = act(*state, psi, V);
        BinaryTree ctx = join(psi.tree, partition_tree(P)).tree;
        if (refinement) ctx = join(ctx, *refinement).tree;
        psi = embed(psi, ctx, V);

        const DyadicPartition cells = tree_partition(ctx);
        const std::vector<int> depths = ctx.leaf_depths();
        const int legs = static_cast<int>(ctx.leaves());

        CVec vec = psi.amps;
        pref = Complex{1.0, 0.0};
        for (const auto& fi : ins) {
            const std::size_t leg = locate(cells, fi.position);
            pref *= ipow(sys.lambda[fi.alpha], -static_cast<long long>(depths[leg]),
                         "field eigenvalue");
            vec = apply_site(vec, legs, static_cast<int>(leg), sys.d,
                             flat_rm(sys.mu[fi.alpha]));
        }
        acc += inner(psi.amps, vec);
    }
    return pref * acc / static_cast<double>(sys.d);
}

Complex two_point_closed_form(const Dyadic& x, const Dyadic& y, int alpha, int beta,
                              const AscendingSystem& sys) {
    if (!(x < y)) throw SupportError("two-point closed form needs x < y");
    if (sys.fusion.empty()) throw ShapeError("system is missing fusion data");
    check_field_index(sys, alpha);
    check_field_index(sys, beta);

    const Dyadic D = coarse_distance(x, y); // throws for points outside [0,1)
    const long long e = D.k;                // D = 2^-e with e >= 1

    Complex sum{0.0, 0.0};
    for (std::size_t g = 0; g < sys.fields(); ++g) {
        const Complex c = sys.fusion[alpha][beta][g];
        const Complex vg = sys.vac[g];
        if (std::abs(c) < 1e-15 || std::abs(vg) < 1e-15) continue;
        sum += c * vg * ipow(sys.lambda[g], e - 1, "fusion-channel eigenvalue");
    }
    return sum * ipow(sys.lambda[alpha], -e, "field eigenvalue") *
           ipow(sys.lambda[beta], -e, "field eigenvalue");
}

OpeTable ope_table(const AscendingSystem& sys, double tol) {
    if (sys.fusion.empty()) throw ShapeError("system is missing fusion data");
    const int nf = static_cast<int>(sys.fields());
    OpeTable t;
    for (int a = 0; a < nf; ++a) {
        Eigen::MatrixXi N = Eigen::MatrixXi::Zero(nf, nf);
        for (int b = 0; b < nf; ++b)
            for (int g = 0; g < nf; ++g) {
                const Complex c = sys.fusion[a][b][g];
                if (std::abs(c) <= tol) continue;
                t.rows.push_back(OpeRow{a, b, g, c, sys.h[g] - sys.h[a] - sys.h[b]});
                N(b, g) = 1;
            }
        t.fusion_matrices.push_back(std::move(N));
    }
    return t;
}

Complex brute_force_npoint(const Isometry3& V, int m,
                           const std::vector<std::pair<int, CMat>>& leaf_ops) {
    if (m < 0) throw ShapeError("tree level must be nonnegative");
    if (m > 30) throw ResourceError("tree level " + std::to_string(m) + " is far too deep");
    const int nleaves = 1 << m;
    const std::size_t amp = pow_size(V.d, nleaves);
    if (amp > (std::size_t{1} << 20))
        throw ResourceError("level-" + std::to_string(m) + " regular tree needs " +
                            std::to_string(amp) + " amplitudes");

    std::vector<std::pair<int, CVec>> ops;
    ops.reserve(leaf_ops.size());
    for (const auto& [leaf, M] : leaf_ops) {
        if (leaf < 0 || leaf >= nleaves)
            throw ShapeError("leaf index " + std::to_string(leaf) + " out of range for level " +
                             std::to_string(m));
        if (M.rows() != V.d || M.cols() != V.d)
            throw ShapeError("leaf operators must be d-by-d");
        ops.emplace_back(leaf, flat_rm(M));
    }

    const CVec vflat = V.flat();
    Complex acc{0.0, 0.0};
    for (int l = 0; l < V.d; ++l) {
        CVec w(static_cast<std::size_t>(V.d), Complex{0.0, 0.0});
        w[l] = Complex{1.0, 0.0};
        int legs = 1;
        for (int layer = 0; layer < m; ++layer) {
            const int cur = legs;
            for (int i = 0; i < cur; ++i) w = apply_caret(w, legs++, 2 * i, V.d, vflat);
        }
        CVec mw = w;
        for (const auto& [leaf, M] : ops) mw = apply_site(mw, legs, leaf, V.d, M);
        acc += inner(w, mw);
    }
    return acc / static_cast<double>(V.d);
}

double covariance_residual(const GroupElement& f, const std::vector<Rational>& points,
                           const std::vector<int>& alphas, const AscendingSystem& sys) {
    const Complex lhs = npoint(points, alphas, sys);

    const PLMap pl = element_to_pl(f);
    std::vector<Rational> imgs;
    imgs.reserve(points.size());
    Complex pref{1.0, 0.0};
    for (std::size_t i = 0; i < points.size(); ++i) {
        imgs.push_back(pl(points[i]));
        std::size_t seg = 0;
        for (std::size_t s = 0; s + 1 < pl.points.size(); ++s)
            if (!(points[i] < Rational(pl.points[s].first))) seg = s;
        const Dyadic dx = pl.points[seg + 1].first - pl.points[seg].first;
        const Dyadic dy = pl.points[seg + 1].second - pl.points[seg].second;
        pref *= ipow(sys.lambda[alphas[i]], -static_cast<long long>(log2_ratio(dy, dx)),
                     "field eigenvalue");
    }
    const Complex rhs = pref * npoint(imgs, alphas, sys, f);
    return std::abs(lhs - rhs);
}

} // namespace tft
