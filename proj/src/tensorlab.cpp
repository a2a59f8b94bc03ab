#include "tft/tensorlab.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "tft/error.hpp"

namespace tft {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Column-stacking of a d x d matrix in row-major order, matching the flat
// index a*d + b used throughout.
Eigen::VectorXcd vec_rm(const CMat& A) {
    const int d = static_cast<int>(A.rows());
    Eigen::VectorXcd v(d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) v(a * d + b) = A(a, b);
    return v;
}

CMat unvec_rm(const Eigen::VectorXcd& v, int d) {
    CMat A(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) A(a, b) = v(a * d + b);
    return A;
}

Complex hs_inner(const CMat& A, const CMat& B) {
    const int d = static_cast<int>(A.rows());
    return (A.adjoint() * B).trace() / static_cast<double>(d);
}

// T with all three legs pointing the same way; T[a][b][c] with a the bent
// input leg of V.
struct Cube {
    int d;
    CVec e; // index (a*d + b)*d + c

    Complex at(int a, int b, int c) const { return e[static_cast<std::size_t>((a * d + b) * d + c)]; }
};

Cube bend_up(const Isometry3& V) {
    Cube T{V.d, CVec(static_cast<std::size_t>(V.d) * V.d * V.d)};
    for (int a = 0; a < V.d; ++a)
        for (int b = 0; b < V.d; ++b)
            for (int c = 0; c < V.d; ++c)
                T.e[static_cast<std::size_t>((a * V.d + b) * V.d + c)] = V.at(b, c, a);
    return T;
}

Cube rotate(const Cube& T) {
    Cube R{T.d, CVec(T.e.size())};
    for (int a = 0; a < T.d; ++a)
        for (int b = 0; b < T.d; ++b)
            for (int c = 0; c < T.d; ++c)
                R.e[static_cast<std::size_t>((a * T.d + b) * T.d + c)] = T.at(c, a, b);
    return R;
}

CMat kron(const CMat& A, const CMat& B) {
    CMat K(A.rows() * B.rows(), A.cols() * B.cols());
    for (long i = 0; i < A.rows(); ++i)
        for (long j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

// Proportional to an isometry: M^dag M = c * 1 with c > 0.
bool proportional_isometry(const CMat& M, double tol) {
    const CMat G = M.adjoint() * M;
    const double c = G.trace().real() / static_cast<double>(G.rows());
    if (!(c > 0)) return false;
    const double dev = (G - c * CMat::Identity(G.rows(), G.cols())).norm();
    return dev <= tol * std::max(1.0, std::abs(c) * std::sqrt(double(G.rows())));
}

} // namespace

Isometry3::Isometry3(int dim, CMat entries) : d(dim), m(std::move(entries)) {
    if (d < 2 || m.rows() != static_cast<long>(d) * d || m.cols() != d)
        throw ShapeError("tensor must be d^2 x d with d >= 2");
}

CVec Isometry3::flat() const {
    CVec out(static_cast<std::size_t>(d) * d * d);
    for (int jk = 0; jk < d * d; ++jk)
        for (int l = 0; l < d; ++l) out[static_cast<std::size_t>(jk * d + l)] = m(jk, l);
    return out;
}

Isometry3 Isometry3::from_entries(int d, const CVec& entries) {
    if (d < 2) throw ShapeError("local dimension must be at least 2");
    if (entries.size() != pow_size(d, 3))
        throw ShapeError("expected " + std::to_string(pow_size(d, 3)) + " entries, got " +
                         std::to_string(entries.size()));
    CMat m(d * d, d);
    for (int jk = 0; jk < d * d; ++jk)
        for (int l = 0; l < d; ++l) m(jk, l) = entries[static_cast<std::size_t>(jk * d + l)];
    return Isometry3(d, std::move(m));
}

Isometry3 qutrit_tensor() {
    const double w = 1.0 / std::sqrt(2.0);
    CMat m = CMat::Zero(9, 3);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l)
                if (j != k && k != l && j != l) m(j * 3 + k, l) = w;
    return Isometry3(3, std::move(m));
}

TensorReport verify_tensor(const Isometry3& V, double tol) {
    TensorReport rep;
    const int d = V.d;

    const CMat G = V.m.adjoint() * V.m;
    rep.isometry = (G - CMat::Identity(d, d)).norm() <= tol * std::sqrt(double(d));

    rep.swap_invariant = true;
    for (int j = 0; j < d && rep.swap_invariant; ++j)
        for (int k = 0; k < d && rep.swap_invariant; ++k)
            for (int l = 0; l < d; ++l)
                if (std::abs(V.at(j, k, l) - V.at(k, j, l)) > tol) {
                    rep.swap_invariant = false;
                    break;
                }

    const Cube T = bend_up(V);
    const Cube T1 = rotate(T);
    const Cube T2 = rotate(T1);

    double mx = 0;
    for (std::size_t i = 0; i < T.e.size(); ++i)
        mx = std::max(mx, std::abs(T.e[i] - T1.e[i]));
    rep.rotation_invariant = mx <= tol;

    // Zero legs down: any nonzero vector will do.
    double n2 = 0;
    for (const Complex& z : T.e) n2 += std::norm(z);
    rep.planar_perfect = n2 > tol * tol;
    // One leg down, all rotations: flatten (bc | a) and test proportionality.
    for (const Cube* C : {&T, &T1, &T2}) {
        CMat M(d * d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c) M(b * d + c, a) = C->at(a, b, c);
        if (!proportional_isometry(M, tol)) rep.planar_perfect = false;
    }
    return rep;
}

CMat ascend(const Isometry3& V, const CMat& A) {
    if (A.rows() != V.d || A.cols() != V.d) throw ShapeError("operator shape mismatch");
    return V.m.adjoint() * kron(A, CMat::Identity(V.d, V.d)) * V.m;
}

CMat ascend2(const Isometry3& V, const CMat& A, const CMat& B) {
    if (A.rows() != V.d || A.cols() != V.d || B.rows() != V.d || B.cols() != V.d)
        throw ShapeError("operator shape mismatch");
    return V.m.adjoint() * kron(A, B) * V.m;
}

namespace {

std::vector<CMat> duals_for(const std::vector<CMat>& mu, int d) {
    const int n = static_cast<int>(mu.size());
    CMat M(d * d, n);
    for (int a = 0; a < n; ++a) M.col(a) = vec_rm(mu[static_cast<std::size_t>(a)]);
    if (n != d * d) throw DegeneracyError("operator basis does not span");
    Eigen::FullPivLU<CMat> lu(M);
    if (!lu.isInvertible())
        throw DegeneracyError("operator basis is numerically singular");
    const CMat N = static_cast<double>(d) * lu.inverse().adjoint();
    std::vector<CMat> nu;
    nu.reserve(mu.size());
    for (int a = 0; a < n; ++a) nu.push_back(unvec_rm(N.col(a), d));
    return nu;
}

double dim_of(const Complex& lambda) {
    return -std::log2(std::abs(lambda));
}

void fill_scalar_data(AscendingSystem& sys) {
    const std::size_t n = sys.lambda.size();
    sys.h.resize(n);
    sys.vac.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
        sys.h[a] = dim_of(sys.lambda[a]);
        sys.vac[a] = sys.mu[a].trace() / static_cast<double>(sys.d);
    }
    if (sys.names.empty()) {
        sys.names.resize(n);
        for (std::size_t a = 0; a < n; ++a) sys.names[a] = std::to_string(a);
    }
}

} // namespace

AscendingSystem ascending_eigensystem(const Isometry3& V, const std::vector<CMat>& basis,
                                      double tol) {
    const int d = V.d;
    if (basis.size() != static_cast<std::size_t>(d) * d)
        throw ShapeError("explicit basis must contain d^2 operators");
    AscendingSystem sys;
    sys.d = d;
    sys.V = V.flat();
    sys.mu = basis;
    sys.lambda.reserve(basis.size());
    for (const CMat& mu : basis) {
        if (mu.rows() != d || mu.cols() != d) throw ShapeError("operator shape mismatch");
        const CMat E = ascend(V, mu);
        const Complex nrm = hs_inner(mu, mu);
        if (std::abs(nrm) < 1e-14) throw DegeneracyError("zero operator in basis");
        const Complex lam = hs_inner(mu, E) / nrm;
        if ((E - lam * mu).norm() > tol * std::max(1.0, mu.norm()))
            throw DegeneracyError("operator is not an eigenvector of the ascending channel");
        sys.lambda.push_back(lam);
    }
    sys.nu = duals_for(sys.mu, d);
    fill_scalar_data(sys);
    return sys;
}

AscendingSystem ascending_eigensystem(const Isometry3& V) {
    const int d = V.d;
    const int n = d * d;

    // Superoperator of A -> V^dag (A x 1) V acting on row-major vec(A):
    // Ehat[(l,l'), (j,j')] = sum_k conj(V[jk,l]) V[j'k,l'].
    CMat Ehat = CMat::Zero(n, n);
    for (int l = 0; l < d; ++l)
        for (int lp = 0; lp < d; ++lp)
            for (int j = 0; j < d; ++j)
                for (int jp = 0; jp < d; ++jp) {
                    Complex s = 0;
                    for (int k = 0; k < d; ++k)
                        s += std::conj(V.at(j, k, l)) * V.at(jp, k, lp);
                    Ehat(l * d + lp, j * d + jp) = s;
                }

    Eigen::ComplexEigenSolver<CMat> solver(Ehat);
    if (solver.info() != Eigen::Success)
        throw DegeneracyError("eigendecomposition of the ascending channel failed");

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const Complex la = solver.eigenvalues()(a), lb = solver.eigenvalues()(b);
        const double ha = dim_of(la), hb = dim_of(lb);
        if (std::abs(ha - hb) > 1e-12) return ha < hb;
        double ar = std::arg(la), br = std::arg(lb);
        if (ar < -1e-12) ar += 2 * kPi; // sweep angles CCW from the positive axis
        if (br < -1e-12) br += 2 * kPi;
        return ar < br - 1e-12;
    });

    AscendingSystem sys;
    sys.d = d;
    sys.V = V.flat();
    sys.mu.reserve(static_cast<std::size_t>(n));
    sys.lambda.reserve(static_cast<std::size_t>(n));
    for (int idx : order) {
        CMat mu = unvec_rm(solver.eigenvectors().col(idx), d);
        // Gauge: unit Hilbert-Schmidt norm, first nonzero entry real positive.
        const double nrm = std::sqrt(std::abs(hs_inner(mu, mu)));
        if (nrm < 1e-14) throw DegeneracyError("degenerate eigenvector");
        mu /= nrm;
        for (int a = 0; a < d * d; ++a) {
            const Complex z = mu(a / d, a % d);
            if (std::abs(z) > 1e-9) {
                mu *= std::abs(z) / z;
                break;
            }
        }
        sys.mu.push_back(std::move(mu));
        sys.lambda.push_back(solver.eigenvalues()(idx));
    }

    // The channel is unital, so lambda[0] should be 1 with eigenvector 1.
    if (std::abs(sys.lambda[0] - 1.0) > 1e-9 ||
        (sys.mu[0] - CMat::Identity(d, d)).norm() > 1e-7)
        throw DegeneracyError("leading eigenvector is not the identity");
    sys.lambda[0] = 1.0;
    sys.mu[0] = CMat::Identity(d, d);

    sys.nu = duals_for(sys.mu, d);
    fill_scalar_data(sys);
    return sys;
}

FusionTensor fusion_coefficients(const AscendingSystem& sys, const Isometry3& V) {
    const std::size_t n = sys.fields();
    if (sys.mu.size() != n || sys.nu.size() != n)
        throw ShapeError("system has no operator basis");
    FusionTensor f(n, std::vector<std::vector<Complex>>(n, std::vector<Complex>(n)));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            const CMat F = ascend2(V, sys.mu[a], sys.mu[b]);
            for (std::size_t g = 0; g < n; ++g) f[a][b][g] = hs_inner(sys.nu[g], F);
        }
    return f;
}

bool verify_blob(const Isometry3& V, const CVec& b, double tol) {
    const int d = V.d;
    if (b.size() != static_cast<std::size_t>(d)) throw ShapeError("blob vector length mismatch");
    double n2 = 0;
    for (const Complex& z : b) n2 += std::norm(z);
    if (n2 < 1e-28) throw DegenerateBlobError("blob vector is zero");
    double dev = 0;
    for (int l = 0; l < d; ++l) {
        Complex s = 0;
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                s += b[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(k)] * V.at(j, k, l);
        dev = std::max(dev, std::abs(s - b[static_cast<std::size_t>(l)]));
    }
    return dev <= tol * std::max(1.0, std::sqrt(n2));
}

std::vector<CVec> qutrit_blobs() {
    const double w = 1.0 / std::sqrt(2.0);
    return {
        {w, w, w},
        {w, -w, -w},
        {-w, w, -w},
        {-w, -w, w},
    };
}

std::vector<CMat> qutrit_basis() {
    auto mat = [](std::initializer_list<double> rm) {
        CMat A(3, 3);
        int i = 0;
        for (double v : rm) {
            A(i / 3, i % 3) = v;
            ++i;
        }
        return A;
    };
    std::vector<CMat> mu;
    mu.push_back(CMat::Identity(3, 3));                  // 1
    mu.push_back(mat({-1, 0, 0, 0, 0, 0, 0, 0, 1}));    // delta1
    mu.push_back(mat({-1, 0, 0, 0, 1, 0, 0, 0, 0}));    // delta2
    mu.push_back(mat({0, 0, 0, 0, 0, 1, 0, 1, 0}));     // beta1
    mu.push_back(mat({0, 0, 1, 0, 0, 0, 1, 0, 0}));     // beta2
    mu.push_back(mat({0, 1, 0, 1, 0, 0, 0, 0, 0}));     // beta3
    mu.push_back(mat({0, 0, 0, 0, 0, -1, 0, 1, 0}));    // alpha1
    mu.push_back(mat({0, 0, -1, 0, 0, 0, 1, 0, 0}));    // alpha2
    mu.push_back(mat({0, -1, 0, 1, 0, 0, 0, 0, 0}));    // alpha3
    return mu;
}

AscendingSystem qutrit_system() {
    const Isometry3 V = qutrit_tensor();
    AscendingSystem sys = ascending_eigensystem(V, qutrit_basis());
    sys.names = {"1", "delta1", "delta2", "beta1", "beta2", "beta3", "alpha1", "alpha2", "alpha3"};
    sys.fusion = fusion_coefficients(sys, V);
    return sys;
}

int AscendingSystem::index(const std::string& name) const {
    for (std::size_t a = 0; a < names.size(); ++a)
        if (names[a] == name) return static_cast<int>(a);
    // fall back to a plain numeric index
    try {
        std::size_t pos = 0;
        const int a = std::stoi(name, &pos);
        if (pos == name.size() && a >= 0 && static_cast<std::size_t>(a) < fields())
            return a;
    } catch (const std::exception&) {
    }
    throw ParameterError("unknown field '" + name + "'");
}

} // namespace tft
