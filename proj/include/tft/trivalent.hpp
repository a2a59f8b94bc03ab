#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tft/kernels.hpp"
#include "tft/tensorlab.hpp"

namespace tft {

// Skein evaluation of planar trivalent diagrams.  A diagram lives in a disk
// with `boundary` marked points on the rim; every internal vertex is
// trivalent.  Closed loops count a factor d, a vertex whose loop closes on
// itself kills the diagram, parallel double edges contract with a factor b,
// triangles with a factor t, and four-sided faces are rewritten through the
// basis of four-point diagrams.

struct TrivalentParams {
    Complex d{0.0, 0.0};  // value of a closed loop
    Complex b{0.0, 0.0};  // bigon contraction constant
    Complex t{0.0, 0.0};  // triangle contraction constant
    int dim_c4 = 4;       // dimension of the four-point space: 2, 3 or 4

    // d and b must be nonzero and dim_c4 must fit the parameters: dimension 3
    // needs bd + t - dt - 2b = 0 and dimension 2 needs the golden-ratio locus
    // bd + t + dt = 0 with 2b^5d + 2b^4dt - 4b^3dt^2 + 2bdt^4 + 2bd^2t^4 = 0.
    // Violations raise ParameterError.
    void validate(double tol = 1e-9) const;

    // d = (1+sqrt5)/2, b = 1, t = (1-sqrt5)/2, dim_c4 = 2.
    static TrivalentParams fibonacci();
};

// Planar diagram as a rotation system: each internal vertex carries three
// slots in counterclockwise order, each boundary mark carries one strand end,
// and edges pair up the ends.  Vertex-free loops are kept in a counter.
class Diagram {
public:
    Diagram() = default;  // the empty closed diagram

    // Port codes accepted by make(): boundary mark i is mark(i), slot s of
    // internal vertex v is port(v, s).
    static int mark(int i) { return -1 - i; }
    static int port(int v, int s) { return 3 * v + s; }

    // Builds a diagram from an edge list over port codes.  Every mark and
    // every vertex slot must be used exactly once; anything else is a
    // ShapeError.
    static Diagram make(int boundary, int vertices,
                        const std::vector<std::pair<int, int>>& edges, long circles = 0);
    static Diagram circle(long count = 1);

    int boundary() const { return boundary_; }
    int vertex_count() const { return vertices_; }
    long circles() const { return circles_; }
    std::size_t edge_count() const;
    bool empty() const;

    // Strand ends are numbered 0..ends()-1: first the marks, then the vertex
    // slots in blocks of three.
    int ends() const;
    int theta(int h) const;            // the other end of the edge through h
    bool is_mark_end(int h) const { return h < boundary_; }
    int end_of_mark(int i) const { return i; }
    int end_of_port(int v, int s) const { return boundary_ + 3 * v + s; }
    int end_vertex(int h) const { return h < boundary_ ? -1 : (h - boundary_) / 3; }
    int end_slot(int h) const { return h < boundary_ ? 0 : (h - boundary_) % 3; }

    // Reflection of the disk; reverses every rotation, keeps mark numbering.
    Diagram mirrored() const;

    // Copy with the free-loop counter replaced.
    Diagram with_circles(long count) const;

    // Label-independent encoding (boundary-anchored traversal); two diagrams
    // are the same planar picture iff the keys agree.
    std::string canonical_key() const;
    bool operator==(const Diagram& other) const;

private:
    int boundary_ = 0;
    int vertices_ = 0;
    long circles_ = 0;
    std::vector<int> theta_;
};

// Complex-weighted formal sum of diagrams; add() merges structurally equal
// terms.
struct DiagramSum {
    std::vector<std::pair<Complex, Diagram>> terms;

    DiagramSum() = default;
    explicit DiagramSum(const Diagram& d) { terms.emplace_back(Complex{1.0, 0.0}, d); }
    DiagramSum(Complex c, const Diagram& d) { terms.emplace_back(c, d); }

    DiagramSum& add(Complex c, const Diagram& d);
};

// Four-point basis diagrams: beta4(1) nests the cups (1,4)(2,3), beta4(2)
// pairs neighbours (1,2)(3,4), beta4(3) and beta4(4) are the two bridged
// variants, square4() is the four-sided face with one leg per corner.
Diagram beta4(int i);
Diagram square4();
// k-gon of vertices with one outward leg each; polygon(1) is the open
// lollipop and polygon(2) the open bigon.
Diagram polygon(int k);
Diagram theta_graph();

// Applies the moves until no internal face with at most four sides remains.
// Faces are processed smallest first, ties broken by lowest strand end; a
// seed switches to a shuffled order (and shuffled square anchoring) for
// confluence experiments.  Scalar outcomes appear as empty-diagram terms.
// A closed diagram whose faces all have five or more sides raises
// IrreducibleError; square faces need dim_c4-consistent parameters.
DiagramSum reduce(const DiagramSum& s, const TrivalentParams& p,
                  std::optional<unsigned> seed = std::nullopt);
DiagramSum reduce(const Diagram& d, const TrivalentParams& p,
                  std::optional<unsigned> seed = std::nullopt);

bool is_scalar(const DiagramSum& s);
// The coefficient of the empty diagram; ShapeError when diagram terms remain.
Complex scalar_value(const DiagramSum& s);

// tr(a-dagger . b): reflect a, glue rim to rim, reduce.  The pairing is
// bilinear (coefficients are not conjugated).
Complex inner_product(const Diagram& a, const Diagram& b, const TrivalentParams& p);
Complex inner_product(const DiagramSum& a, const DiagramSum& b, const TrivalentParams& p);

Eigen::MatrixXcd gram_matrix(const std::vector<Diagram>& basis, const TrivalentParams& p);

// Triangular orthonormalization of a diagram basis: theta rows satisfy
// Theta G Theta^T = identity on the span.  Near-null vectors are skipped
// (rank drops); a pivot that is not a positive real within tol means the
// form is indefinite on the basis and raises GramError.
struct GramBasis {
    Eigen::MatrixXcd gram;
    Eigen::MatrixXcd theta;
    int rank = 0;
};
GramBasis gram_orthonormalize(const std::vector<Diagram>& basis, const TrivalentParams& p,
                              double tol = 1e-9);

// Components c with x = sum_k c_k beta_k from the scalar products
// <beta_l, x>, using c_k = sum_jl Theta_jl Theta_jk <beta_l, x>.
Eigen::VectorXcd recover_components(const GramBasis& gb, const Eigen::VectorXcd& beta_dot_x);
Eigen::VectorXcd recover_components(const std::vector<Diagram>& basis, const GramBasis& gb,
                                    const DiagramSum& x, const TrivalentParams& p);

// Closed-form expansion of the square on the four-point basis together with
// the resulting window value, per dim_c4.  Degenerate denominators or
// parameters inconsistent with dim_c4 raise ParameterError.
struct SquareWindow {
    std::vector<Complex> coefficients;
    Complex window;
};
SquareWindow square_window(const TrivalentParams& p);

// Ascending system of the golden-ratio lattice.  The coarse-graining vertex
// doubles every line, splits both strands and braids the inner pair; the
// crossing resolves into identity plus a phase times the cup-cap.  E is
// computed entry by entry through closed-diagram reduction on the pair basis
// (identity, cup-cap); columns hold the images of the basis vectors.
struct FibonacciData {
    AscendingSystem system;   // names 1, tau with eigendata, vacuum and fusion
    CMat ascend;              // 2x2 matrix of the coarse-graining map
    CMat gram;                // pair Gram matrix [[d^2, d], [d, d^2]]
    CMat theta;               // orthonormalization coefficients for the pair basis
    Eigen::Vector2cd mu_tau;  // nontrivial eigenfield on (identity, cup-cap)
};
FibonacciData fib_ascending(const TrivalentParams& p);

} // namespace tft
