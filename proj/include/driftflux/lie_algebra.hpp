#ifndef DRIFTFLUX_LIE_ALGEBRA_HPP
#define DRIFTFLUX_LIE_ALGEBRA_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftflux/rational.hpp"

namespace dfx {

// Basis order of the finite-dimensional part of the symmetry algebra g:
// D (dilation), G (Galilean boost), Pt, Px, Pv (translations). The ordering
// D > G > Pt > Px > Pv drives subalgebra canonicalization.
enum BasisIndex : int { B_D = 0, B_G = 1, B_PT = 2, B_PX = 3, B_PV = 4 };

// Element of g: rational coefficients on (D, G, Pt, Px, Pv) plus the W(omega)
// part with a polynomial omega(w).
struct GVector {
    std::array<Rational, 5> c{};
    Poly omega;

    bool is_zero() const;
    bool finite_zero() const;

    GVector operator+(const GVector& o) const;
    GVector operator-(const GVector& o) const;
    friend GVector operator*(const Rational& s, const GVector& v);
    bool operator==(const GVector& o) const { return c == o.c && omega == o.omega; }

    std::string str() const;
};

GVector gvec_D();
GVector gvec_G();
GVector gvec_Pt();
GVector gvec_Px();
GVector gvec_Pv();
GVector gvec_W(Poly omega);

// Finite part via the structure constants [Pt,D]=Pt, [Px,D]=Px, [Pt,G]=Px;
// W-part via [W(o1), W(o2)] = W(o1 o2' - o2 o1'). Exact.
GVector commutator(const GVector& x, const GVector& y);

struct not_a_subalgebra : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Span of finitely many generators, optionally together with the whole
// infinite-dimensional W-part ("full"). Generators are reduced to a canonical
// linearly independent set on construction; when the W-part is full, omega
// components of generators are absorbed into it.
class Subspace {
public:
    enum class WPart { None, Full };

    Subspace() = default;
    Subspace(std::vector<GVector> gens, WPart w = WPart::None);

    const std::vector<GVector>& gens() const { return gens_; }
    bool full_w() const { return w_ == WPart::Full; }
    int finite_dim() const { return static_cast<int>(gens_.size()); }
    bool is_zero() const { return gens_.empty() && w_ == WPart::None; }

    bool contains(const GVector& v) const;
    bool contains(const Subspace& o) const;
    bool operator==(const Subspace& o) const { return contains(o) && o.contains(*this); }

    std::string str() const;

private:
    std::vector<GVector> gens_;
    WPart w_ = WPart::None;
};

Subspace alg_g();          // full algebra: finite part + full W
Subspace radical_r();      // <D,G,Pt,Px,Pv>
Subspace nilradical_n();   // <G,Pt,Px,Pv>
Subspace w_ideal();        // g'' = <W(omega)>

Subspace span_sum(const Subspace& a, const Subspace& b);
Subspace bracket_space(const Subspace& a, const Subspace& b);

bool is_subalgebra(const Subspace& s);
bool is_ideal_in_g(const Subspace& s);

// [s, s', s'', ...] down to stabilization; throws not_a_subalgebra when the
// input is not closed under the bracket.
std::vector<Subspace> derived_series(const Subspace& s);
std::vector<Subspace> lower_central_series(const Subspace& s);
bool is_solvable(const Subspace& s);
bool is_nilpotent(const Subspace& s);

// Kernel of the adjoint action restricted to s: {z in s : [z, s] = 0}.
Subspace center(const Subspace& s);

bool radical_check(const Subspace& s);
bool nilradical_check(const Subspace& s);

// {z in i0 : [z, i1] subset of i2}. When i1 carries W-content, i2 must be
// either full-W or W-free (the only megaideal shapes that occur).
Subspace megaideal_closure(const Subspace& i0, const Subspace& i1, const Subspace& i2);

struct MegaidealEntry {
    std::string name;
    Subspace space;
};
// The essential megaideals: r, m1, r', n', Z(g), g'' plus m2 from the
// automorphism matrices.
std::vector<MegaidealEntry> megaideal_list();

// Automorphism matrices of the radical in basis (D,G,Pt,Px,Pv):
// parametrized by b22,b31,b33,b41,b43,b51,b52,b55 with b22*b33*b55 != 0,
// b11 = 1, b42 = b31*b22, b44 = b22*b33 and structural zeros elsewhere.
class AutMatrix {
public:
    static AutMatrix from_params(const Rational& b22, const Rational& b31, const Rational& b33,
                                 const Rational& b41, const Rational& b43, const Rational& b51,
                                 const Rational& b52, const Rational& b55);
    static AutMatrix identity();

    const Rational& at(int i, int j) const { return m_[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
    GVector apply(const GVector& v) const;  // identity on the W-part

private:
    AutMatrix() = default;
    static AutMatrix from_matrix(const std::array<std::array<Rational, 5>, 5>& m);
    std::array<std::array<Rational, 5>, 5> m_{};
    friend AutMatrix aut_product(const AutMatrix&, const AutMatrix&);
    friend AutMatrix aut_inverse(const AutMatrix&);
};

bool aut_preserves_brackets(const AutMatrix& m);
// Product/inverse, with the parametric shape re-verified exactly.
AutMatrix aut_product(const AutMatrix& a, const AutMatrix& b);
AutMatrix aut_inverse(const AutMatrix& a);
// Finite-part invariance of a subspace under an automorphism.
bool aut_invariant(const AutMatrix& m, const Subspace& s);

// Elementary symmetry transformations acting on g by pushforward. WAffine is
// the reparameterization w -> alpha*w + beta (exact polynomial transport);
// WNormalize is the symbolic reparameterization along 1/omega that maps any
// nonzero omega to 1; WGeneral carries an opaque label and supports transport
// of the zero omega only.
struct GroupElement {
    enum class Tag { PtShift, PxShift, PvShift, Dilation, Galilean, WAffine, WNormalize, WGeneral };
    Tag tag = Tag::PtShift;
    Rational a{};  // shift / dilation factor / alpha
    Rational b{};  // beta for WAffine
    std::string label{};

    static GroupElement pt_shift(Rational s) { return {Tag::PtShift, s, {}, {}}; }
    static GroupElement px_shift(Rational s) { return {Tag::PxShift, s, {}, {}}; }
    static GroupElement pv_shift(Rational s) { return {Tag::PvShift, s, {}, {}}; }
    static GroupElement dilation(Rational d);
    static GroupElement galilean(Rational g) { return {Tag::Galilean, g, {}, {}}; }
    static GroupElement w_affine(Rational alpha, Rational beta);
    static GroupElement w_normalize() { return {Tag::WNormalize, {}, {}, {}}; }

    std::string str() const;
};

struct unsupported_transport : std::runtime_error {
    using std::runtime_error::runtime_error;
};

GVector adjoint_push(const GroupElement& g, const GVector& x);

// Canonical representative of <X> among the six one-parameter families, with
// a replayable witness: applying the witness to X gives scale * canonical,
// exactly.
struct Canonical1D {
    int family = 0;  // 1..6
    Rational a{}, b{};
    int delta1 = 0, delta2 = 0;
    std::vector<GroupElement> witness;
    Rational scale{1};
    GVector canonical;
};

Canonical1D canonicalize_1d(const GVector& x);  // throws std::invalid_argument on zero input

// Bracket-closure verification of the listed two-dimensional subalgebra
// families at given parameter values.
struct TwoDimCheck {
    int family = 0;
    std::string description;
    bool closed = false;
    Rational c1{}, c2{};  // [Q1,Q2] = c1*Q1 + c2*Q2 when closed
};
std::vector<TwoDimCheck> verify_2d_list(uint64_t seed);

// Parses e.g. "D+3G-1/2Pt+W(w^2-1)" into a GVector. Throws
// std::invalid_argument with the offending token on malformed input.
GVector parse_gvector(const std::string& text);

}  // namespace dfx

#endif
