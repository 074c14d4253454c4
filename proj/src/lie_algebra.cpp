#include "driftflux/lie_algebra.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace dfx {

namespace {

const char* kBasisNames[5] = {"D", "G", "Pt", "Px", "Pv"};

// ---- exact linear algebra on rational row vectors -------------------------

using RatVec = std::vector<Rational>;
using RatRows = std::vector<RatVec>;

// In-place reduced row echelon form; zero rows dropped.
RatRows rref(RatRows rows) {
    const size_t ncol = rows.empty() ? 0 : rows[0].size();
    size_t r = 0;
    for (size_t col = 0; col < ncol && r < rows.size(); ++col) {
        size_t piv = r;
        while (piv < rows.size() && rows[piv][col].is_zero()) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[r], rows[piv]);
        const Rational inv = Rational(1) / rows[r][col];
        for (auto& x : rows[r]) x = x * inv;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][col].is_zero()) continue;
            const Rational f = rows[i][col];
            for (size_t j = 0; j < ncol; ++j) rows[i][j] = rows[i][j] - f * rows[r][j];
        }
        ++r;
    }
    rows.resize(r);
    return rows;
}

// Reduces v against RREF rows; returns the residue.
RatVec reduce_by(const RatRows& rows, RatVec v) {
    for (const auto& row : rows) {
        size_t lead = 0;
        while (lead < row.size() && row[lead].is_zero()) ++lead;
        if (lead == row.size()) continue;
        if (v[lead].is_zero()) continue;
        const Rational f = v[lead];
        for (size_t j = lead; j < v.size(); ++j) v[j] = v[j] - f * row[j];
    }
    return v;
}

bool is_zero_vec(const RatVec& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x.is_zero(); });
}

// Nullspace basis of the system rows * c = 0 (rows indexed by equations,
// columns by unknowns).
RatRows nullspace(const RatRows& eqs, size_t nunk) {
    RatRows R = rref(eqs);
    std::vector<int> pivot_col;
    std::vector<bool> is_pivot(nunk, false);
    for (const auto& row : R) {
        size_t lead = 0;
        while (lead < row.size() && row[lead].is_zero()) ++lead;
        if (lead < row.size()) {
            pivot_col.push_back(static_cast<int>(lead));
            is_pivot[lead] = true;
        }
    }
    RatRows basis;
    for (size_t fc = 0; fc < nunk; ++fc) {
        if (is_pivot[fc]) continue;
        RatVec v(nunk);
        v[fc] = Rational(1);
        for (size_t ri = 0; ri < R.size(); ++ri) {
            const int pc = pivot_col[ri];
            v[static_cast<size_t>(pc)] = -R[ri][fc];
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

int max_omega_degree(const std::vector<GVector>& vs) {
    int d = 0;
    for (const auto& v : vs) d = std::max(d, v.omega.degree());
    return d;
}

RatVec embed(const GVector& v, int maxdeg, bool drop_omega) {
    RatVec out(5 + (drop_omega ? 0 : static_cast<size_t>(maxdeg) + 1));
    for (int i = 0; i < 5; ++i) out[static_cast<size_t>(i)] = v.c[static_cast<size_t>(i)];
    if (!drop_omega)
        for (int k = 0; k <= maxdeg; ++k) out[static_cast<size_t>(5 + k)] = v.omega.coeff(k);
    return out;
}

GVector unembed(const RatVec& v) {
    GVector g;
    for (int i = 0; i < 5; ++i) g.c[static_cast<size_t>(i)] = v[static_cast<size_t>(i)];
    std::vector<Rational> coeffs(v.begin() + 5, v.end());
    g.omega = Poly(std::move(coeffs));
    return g;
}

bool has_w_content(const Subspace& s) {
    if (s.full_w()) return true;
    for (const auto& g : s.gens())
        if (!g.omega.is_zero()) return true;
    return false;
}

std::vector<GVector> finite_basis() {
    return {gvec_D(), gvec_G(), gvec_Pt(), gvec_Px(), gvec_Pv()};
}

}  // namespace

// ---- GVector ---------------------------------------------------------------

bool GVector::is_zero() const { return finite_zero() && omega.is_zero(); }

bool GVector::finite_zero() const {
    return std::all_of(c.begin(), c.end(), [](const Rational& x) { return x.is_zero(); });
}

GVector GVector::operator+(const GVector& o) const {
    GVector r;
    for (int i = 0; i < 5; ++i) r.c[static_cast<size_t>(i)] = c[static_cast<size_t>(i)] + o.c[static_cast<size_t>(i)];
    r.omega = omega + o.omega;
    return r;
}

GVector GVector::operator-(const GVector& o) const {
    GVector r;
    for (int i = 0; i < 5; ++i) r.c[static_cast<size_t>(i)] = c[static_cast<size_t>(i)] - o.c[static_cast<size_t>(i)];
    r.omega = omega - o.omega;
    return r;
}

GVector operator*(const Rational& s, const GVector& v) {
    GVector r;
    for (int i = 0; i < 5; ++i) r.c[static_cast<size_t>(i)] = s * v.c[static_cast<size_t>(i)];
    r.omega = s * v.omega;
    return r;
}

std::string GVector::str() const {
    std::string s;
    for (int i = 0; i < 5; ++i) {
        const Rational& ci = c[static_cast<size_t>(i)];
        if (ci.is_zero()) continue;
        const bool neg = ci < Rational();
        const Rational mag = neg ? -ci : ci;
        if (s.empty()) s += neg ? "-" : "";
        else s += neg ? " - " : " + ";
        if (mag != Rational(1)) s += mag.str() + "*";
        s += kBasisNames[i];
    }
    if (!omega.is_zero()) {
        if (!s.empty()) s += " + ";
        s += "W(" + omega.str() + ")";
    }
    return s.empty() ? "0" : s;
}

GVector gvec_D() { GVector v; v.c[B_D] = Rational(1); return v; }
GVector gvec_G() { GVector v; v.c[B_G] = Rational(1); return v; }
GVector gvec_Pt() { GVector v; v.c[B_PT] = Rational(1); return v; }
GVector gvec_Px() { GVector v; v.c[B_PX] = Rational(1); return v; }
GVector gvec_Pv() { GVector v; v.c[B_PV] = Rational(1); return v; }
GVector gvec_W(Poly omega) { GVector v; v.omega = std::move(omega); return v; }

GVector commutator(const GVector& x, const GVector& y) {
    GVector r;
    // [Pt,D] = Pt, [Px,D] = Px, [Pt,G] = Px; all other finite brackets vanish.
    r.c[B_PT] = x.c[B_PT] * y.c[B_D] - y.c[B_PT] * x.c[B_D];
    r.c[B_PX] = x.c[B_PX] * y.c[B_D] - y.c[B_PX] * x.c[B_D] + x.c[B_PT] * y.c[B_G] - y.c[B_PT] * x.c[B_G];
    r.omega = x.omega * y.omega.derivative() - y.omega * x.omega.derivative();
    return r;
}

// ---- Subspace ---------------------------------------------------------------

Subspace::Subspace(std::vector<GVector> gens, WPart w) : w_(w) {
    if (w_ == WPart::Full)
        for (auto& g : gens) g.omega = Poly();
    const int maxdeg = max_omega_degree(gens);
    RatRows rows;
    for (const auto& g : gens)
        if (!g.is_zero()) rows.push_back(embed(g, maxdeg, w_ == WPart::Full));
    rows = rref(std::move(rows));
    for (const auto& row : rows) {
        if (w_ == WPart::Full) {
            RatVec padded = row;
            gens_.push_back(unembed(padded));
        } else {
            gens_.push_back(unembed(row));
        }
    }
}

bool Subspace::contains(const GVector& v) const {
    GVector probe = v;
    if (w_ == WPart::Full) probe.omega = Poly();
    const int maxdeg = std::max(max_omega_degree(gens_), probe.omega.degree());
    RatRows rows;
    for (const auto& g : gens_) rows.push_back(embed(g, maxdeg, false));
    rows = rref(std::move(rows));
    return is_zero_vec(reduce_by(rows, embed(probe, maxdeg, false)));
}

bool Subspace::contains(const Subspace& o) const {
    if (o.full_w() && !full_w()) return false;
    return std::all_of(o.gens_.begin(), o.gens_.end(),
                       [&](const GVector& g) { return contains(g); });
}

std::string Subspace::str() const {
    std::string s = "<";
    for (size_t i = 0; i < gens_.size(); ++i) {
        if (i) s += ", ";
        s += gens_[i].str();
    }
    if (w_ == WPart::Full) {
        if (!gens_.empty()) s += ", ";
        s += "W(*)";
    }
    return s + ">";
}

Subspace alg_g() { return Subspace(finite_basis(), Subspace::WPart::Full); }
Subspace radical_r() { return Subspace(finite_basis()); }
Subspace nilradical_n() { return Subspace({gvec_G(), gvec_Pt(), gvec_Px(), gvec_Pv()}); }
Subspace w_ideal() { return Subspace({}, Subspace::WPart::Full); }

Subspace span_sum(const Subspace& a, const Subspace& b) {
    std::vector<GVector> gens = a.gens();
    gens.insert(gens.end(), b.gens().begin(), b.gens().end());
    const auto w = (a.full_w() || b.full_w()) ? Subspace::WPart::Full : Subspace::WPart::None;
    return Subspace(std::move(gens), w);
}

Subspace bracket_space(const Subspace& a, const Subspace& b) {
    std::vector<GVector> gens;
    for (const auto& x : a.gens())
        for (const auto& y : b.gens()) gens.push_back(commutator(x, y));
    const bool full = (a.full_w() && has_w_content(b)) || (b.full_w() && has_w_content(a));
    return Subspace(std::move(gens), full ? Subspace::WPart::Full : Subspace::WPart::None);
}

bool is_subalgebra(const Subspace& s) {
    const auto& g = s.gens();
    for (size_t i = 0; i < g.size(); ++i)
        for (size_t j = i + 1; j < g.size(); ++j)
            if (!s.contains(commutator(g[i], g[j]))) return false;
    return true;
}

bool is_ideal_in_g(const Subspace& s) {
    // Bracketing any element carrying a nonzero omega against the W-part of g
    // sweeps out an infinite-dimensional image, which only the full W-part
    // can absorb.
    if (!s.full_w() && has_w_content(s)) return false;
    for (const auto& g : s.gens())
        for (const auto& e : finite_basis())
            if (!s.contains(commutator(g, e))) return false;
    return true;
}

std::vector<Subspace> derived_series(const Subspace& s) {
    if (!is_subalgebra(s)) throw not_a_subalgebra("derived_series: input is not closed under the bracket");
    std::vector<Subspace> out{s};
    for (;;) {
        Subspace next = bracket_space(out.back(), out.back());
        if (next == out.back()) break;
        out.push_back(std::move(next));
    }
    return out;
}

std::vector<Subspace> lower_central_series(const Subspace& s) {
    if (!is_subalgebra(s)) throw not_a_subalgebra("lower_central_series: input is not closed under the bracket");
    std::vector<Subspace> out{s};
    for (;;) {
        Subspace next = bracket_space(out.back(), s);
        if (next == out.back()) break;
        out.push_back(std::move(next));
    }
    return out;
}

bool is_solvable(const Subspace& s) { return derived_series(s).back().is_zero(); }
bool is_nilpotent(const Subspace& s) { return lower_central_series(s).back().is_zero(); }

Subspace center(const Subspace& s) {
    if (!is_subalgebra(s)) throw not_a_subalgebra("center: input is not closed under the bracket");
    const auto& gens = s.gens();
    if (gens.empty()) return Subspace();  // a full W-part alone has trivial center
    std::vector<GVector> tests = gens;
    if (s.full_w()) {
        // [W(omega),W(1)] = -omega', [W(omega),W(w)] = omega - w*omega':
        // vanishing against both forces omega = 0.
        tests.push_back(gvec_W(Poly(Rational(1))));
        tests.push_back(gvec_W(Poly::variable()));
    }
    std::vector<GVector> brkts;
    for (const auto& g : gens)
        for (const auto& t : tests) brkts.push_back(commutator(g, t));
    const int maxdeg = max_omega_degree(brkts);
    RatRows eqs;  // rows: one per embedding coordinate per test
    const size_t ncoord = 5 + static_cast<size_t>(maxdeg) + 1;
    for (size_t ti = 0; ti < tests.size(); ++ti) {
        for (size_t coord = 0; coord < ncoord; ++coord) {
            RatVec eq(gens.size());
            bool nonzero = false;
            for (size_t gi = 0; gi < gens.size(); ++gi) {
                const RatVec b = embed(brkts[gi * tests.size() + ti], maxdeg, false);
                eq[gi] = b[coord];
                nonzero = nonzero || !eq[gi].is_zero();
            }
            if (nonzero) eqs.push_back(std::move(eq));
        }
    }
    std::vector<GVector> result;
    for (const auto& coefs : nullspace(eqs, gens.size())) {
        GVector z;
        for (size_t gi = 0; gi < gens.size(); ++gi) z = z + coefs[gi] * gens[gi];
        result.push_back(std::move(z));
    }
    return Subspace(std::move(result));
}

namespace {

// Adds e to s and closes under the bracket.
Subspace subalgebra_closure(Subspace s) {
    for (int guard = 0; guard < 16; ++guard) {
        Subspace next = span_sum(s, bracket_space(s, s));
        if (next == s) return s;
        s = std::move(next);
    }
    throw std::logic_error("subalgebra_closure: failed to stabilize");
}

// Maximality among ideals with the given property: adding any ambient basis
// direction (or the whole W-part) must break it.
template <typename Pred>
bool maximal_with(const Subspace& s, Pred pred) {
    for (const auto& e : finite_basis()) {
        if (s.contains(e)) continue;
        Subspace t = subalgebra_closure(span_sum(s, Subspace({e})));
        if (is_ideal_in_g(t) && pred(t)) return false;
    }
    if (!s.full_w()) {
        Subspace t = subalgebra_closure(span_sum(s, w_ideal()));
        if (is_ideal_in_g(t) && pred(t)) return false;
    }
    return true;
}

}  // namespace

bool radical_check(const Subspace& s) {
    if (!is_ideal_in_g(s) || !is_solvable(s)) return false;
    return maximal_with(s, [](const Subspace& t) { return is_solvable(t); });
}

bool nilradical_check(const Subspace& s) {
    if (!is_ideal_in_g(s) || !is_nilpotent(s)) return false;
    return maximal_with(s, [](const Subspace& t) { return is_nilpotent(t); });
}

Subspace megaideal_closure(const Subspace& i0, const Subspace& i1, const Subspace& i2) {
    if (has_w_content(i1) && !i2.full_w() && has_w_content(i2))
        throw std::invalid_argument(
            "megaideal_closure: i2 must be full-W or W-free when i1 carries W-content");

    const auto& gens = i0.gens();
    std::vector<GVector> tests = i1.gens();
    std::vector<GVector> brkts;
    for (const auto& g : gens)
        for (const auto& t : tests) brkts.push_back(commutator(g, t));

    int maxdeg = std::max(max_omega_degree(brkts), max_omega_degree(gens));
    maxdeg = std::max(maxdeg, max_omega_degree(i2.gens()));
    RatRows i2rows;
    for (const auto& g : i2.gens()) i2rows.push_back(embed(g, maxdeg, i2.full_w()));
    i2rows = rref(std::move(i2rows));

    RatRows eqs;
    const size_t ncoord = i2.full_w() ? 5 : 5 + static_cast<size_t>(maxdeg) + 1;
    for (size_t ti = 0; ti < tests.size(); ++ti) {
        std::vector<RatVec> residues(gens.size());
        for (size_t gi = 0; gi < gens.size(); ++gi)
            residues[gi] = reduce_by(i2rows, embed(brkts[gi * tests.size() + ti], maxdeg, i2.full_w()));
        for (size_t coord = 0; coord < ncoord; ++coord) {
            RatVec eq(gens.size());
            bool nonzero = false;
            for (size_t gi = 0; gi < gens.size(); ++gi) {
                eq[gi] = residues[gi][coord];
                nonzero = nonzero || !eq[gi].is_zero();
            }
            if (nonzero) eqs.push_back(std::move(eq));
        }
    }
    if (has_w_content(i1) && !i2.full_w()) {
        // The combined omega of the solution must vanish identically.
        for (int k = 0; k <= maxdeg; ++k) {
            RatVec eq(gens.size());
            bool nonzero = false;
            for (size_t gi = 0; gi < gens.size(); ++gi) {
                eq[gi] = gens[gi].omega.coeff(k);
                nonzero = nonzero || !eq[gi].is_zero();
            }
            if (nonzero) eqs.push_back(std::move(eq));
        }
    }

    std::vector<GVector> result;
    for (const auto& coefs : nullspace(eqs, gens.size())) {
        GVector z;
        for (size_t gi = 0; gi < gens.size(); ++gi) z = z + coefs[gi] * gens[gi];
        result.push_back(std::move(z));
    }
    const bool res_full = i0.full_w() && (!has_w_content(i1) || i2.full_w());
    return Subspace(std::move(result), res_full ? Subspace::WPart::Full : Subspace::WPart::None);
}

std::vector<MegaidealEntry> megaideal_list() {
    return {
        {"r", radical_r()},
        {"m1", Subspace({gvec_G(), gvec_Px(), gvec_Pv()})},
        {"r'", Subspace({gvec_Pt(), gvec_Px()})},
        {"n'", Subspace({gvec_Px()})},
        {"Z(g)", Subspace({gvec_Pv()})},
        {"g''", w_ideal()},
        {"m2", Subspace({gvec_D(), gvec_Pt(), gvec_Px(), gvec_Pv()})},
    };
}

// ---- AutMatrix --------------------------------------------------------------

AutMatrix AutMatrix::from_params(const Rational& b22, const Rational& b31, const Rational& b33,
                                 const Rational& b41, const Rational& b43, const Rational& b51,
                                 const Rational& b52, const Rational& b55) {
    if (b22.is_zero() || b33.is_zero() || b55.is_zero())
        throw std::invalid_argument("AutMatrix: b22*b33*b55 must be nonzero");
    AutMatrix m;
    m.m_[0] = {Rational(1), Rational(), Rational(), Rational(), Rational()};
    m.m_[1] = {Rational(), b22, Rational(), Rational(), Rational()};
    m.m_[2] = {b31, Rational(), b33, Rational(), Rational()};
    m.m_[3] = {b41, b31 * b22, b43, b22 * b33, Rational()};
    m.m_[4] = {b51, b52, Rational(), Rational(), b55};
    return m;
}

AutMatrix AutMatrix::identity() {
    return from_params(Rational(1), Rational(), Rational(1), Rational(), Rational(), Rational(),
                       Rational(), Rational(1));
}

AutMatrix AutMatrix::from_matrix(const std::array<std::array<Rational, 5>, 5>& m) {
    auto z = [&](int i, int j) { return m[static_cast<size_t>(i)][static_cast<size_t>(j)].is_zero(); };
    const bool shape_ok =
        m[0][0] == Rational(1) && z(0, 1) && z(0, 2) && z(0, 3) && z(0, 4) &&
        z(1, 0) && z(1, 2) && z(1, 3) && z(1, 4) &&
        z(2, 1) && z(2, 3) && z(2, 4) &&
        z(3, 4) &&
        z(4, 2) && z(4, 3) &&
        m[3][1] == m[2][0] * m[1][1] && m[3][3] == m[1][1] * m[2][2];
    if (!shape_ok) throw std::invalid_argument("AutMatrix: matrix not of the parametric shape");
    return from_params(m[1][1], m[2][0], m[2][2], m[3][0], m[3][2], m[4][0], m[4][1], m[4][4]);
}

GVector AutMatrix::apply(const GVector& v) const {
    GVector out;
    out.omega = v.omega;
    for (int i = 0; i < 5; ++i) {
        Rational s;
        for (int j = 0; j < 5; ++j)
            s += m_[static_cast<size_t>(i)][static_cast<size_t>(j)] * v.c[static_cast<size_t>(j)];
        out.c[static_cast<size_t>(i)] = s;
    }
    return out;
}

bool aut_preserves_brackets(const AutMatrix& m) {
    const auto basis = finite_basis();
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = i + 1; j < basis.size(); ++j) {
            const GVector lhs = m.apply(commutator(basis[i], basis[j]));
            const GVector rhs = commutator(m.apply(basis[i]), m.apply(basis[j]));
            if (!(lhs == rhs)) return false;
        }
    return true;
}

AutMatrix aut_product(const AutMatrix& a, const AutMatrix& b) {
    std::array<std::array<Rational, 5>, 5> p{};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            Rational s;
            for (int k = 0; k < 5; ++k)
                s += a.m_[static_cast<size_t>(i)][static_cast<size_t>(k)] *
                     b.m_[static_cast<size_t>(k)][static_cast<size_t>(j)];
            p[static_cast<size_t>(i)][static_cast<size_t>(j)] = s;
        }
    return AutMatrix::from_matrix(p);
}

AutMatrix aut_inverse(const AutMatrix& a) {
    // Gauss-Jordan on [A | I], exact.
    std::array<std::array<Rational, 10>, 5> w{};
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) w[static_cast<size_t>(i)][static_cast<size_t>(j)] = a.m_[static_cast<size_t>(i)][static_cast<size_t>(j)];
        w[static_cast<size_t>(i)][static_cast<size_t>(5 + i)] = Rational(1);
    }
    for (int col = 0; col < 5; ++col) {
        int piv = col;
        while (piv < 5 && w[static_cast<size_t>(piv)][static_cast<size_t>(col)].is_zero()) ++piv;
        if (piv == 5) throw std::invalid_argument("aut_inverse: singular matrix");
        std::swap(w[static_cast<size_t>(col)], w[static_cast<size_t>(piv)]);
        const Rational inv = Rational(1) / w[static_cast<size_t>(col)][static_cast<size_t>(col)];
        for (auto& x : w[static_cast<size_t>(col)]) x = x * inv;
        for (int i = 0; i < 5; ++i) {
            if (i == col) continue;
            const Rational f = w[static_cast<size_t>(i)][static_cast<size_t>(col)];
            if (f.is_zero()) continue;
            for (int j = 0; j < 10; ++j)
                w[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    w[static_cast<size_t>(i)][static_cast<size_t>(j)] - f * w[static_cast<size_t>(col)][static_cast<size_t>(j)];
        }
    }
    std::array<std::array<Rational, 5>, 5> inv{};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) inv[static_cast<size_t>(i)][static_cast<size_t>(j)] = w[static_cast<size_t>(i)][static_cast<size_t>(5 + j)];
    return AutMatrix::from_matrix(inv);
}

bool aut_invariant(const AutMatrix& m, const Subspace& s) {
    return std::all_of(s.gens().begin(), s.gens().end(), [&](const GVector& g) {
        GVector img = m.apply(g);
        if (s.full_w()) img.omega = Poly();
        return s.contains(img);
    });
}

// ---- adjoint pushforwards ---------------------------------------------------

GroupElement GroupElement::dilation(Rational d) {
    if (d.is_zero()) throw std::invalid_argument("GroupElement: dilation parameter must be nonzero");
    return {Tag::Dilation, d, {}, {}};
}

GroupElement GroupElement::w_affine(Rational alpha, Rational beta) {
    if (alpha.is_zero()) throw std::invalid_argument("GroupElement: affine W needs alpha != 0");
    return {Tag::WAffine, alpha, beta, {}};
}

std::string GroupElement::str() const {
    switch (tag) {
        case Tag::PtShift: return "Pt-shift(" + a.str() + ")";
        case Tag::PxShift: return "Px-shift(" + a.str() + ")";
        case Tag::PvShift: return "Pv-shift(" + a.str() + ")";
        case Tag::Dilation: return "dilation(" + a.str() + ")";
        case Tag::Galilean: return "galilean(" + a.str() + ")";
        case Tag::WAffine: return "W-affine(" + a.str() + "," + b.str() + ")";
        case Tag::WNormalize: return "W-normalize";
        case Tag::WGeneral: return "W-general(" + label + ")";
    }
    return "?";
}

GVector adjoint_push(const GroupElement& g, const GVector& x) {
    GVector y = x;
    switch (g.tag) {
        case GroupElement::Tag::PtShift:
            y.c[B_PT] = y.c[B_PT] - g.a * y.c[B_D];
            y.c[B_PX] = y.c[B_PX] - g.a * y.c[B_G];
            break;
        case GroupElement::Tag::PxShift:
            y.c[B_PX] = y.c[B_PX] - g.a * y.c[B_D];
            break;
        case GroupElement::Tag::PvShift:
            break;
        case GroupElement::Tag::Dilation:
            y.c[B_PT] = g.a * y.c[B_PT];
            y.c[B_PX] = g.a * y.c[B_PX];
            break;
        case GroupElement::Tag::Galilean:
            y.c[B_PX] = y.c[B_PX] + g.a * y.c[B_PT];
            break;
        case GroupElement::Tag::WAffine: {
            // transport by w -> alpha*w + beta: omega(w) -> alpha*omega((w-beta)/alpha)
            const Rational inv = Rational(1) / g.a;
            y.omega = g.a * x.omega.compose_affine(inv, -(g.b * inv));
            break;
        }
        case GroupElement::Tag::WNormalize:
            if (!x.omega.is_zero()) y.omega = Poly(Rational(1));
            break;
        case GroupElement::Tag::WGeneral:
            if (!x.omega.is_zero())
                throw unsupported_transport("adjoint_push: non-affine W-transport of nonzero omega");
            break;
    }
    return y;
}

// ---- canonicalization of 1D subalgebras -------------------------------------

Canonical1D canonicalize_1d(const GVector& x) {
    if (x.is_zero()) throw std::invalid_argument("canonicalize_1d: zero vector");
    Canonical1D out;
    GVector y = x;
    auto push = [&](const GroupElement& g) {
        // identity actions (zero shifts, unit dilations) carry no information
        if ((g.tag == GroupElement::Tag::PtShift || g.tag == GroupElement::Tag::PxShift ||
             g.tag == GroupElement::Tag::Galilean) &&
            g.a.is_zero())
            return;
        if (g.tag == GroupElement::Tag::Dilation && g.a == Rational(1)) return;
        if (g.tag == GroupElement::Tag::WAffine && g.a == Rational(1) && g.b.is_zero()) return;
        out.witness.push_back(g);
        y = adjoint_push(g, y);
    };

    if (!y.c[B_D].is_zero()) {
        out.family = 1;
        const Rational lead = y.c[B_D];
        push(GroupElement::pt_shift(y.c[B_PT] / lead));
        push(GroupElement::px_shift(y.c[B_PX] / lead));
        out.scale = lead;
        out.a = y.c[B_G] / lead;
        out.b = y.c[B_PV] / lead;
    } else if (!y.c[B_G].is_zero()) {
        out.family = 2;
        const Rational lead = y.c[B_G];
        push(GroupElement::pt_shift(y.c[B_PX] / lead));
        if (!y.c[B_PT].is_zero()) {
            push(GroupElement::dilation(lead / y.c[B_PT]));
            out.delta2 = 1;
        }
        out.scale = lead;
        out.b = y.c[B_PV] / lead;
    } else if (!y.c[B_PT].is_zero()) {
        out.family = 3;
        push(GroupElement::galilean(-(y.c[B_PX] / y.c[B_PT])));
        if (!y.c[B_PV].is_zero()) {
            push(GroupElement::dilation(y.c[B_PV] / y.c[B_PT]));
            out.delta2 = 1;
        }
        out.scale = y.c[B_PT];
    } else if (!y.c[B_PX].is_zero()) {
        out.family = 4;
        if (!y.c[B_PV].is_zero()) {
            push(GroupElement::dilation(y.c[B_PV] / y.c[B_PX]));
            out.delta2 = 1;
        }
        out.scale = y.c[B_PX];
    } else if (!y.c[B_PV].is_zero()) {
        out.family = 5;
        out.scale = y.c[B_PV];
    } else {
        out.family = 6;
    }

    if (!y.omega.is_zero()) {
        out.delta1 = 1;
        if (!y.omega.is_constant()) push(GroupElement::w_normalize());
        if (out.family == 6) {
            out.scale = y.omega.coeff(0);
        } else if (y.omega.coeff(0) != out.scale) {
            // align the constant omega with the overall scale so the final
            // generator is an exact multiple of the canonical form
            push(GroupElement::w_affine(out.scale / y.omega.coeff(0), Rational()));
        }
    }

    out.canonical = (Rational(1) / out.scale) * y;
    return out;
}

// ---- two-dimensional subalgebra list ----------------------------------------

namespace {

// Solves bracket = c1*Q1 + c2*Q2 exactly.
bool solve_in_pair(const GVector& q1, const GVector& q2, const GVector& target, Rational& c1,
                   Rational& c2) {
    const int maxdeg = max_omega_degree({q1, q2, target});
    const RatVec v1 = embed(q1, maxdeg, false);
    const RatVec v2 = embed(q2, maxdeg, false);
    const RatVec tv = embed(target, maxdeg, false);
    RatRows rows;
    for (size_t i = 0; i < v1.size(); ++i) rows.push_back({v1[i], v2[i], tv[i]});
    rows = rref(std::move(rows));
    c1 = Rational();
    c2 = Rational();
    for (const auto& row : rows) {
        if (!row[0].is_zero()) c1 = row[2];
        else if (!row[1].is_zero()) c2 = row[2];
        else if (!row[2].is_zero()) return false;  // inconsistent
    }
    return true;
}

}  // namespace

std::vector<TwoDimCheck> verify_2d_list(uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto rat = [&](bool nonzero) {
        for (;;) {
            const long long num = static_cast<long long>(rng() % 13) - 6;
            const long long den = 1 + static_cast<long long>(rng() % 3);
            if (nonzero && num == 0) continue;
            return Rational(num, den);
        }
    };
    auto delta01 = [&]() { return static_cast<int>(rng() % 2); };

    const Poly one(Rational(1));
    const Poly w = Poly::variable();

    struct Fam {
        std::string desc;
        GVector q1, q2;
    };
    std::vector<Fam> fams;
    auto W = [](const Poly& p) { return gvec_W(p); };
    auto sc = [](const Rational& r, const GVector& v) { return r * v; };

    {
        const Rational a = rat(false), b = rat(false), d1 = rat(false), d2 = rat(false);
        fams.push_back({"<D+aPv+W(d1), G+bPv+W(d2)>",
                        gvec_D() + sc(a, gvec_Pv()) + W(Poly(d1)),
                        gvec_G() + sc(b, gvec_Pv()) + W(Poly(d2))});
    }
    {
        const Rational a = rat(false);
        const Rational d5(delta01());
        fams.push_back({"<D+aPv+W(d5), Pt>", gvec_D() + sc(a, gvec_Pv()) + W(Poly(d5)), gvec_Pt()});
    }
    {
        const Rational a = rat(false);
        fams.push_back({"<D+aPv+W(w), Pt+W(1)>", gvec_D() + sc(a, gvec_Pv()) + W(w),
                        gvec_Pt() + W(one)});
    }
    {
        const Rational a = rat(false), b = rat(false);
        const Rational d5(delta01());
        fams.push_back({"<D+aG+bPv+W(d5), Px>",
                        gvec_D() + sc(a, gvec_G()) + sc(b, gvec_Pv()) + W(Poly(d5)), gvec_Px()});
    }
    {
        const Rational a = rat(false), b = rat(false);
        fams.push_back({"<D+aG+bPv+W(w), Px+W(1)>",
                        gvec_D() + sc(a, gvec_G()) + sc(b, gvec_Pv()) + W(w), gvec_Px() + W(one)});
    }
    {
        const Rational a = rat(false), d1 = rat(false), d2 = rat(false);
        fams.push_back({"<D+aG+W(d1), Pv+W(d2)>", gvec_D() + sc(a, gvec_G()) + W(Poly(d1)),
                        gvec_Pv() + W(Poly(d2))});
    }
    {
        // gauge: a = 0 when d4 != 0
        const Rational d3 = rat(false), d4 = rat(true), d1 = rat(false), d2 = rat(false);
        fams.push_back({"<G+d3Pt+aPv+W(d1), Px+d4Pv+W(d2)>",
                        gvec_G() + sc(d3, gvec_Pt()) + W(Poly(d1)),
                        gvec_Px() + sc(d4, gvec_Pv()) + W(Poly(d2))});
    }
    {
        const Rational d5(delta01());
        const Rational d1 = rat(false), d2 = rat(false);
        fams.push_back({"<G+d5Pt+W(d1), Pv+W(d2)>", gvec_G() + sc(d5, gvec_Pt()) + W(Poly(d1)),
                        gvec_Pv() + W(Poly(d2))});
    }
    {
        const Rational d3 = rat(false), d4 = rat(false), d1 = rat(false), d2 = rat(false);
        fams.push_back({"<Pt+d3Pv+W(d1), Px+d4Pv+W(d2)>",
                        gvec_Pt() + sc(d3, gvec_Pv()) + W(Poly(d1)),
                        gvec_Px() + sc(d4, gvec_Pv()) + W(Poly(d2))});
    }
    {
        const Rational d1 = rat(false), d2 = rat(false);
        fams.push_back({"<Pt+W(d1), Pv+W(d2)>", gvec_Pt() + W(Poly(d1)), gvec_Pv() + W(Poly(d2))});
    }
    {
        const Rational d1 = rat(false), d2 = rat(false);
        fams.push_back({"<Px+W(d1), Pv+W(d2)>", gvec_Px() + W(Poly(d1)), gvec_Pv() + W(Poly(d2))});
    }
    {
        const Rational a = rat(false), b = rat(false), cc = rat(true);
        fams.push_back({"<D+aG+bPv+cW(w), W(1)>",
                        gvec_D() + sc(a, gvec_G()) + sc(b, gvec_Pv()) + W(cc * w), W(one)});
    }
    {
        const Rational d5(delta01());
        const Rational b = rat(false), cc = rat(true);
        fams.push_back({"<G+d5Pt+bPv+cW(w), W(1)>",
                        gvec_G() + sc(d5, gvec_Pt()) + sc(b, gvec_Pv()) + W(cc * w), W(one)});
    }
    {
        const Rational d1 = rat(false), d2 = rat(true);
        fams.push_back({"<Pt+d1Pv+d2W(w), W(1)>",
                        gvec_Pt() + sc(d1, gvec_Pv()) + W(d2 * w), W(one)});
    }
    {
        const Rational d1 = rat(false), d2 = rat(true);
        fams.push_back({"<Px+d1Pv+d2W(w), W(1)>",
                        gvec_Px() + sc(d1, gvec_Pv()) + W(d2 * w), W(one)});
    }
    {
        const Rational cc = rat(true);
        fams.push_back({"<Pv+cW(w), W(1)>", gvec_Pv() + W(cc * w), W(one)});
    }
    fams.push_back({"<W(w), W(1)>", W(w), W(one)});

    std::vector<TwoDimCheck> out;
    int id = 0;
    for (const auto& f : fams) {
        TwoDimCheck chk;
        chk.family = ++id;
        chk.description = f.desc;
        const GVector br = commutator(f.q1, f.q2);
        chk.closed = solve_in_pair(f.q1, f.q2, br, chk.c1, chk.c2);
        out.push_back(std::move(chk));
    }
    return out;
}

// ---- parsing ----------------------------------------------------------------

namespace {

struct Cursor {
    const std::string& s;
    size_t i = 0;
    void skip_ws() {
        while (i < s.size() && s[i] == ' ') ++i;
    }
    bool done() const { return i >= s.size(); }
    char peek() const { return s[i]; }
};

Rational parse_rational(Cursor& c) {
    c.skip_ws();
    size_t start = c.i;
    while (c.i < c.s.size() && (std::isdigit(static_cast<unsigned char>(c.s[c.i])))) ++c.i;
    if (c.i == start) return Rational(1);
    long long num = std::stoll(c.s.substr(start, c.i - start));
    long long den = 1;
    if (c.i < c.s.size() && c.s[c.i] == '/') {
        ++c.i;
        size_t ds = c.i;
        while (c.i < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i]))) ++c.i;
        if (c.i == ds) throw std::invalid_argument("parse_gvector: malformed denominator");
        den = std::stoll(c.s.substr(ds, c.i - ds));
    }
    return Rational(num, den);
}

Poly parse_w_poly(const std::string& body) {
    Poly out;
    Cursor c{body};
    Rational sign(1);
    bool first = true;
    while (true) {
        c.skip_ws();
        if (c.done()) {
            if (first) throw std::invalid_argument("parse_gvector: empty W-polynomial");
            break;
        }
        if (!first || c.peek() == '+' || c.peek() == '-') {
            if (c.peek() == '+') { sign = Rational(1); ++c.i; }
            else if (c.peek() == '-') { sign = Rational(-1); ++c.i; }
            else if (!first)
                throw std::invalid_argument("parse_gvector: expected + or - in W-polynomial");
        }
        first = false;
        c.skip_ws();
        Rational coef = parse_rational(c);
        c.skip_ws();
        if (c.i < c.s.size() && c.s[c.i] == '*') { ++c.i; c.skip_ws(); }
        int deg = 0;
        if (c.i < c.s.size() && c.s[c.i] == 'w') {
            ++c.i;
            deg = 1;
            if (c.i < c.s.size() && c.s[c.i] == '^') {
                ++c.i;
                size_t ds = c.i;
                while (c.i < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i]))) ++c.i;
                if (c.i == ds) throw std::invalid_argument("parse_gvector: malformed exponent");
                deg = std::stoi(c.s.substr(ds, c.i - ds));
            }
        }
        out = out + Poly::monomial(sign * coef, deg);
        sign = Rational(1);
    }
    return out;
}

}  // namespace

GVector parse_gvector(const std::string& text) {
    GVector out;
    Cursor c{text};
    Rational sign(1);
    bool saw_term = false;
    while (true) {
        c.skip_ws();
        if (c.done()) break;
        if (c.peek() == '+') { sign = Rational(1); ++c.i; continue; }
        if (c.peek() == '-') { sign = sign * Rational(-1); ++c.i; continue; }
        Rational coef = sign * parse_rational(c);
        sign = Rational(1);
        c.skip_ws();
        if (c.i < c.s.size() && c.s[c.i] == '*') { ++c.i; c.skip_ws(); }
        if (c.done()) throw std::invalid_argument("parse_gvector: dangling coefficient");
        if (c.s.compare(c.i, 2, "Pt") == 0) { out.c[B_PT] += coef; c.i += 2; }
        else if (c.s.compare(c.i, 2, "Px") == 0) { out.c[B_PX] += coef; c.i += 2; }
        else if (c.s.compare(c.i, 2, "Pv") == 0) { out.c[B_PV] += coef; c.i += 2; }
        else if (c.s[c.i] == 'D') { out.c[B_D] += coef; c.i += 1; }
        else if (c.s[c.i] == 'G') { out.c[B_G] += coef; c.i += 1; }
        else if (c.s[c.i] == 'W') {
            ++c.i;
            c.skip_ws();
            if (c.done() || c.s[c.i] != '(')
                throw std::invalid_argument("parse_gvector: W requires parenthesized polynomial");
            size_t close = c.s.find(')', c.i);
            if (close == std::string::npos)
                throw std::invalid_argument("parse_gvector: unbalanced parenthesis in W(...)");
            out.omega = out.omega + coef * parse_w_poly(c.s.substr(c.i + 1, close - c.i - 1));
            c.i = close + 1;
        } else {
            throw std::invalid_argument(std::string("parse_gvector: unknown token at '") +
                                        c.s.substr(c.i) + "'");
        }
        saw_term = true;
    }
    if (!saw_term) throw std::invalid_argument("parse_gvector: empty input");
    return out;
}

}  // namespace dfx
