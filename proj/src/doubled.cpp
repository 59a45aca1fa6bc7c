#include "opspread/doubled.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace opspread {

void check_doubled_budget(const LatticeSpec& spec, std::uint64_t budget) {
    if (spec.q < 2 || spec.N < 1) throw Error(ErrorKind::InvalidDimension, "q >= 2, N >= 1 required");
    std::uint64_t D = ipow(spec.q, 2 * spec.N);
    if (D > (std::uint64_t(1) << 20) || D * D > budget)
        throw Error(ErrorKind::BudgetExceeded,
                    "doubled space needs q^(4N) = " + std::to_string(D) + "^2 entries");
}

cplx inner(const DoubledVector& a, const DoubledVector& b) {
    if (a.mat.rows() != b.mat.rows() || a.mat.cols() != b.mat.cols())
        throw Error(ErrorKind::DimensionMismatch, "doubled vectors differ in size");
    return (a.mat.conjugate().cwiseProduct(b.mat)).sum();
}

DoubledVector boxtimes(const LatticeSpec& spec, const CMat& A, const CMat& B) {
    const Eigen::Index dH = Eigen::Index(spec.dim());
    if (A.rows() != dH || B.rows() != dH || A.cols() != dH || B.cols() != dH)
        throw Error(ErrorKind::DimensionMismatch, "boxtimes factors must be d_H x d_H");
    CMat M(dH * dH, dH * dH);
    for (Eigen::Index c1 = 0; c1 < dH; ++c1)
        for (Eigen::Index r1 = 0; r1 < dH; ++r1) M.block(r1 * dH, c1 * dH, dH, dH) = A(r1, c1) * B;
    return {std::move(M), spec};
}

DoubledVector scaled_sum(const DoubledVector& a, cplx alpha, const DoubledVector& b, cplx beta) {
    return {alpha * a.mat + beta * b.mat, a.spec};
}

CMat site_wiring(int q, SiteWiring w) {
    const int n = q * q;
    CMat swap = CMat::Zero(n, n);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) swap(i * q + j, j * q + i) = 1.0;
    CMat plus = swap / double(q);
    CMat minus = CMat::Identity(n, n) / double(q);
    switch (w) {
        case SiteWiring::Plus: return plus;
        case SiteWiring::Minus: return minus;
        case SiteWiring::Zero: return plus - minus / double(q);
        case SiteWiring::Perp: return minus - plus / double(q);
    }
    return plus;
}

DoubledVector product_wiring(const LatticeSpec& spec, const std::vector<SiteWiring>& sites) {
    check_doubled_budget(spec);
    const int q = spec.q, N = spec.N;
    if (int(sites.size()) != N) throw Error(ErrorKind::DimensionMismatch, "one wiring per site");
    std::vector<CMat> f;
    for (auto w : sites) f.push_back(site_wiring(q, w));
    const Eigen::Index dH = Eigen::Index(spec.dim());
    const Eigen::Index D = dH * dH;
    std::vector<std::vector<int>> digits(dH, std::vector<int>(N));
    for (Eigen::Index a = 0; a < dH; ++a) {
        Eigen::Index r = a;
        for (int j = N - 1; j >= 0; --j) {
            digits[a][j] = int(r % q);
            r /= q;
        }
    }
    CMat M(D, D);
    for (Eigen::Index col = 0; col < D; ++col) {
        const auto& c1 = digits[col / dH];
        const auto& c2 = digits[col % dH];
        for (Eigen::Index row = 0; row < D; ++row) {
            const auto& r1 = digits[row / dH];
            const auto& r2 = digits[row % dH];
            cplx v = 1.0;
            for (int j = 0; j < N && v != cplx(0); ++j) v *= f[j](r1[j] * q + r2[j], c1[j] * q + c2[j]);
            M(row, col) = v;
        }
    }
    return {std::move(M), spec};
}

double WBasis::d_gt(int x) const { return double(ipow(spec.q, spec.N - 1 - x)); }

DoubledVector w_product_form(const LatticeSpec& spec, int x) {
    std::vector<SiteWiring> s(spec.N);
    for (int j = 0; j < spec.N; ++j)
        s[j] = j < x ? SiteWiring::Plus : (j == x ? SiteWiring::Zero : SiteWiring::Minus);
    auto v = product_wiring(spec, s);
    v.mat /= double(spec.d_gt(x));
    return v;
}

DoubledVector w_left_product_form(const LatticeSpec& spec, int x) {
    std::vector<SiteWiring> s(spec.N);
    for (int j = 0; j < spec.N; ++j)
        s[j] = j < x ? SiteWiring::Minus : (j == x ? SiteWiring::Perp : SiteWiring::Plus);
    auto v = product_wiring(spec, s);
    v.mat /= double(spec.d_gt(x));
    return v;
}

WBasis build_basis(const LatticeSpec& spec) {
    check_doubled_budget(spec);
    WBasis b;
    b.spec = spec;
    for (int x = -1; x < spec.N; ++x) {
        std::vector<SiteWiring> s(spec.N);
        for (int j = 0; j < spec.N; ++j) s[j] = j <= x ? SiteWiring::Plus : SiteWiring::Minus;
        b.F.push_back(product_wiring(spec, s));
    }
    for (int x = 0; x < spec.N; ++x) {
        DoubledVector w{b.cut(x).mat / b.d_gt(x) - b.cut(x - 1).mat / b.d_gt(x - 1), spec};
        b.chi.push_back(inner(w, w).real());
        b.W.push_back(std::move(w));
    }
    return b;
}

namespace {

// v <- (M (x) M) v acting on the replica index of every column.
void replica_left(CMat& A, const CMat& M) {
    const Eigen::Index dH = M.rows();
    CMat tmp(dH, dH);
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
        Eigen::Map<CMat> X(A.col(c).data(), dH, dH);
        tmp.noalias() = M * X;
        X.noalias() = tmp * M.transpose();
    }
}

void check_unitary_dim(const DoubledVector& v, const CMat& U) {
    if (std::uint64_t(U.rows()) != v.spec.dim() || U.rows() != U.cols() ||
        U.rows() * U.rows() != v.mat.rows())
        throw Error(ErrorKind::DimensionMismatch, "unitary does not match the doubled space");
}

// (M (x) M) A (M (x) M)^dag
CMat conjugate_by(const CMat& A, const CMat& M) {
    CMat T = A;
    replica_left(T, M);
    T.adjointInPlace();
    replica_left(T, M);
    T.adjointInPlace();
    return T;
}

}  // namespace

DoubledVector doubled_evolve(const DoubledVector& v, const CMat& U) {
    check_unitary_dim(v, U);
    return {conjugate_by(v.mat, U.adjoint()), v.spec};
}

DoubledVector superop_forward(const DoubledVector& v, const CMat& U) {
    check_unitary_dim(v, U);
    return {conjugate_by(v.mat, U), v.spec};
}

DoubledVector floquet_liouvillian(const DoubledVector& v, const CMat& U) {
    auto out = superop_forward(v, U);
    out.mat -= v.mat;
    return out;
}

DoubledVector hamiltonian_liouvillian(const DoubledVector& v, const CMat& H) {
    check_unitary_dim(v, H);
    const Eigen::Index dH = H.rows();
    CMat I = CMat::Identity(dH, dH);
    CMat Hd = CMat::Zero(dH * dH, dH * dH);
    for (Eigen::Index i = 0; i < dH; ++i)
        for (Eigen::Index j = 0; j < dH; ++j) {
            Hd.block(i * dH, j * dH, dH, dH) += H(i, j) * I;
            if (i == j) Hd.block(i * dH, j * dH, dH, dH) += H;
        }
    return {Hd * v.mat - v.mat * Hd, v.spec};
}

DoubledVector PhiMetric::phi(const DoubledVector& a) const {
    DoubledVector out = a;
    for (size_t x = 0; x < basis_.W.size(); ++x) {
        double c = basis_.chi[x];
        out.mat += (1.0 / (c * c) - 1.0 / c) * opspread::inner(basis_.W[x], a) * basis_.W[x].mat;
    }
    return out;
}

DoubledVector PhiMetric::project_slow(const DoubledVector& a) const {
    DoubledVector out{CMat::Zero(a.mat.rows(), a.mat.cols()), a.spec};
    for (size_t x = 0; x < basis_.W.size(); ++x)
        out.mat += opspread::inner(basis_.W[x], a) / basis_.chi[x] * basis_.W[x].mat;
    return out;
}

DoubledVector PhiMetric::project_fast(const DoubledVector& a) const {
    auto p = project_slow(a);
    return {a.mat - p.mat, a.spec};
}

cplx PhiMetric::inner(const DoubledVector& a, const DoubledVector& b) const {
    return opspread::inner(phi(a), b);
}

CMat floquet_unitary(const LatticeSpec& spec, double epsilon, const CMat& V) {
    FloquetCircuit c(spec, epsilon, ScramblerSource::fixed(spec, V));
    return c.unitary(0);
}

cplx omega_closed_form(int q, double epsilon, double k) {
    const double q2 = double(q) * q;
    const cplx I(0, 1);
    cplx eta = (1.0 - std::exp(I * k) / q2) / (1.0 - 1.0 / q2);
    double g = (std::cos(4 * epsilon) - 1.0) / 4.0;
    return eta * (1.0 - std::exp(-I * k)) * g;
}

cplx cut_matrix_element(const WBasis& basis, const CMat& U, int a, int b) {
    auto L = floquet_liouvillian(basis.cut(b), U);
    return inner(basis.cut(a), L);
}

cplx omega_floquet(const LatticeSpec& spec, double epsilon, const CMat& V, double k) {
    if (spec.N < 3) throw Error(ErrorKind::InvalidDimension, "bulk row needs N >= 3");
    auto basis = build_basis(spec);
    CMat U = floquet_unitary(spec, epsilon, V);
    const int x = 1;
    cplx total = 0;
    const cplx I(0, 1);
    for (int y = 0; y < spec.N; ++y) {
        auto L = floquet_liouvillian(basis.W[y], U);
        cplx elem = inner(basis.W[x], L) / basis.chi[x];
        total += std::exp(-I * double(y - x) * k) * elem;
    }
    return total;
}

double omega_hamiltonian_check(const LatticeSpec& spec, const CMat& H) {
    auto basis = build_basis(spec);
    double worst = 0;
    for (int b = -1; b < spec.N; ++b) {
        auto L = hamiltonian_liouvillian(basis.cut(b), H);
        for (int a = -1; a < spec.N; ++a) worst = std::max(worst, std::abs(inner(basis.cut(a), L)));
    }
    return worst;
}

DoubledVector w_fourier(const WBasis& basis, double k) {
    const int N = basis.spec.N;
    const cplx I(0, 1);
    DoubledVector out{CMat::Zero(basis.W[0].mat.rows(), basis.W[0].mat.cols()), basis.spec};
    for (int x = 0; x < N; ++x) out.mat += std::exp(-I * double(x) * k) * basis.W[x].mat;
    out.mat /= std::sqrt(double(N));
    return out;
}

SigmaResult sigma_exact(const LatticeSpec& spec, double epsilon, const CMat& V, double k, cplx z) {
    auto basis = build_basis(spec);
    PhiMetric metric(basis);
    CMat U = floquet_unitary(spec, epsilon, V);
    const Eigen::Index dH = U.rows();
    CMat Wbig(dH * dH, dH * dH);
    for (Eigen::Index i = 0; i < dH; ++i)
        for (Eigen::Index j = 0; j < dH; ++j) Wbig.block(i * dH, j * dH, dH, dH) = U(i, j) * U;
    Eigen::ComplexSchur<CMat> schur(Wbig);
    const CMat& Q = schur.matrixU();
    CVec lambda = schur.matrixT().diagonal();

    const cplx I(0, 1);
    const cplx a = std::exp(-I * z) - 1.0;
    const Eigen::Index D = Wbig.rows();
    CMat denom(D, D);
    double smallest = 1e300;
    for (Eigen::Index j = 0; j < D; ++j)
        for (Eigen::Index i = 0; i < D; ++i) {
            denom(i, j) = a + 1.0 - lambda(i) * std::conj(lambda(j));
            smallest = std::min(smallest, std::abs(denom(i, j)));
        }
    if (smallest < 1e-12)
        throw Error(ErrorKind::SingularResolvent, "e^{-iz} - 1 - L is singular; use z with Im z > 0");

    auto resolve = [&](const CMat& X) {
        CMat Xp = Q.adjoint() * X * Q;
        Xp = Xp.cwiseQuotient(denom);
        return CMat(Q * Xp * Q.adjoint());
    };
    auto L = [&](const CMat& X) { return CMat(Wbig * X * Wbig.adjoint() - X); };

    DoubledVector Wk = w_fourier(basis, k);
    DoubledVector PhiWk = metric.phi(Wk);
    auto bra = [&](const CMat& X) { return (PhiWk.mat.conjugate().cwiseProduct(X)).sum(); };

    CMat LW = L(Wk.mat);
    SigmaResult out;
    out.Omega = bra(LW);

    // (a - L Q)^{-1} L W by Sherman-Morrison: a - LQ = (a - L) + |LW)(W|.
    CMat r = resolve(LW);
    cplx beta = bra(r);
    out.Sigma = (bra(L(r)) - out.Omega * beta) / (1.0 + beta);

    CMat z1 = LW - Wk.mat * out.Omega;
    CMat z2 = resolve(z1);
    out.sigma = bra(L(z2)) - out.Omega * bra(z2);

    out.relation = out.sigma / (1.0 + out.sigma / (a - out.Omega));
    out.residual = std::abs(out.Sigma - out.relation);
    return out;
}

AsymmetryPair growth_asymmetry_check(const LatticeSpec& spec, double epsilon, const CMat& V,
                                     int x, int y, int t) {
    if (x < 0 || y < 0 || x >= spec.N || y >= spec.N || t < 0)
        throw Error(ErrorKind::OutOfRange, "site or time out of range");
    auto basis = build_basis(spec);
    CMat U = floquet_unitary(spec, epsilon, V);
    DoubledVector back = basis.W[y];
    DoubledVector fwd = basis.W[x];
    for (int s = 0; s < t; ++s) {
        back = doubled_evolve(back, U);
        fwd = superop_forward(fwd, U);
    }
    cplx lhs = inner(basis.W[x], back) / basis.chi[x];
    cplx rhs = std::pow(double(spec.q), 2.0 * (y - x)) * inner(basis.W[y], fwd) / basis.chi[y];
    return {lhs.real(), rhs.real(), std::max(std::abs(lhs.imag()), std::abs(rhs.imag()))};
}

double continuity_residual(const WBasis& basis, const CMat& U) {
    const int N = basis.spec.N;
    std::vector<CMat> J;
    for (int x = -1; x < N; ++x) J.push_back(floquet_liouvillian(basis.cut(x), U).mat / basis.d_gt(x));
    double worst = 0;
    for (int x = 0; x < N; ++x) {
        CMat r = floquet_liouvillian(basis.W[x], U).mat - (J[x + 1] - J[x]);
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

DoubledVector replica_swap(const DoubledVector& v) {
    const Eigen::Index dH = Eigen::Index(v.spec.dim());
    CMat out(v.mat.rows(), v.mat.cols());
    for (Eigen::Index r1 = 0; r1 < dH; ++r1)
        for (Eigen::Index r2 = 0; r2 < dH; ++r2) out.row(r1 * dH + r2) = v.mat.row(r2 * dH + r1);
    return {std::move(out), v.spec};
}

SwapResiduals swap_residuals(const WBasis& basis, const CMat& U, const DoubledVector& probe) {
    SwapResiduals r;
    r.involution = (replica_swap(replica_swap(probe)).mat - probe.mat).cwiseAbs().maxCoeff();
    r.commutes = (replica_swap(superop_forward(probe, U)).mat -
                  superop_forward(replica_swap(probe), U).mat)
                     .cwiseAbs()
                     .maxCoeff();
    r.maps_right_to_left = 0;
    for (int x = 0; x < basis.spec.N; ++x) {
        CMat d = replica_swap(basis.W[x]).mat - w_left_product_form(basis.spec, x).mat;
        r.maps_right_to_left = std::max(r.maps_right_to_left, d.cwiseAbs().maxCoeff());
    }
    return r;
}

double purity_from_cut(const WBasis& basis, const CMat& rho, int x) {
    auto v = boxtimes(basis.spec, rho.adjoint(), rho);
    return double(basis.spec.dim()) * inner(v, basis.cut(x)).real();
}

AxiomResiduals inner_product_axioms(const WBasis& basis, int n_probes, std::uint64_t seed) {
    if (n_probes < 2) throw Error(ErrorKind::OutOfRange, "need at least two probes");
    PhiMetric metric(basis);
    const Eigen::Index D = basis.W[0].mat.rows();
    std::vector<DoubledVector> probes;
    for (int i = 0; i < n_probes; ++i) {
        Rng rng = substream(seed, std::uint64_t(i));
        CMat m(D, D);
        for (Eigen::Index c = 0; c < D; ++c)
            for (Eigen::Index r = 0; r < D; ++r) m(r, c) = complex_gaussian(rng);
        m /= m.norm();
        probes.push_back({std::move(m), basis.spec});
    }
    Rng coeff = substream(seed, std::uint64_t(n_probes));
    AxiomResiduals out;
    out.min_self = 1e300;
    CMat gram(n_probes, n_probes);
    std::vector<DoubledVector> phis;
    for (const auto& p : probes) phis.push_back(metric.phi(p));
    for (int i = 0; i < n_probes; ++i)
        for (int j = 0; j < n_probes; ++j) gram(i, j) = opspread::inner(phis[i], probes[j]);
    for (int i = 0; i < n_probes; ++i) {
        int j = (i + 1) % n_probes, k = (i + 2) % n_probes;
        out.conjugate_symmetry = std::max(out.conjugate_symmetry, std::abs(std::conj(gram(i, j)) - gram(j, i)));
        cplx a = complex_gaussian(coeff), b = complex_gaussian(coeff);
        DoubledVector mix = scaled_sum(probes[j], a, probes[k], b);
        cplx lhs = metric.inner(probes[i], mix);
        out.linearity = std::max(out.linearity, std::abs(lhs - a * gram(i, j) - b * gram(i, k)));
        out.min_self = std::min(out.min_self, gram(i, i).real());
    }
    CMat herm = (gram + gram.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMat> es(herm, Eigen::EigenvaluesOnly);
    out.min_gram_eigenvalue = es.eigenvalues().minCoeff();
    return out;
}

}  // namespace opspread
