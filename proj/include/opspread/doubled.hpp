#pragma once

#include <vector>

#include "opspread/lattice.hpp"

namespace opspread {

// Element of the doubled operator space, stored as an operator on H (x) H.
// Replica 1 is the more significant tensor factor; A boxtimes B is A (x) B.
struct DoubledVector {
    CMat mat;
    LatticeSpec spec;
};

// Default guard on q^(4N) complex entries for doubled-space matrices.
inline constexpr std::uint64_t kDoubledBudget = std::uint64_t(1) << 26;

void check_doubled_budget(const LatticeSpec& spec, std::uint64_t budget = kDoubledBudget);

cplx inner(const DoubledVector& a, const DoubledVector& b);  // Tr(a^dag b)
DoubledVector boxtimes(const LatticeSpec& spec, const CMat& A, const CMat& B);
DoubledVector scaled_sum(const DoubledVector& a, cplx alpha, const DoubledVector& b, cplx beta);

enum class SiteWiring { Plus, Minus, Zero, Perp };

// Per-site wiring as a q^2 x q^2 matrix on (replica-1 site, replica-2 site):
// |+> = SWAP/q, |-> = 1/q, |0> = |+> - |->/q, |perp> = |-> - |+>/q.
CMat site_wiring(int q, SiteWiring w);
DoubledVector product_wiring(const LatticeSpec& spec, const std::vector<SiteWiring>& sites);

struct WBasis {
    LatticeSpec spec;
    std::vector<DoubledVector> W;  // x = 0..N-1
    std::vector<DoubledVector> F;  // F[x + 1] for x = -1..N-1
    std::vector<double> chi;       // <W^x|W^x>

    const DoubledVector& cut(int x) const { return F.at(x + 1); }
    // d_{>x} for x = -1..N-1.
    double d_gt(int x) const;
};

WBasis build_basis(const LatticeSpec& spec);
// W^x from its product form (+ on sites < x, 0 on x, - on sites > x) / d_{>x}.
DoubledVector w_product_form(const LatticeSpec& spec, int x);

// Heisenberg step (U (x) U)^dag v (U (x) U), i.e. the inverse of the Floquet super-operator.
DoubledVector doubled_evolve(const DoubledVector& v, const CMat& U);
// Forward super-operator (U (x) U) v (U (x) U)^dag.
DoubledVector superop_forward(const DoubledVector& v, const CMat& U);
// Floquet Liouvillian U_super - 1.
DoubledVector floquet_liouvillian(const DoubledVector& v, const CMat& U);
// Hamiltonian Liouvillian [H (x) 1 + 1 (x) H, v].
DoubledVector hamiltonian_liouvillian(const DoubledVector& v, const CMat& H);

class PhiMetric {
public:
    explicit PhiMetric(const WBasis& basis) : basis_(basis) {}
    DoubledVector phi(const DoubledVector& a) const;
    DoubledVector project_slow(const DoubledVector& a) const;
    DoubledVector project_fast(const DoubledVector& a) const;
    cplx inner(const DoubledVector& a, const DoubledVector& b) const;  // (a|b)

private:
    const WBasis& basis_;
};

// Floquet unitary with the same scrambler V on every site: V^{(x)N} exp(-i eps H_ZZ).
CMat floquet_unitary(const LatticeSpec& spec, double epsilon, const CMat& V);

cplx omega_closed_form(int q, double epsilon, double k);
// <F^a|(U_super - 1)|F^b>.
cplx cut_matrix_element(const WBasis& basis, const CMat& U, int a, int b);
// Brute-force Omega(k) from the bulk row x = 1 of (W^x|L|W^y) (open chain, N >= 3).
cplx omega_floquet(const LatticeSpec& spec, double epsilon, const CMat& V, double k);
double omega_hamiltonian_check(const LatticeSpec& spec, const CMat& H);

struct SigmaResult {
    cplx Sigma;     // memory matrix
    cplx sigma;     // proxy
    cplx Omega;
    cplx relation;  // sigma / (1 + sigma / (e^{-iz} - 1 - Omega))
    double residual;
};

// Exact resolvent evaluation with the rank-one slow projector onto W^k.
SigmaResult sigma_exact(const LatticeSpec& spec, double epsilon, const CMat& V, double k, cplx z);

// (W^k| as a functional and W^k as a vector, for tests.
DoubledVector w_fourier(const WBasis& basis, double k);

struct AsymmetryPair {
    double lhs;  // (W^x|U^{-t}|W^y)
    double rhs;  // q^{2(y-x)} (W^y|U^{t}|W^x)
    double imag_max;
};

AsymmetryPair growth_asymmetry_check(const LatticeSpec& spec, double epsilon, const CMat& V,
                                     int x, int y, int t);

// max_x || L(W^x) - (J^x - J^{x-1}) ||_max with J^x = L(F^x)/d_{>x}.
double continuity_residual(const WBasis& basis, const CMat& U);

// Replica swap on the ket legs, S(A) = SWAP_all A.
DoubledVector replica_swap(const DoubledVector& v);
// W_L^x = S-image wiring: - on sites < x, perp on x, + on sites > x, / d_{>x}.
DoubledVector w_left_product_form(const LatticeSpec& spec, int x);

struct SwapResiduals {
    double involution;   // ||S S A - A||
    double commutes;     // ||S U(A) - U(S A)||
    double maps_right_to_left;  // max_x ||S W_R^x - W_L^x||
};

SwapResiduals swap_residuals(const WBasis& basis, const CMat& U, const DoubledVector& probe);

struct AxiomResiduals {
    double conjugate_symmetry = 0;  // max |(A|B)* - (B|A)|
    double linearity = 0;           // max |(A|aB + bC) - a(A|B) - b(A|C)|
    double min_self = 0;            // min (A|A) over unit-norm probes
    double min_gram_eigenvalue = 0; // smallest eigenvalue of the probe Gram matrix
};

// Checks the Phi-metric inner product on n_probes random unit-norm probes.
AxiomResiduals inner_product_axioms(const WBasis& basis, int n_probes, std::uint64_t seed);

// d_H <rho^dag boxtimes rho|F^x> for a density matrix rho.
double purity_from_cut(const WBasis& basis, const CMat& rho, int x);

}  // namespace opspread
