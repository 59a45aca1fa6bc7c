#pragma once

#include <vector>

#include "opspread/lattice.hpp"

namespace opspread {

// Exact circuit average of E[O(t) (x) O(t)^dag] when every site and layer has its
// own Haar scrambler. After each scrambling layer the average lies in the span of
// {identity, SWAP} on every site, so the state is 2^N real coefficients.
class ReplicaAverage {
public:
    ReplicaAverage(const LatticeSpec& spec, double epsilon);

    // rho[t][x] for t = 0..t_max, averaged over the non-identity Paulis at site 0.
    std::vector<std::vector<double>> right_density(int t_max) const;

    // K[tau][sigma] = Tr((C (x) C)^dag P_sigma (C (x) C) P_tau); bit j of an index set
    // means SWAP on site j.
    const RMat& coupling_kernel() const { return K_; }

private:
    void apply_gram_inverse(RVec& v) const;
    void apply_gram(RVec& v) const;

    LatticeSpec spec_;
    double epsilon_;
    RMat K_;
};

ProfileSeries fully_random_exact(const LatticeSpec& spec, double epsilon, int t_max);

}  // namespace opspread
