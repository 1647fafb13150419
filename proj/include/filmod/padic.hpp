#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "filmod/cyclo.hpp"
#include "filmod/rational.hpp"

namespace filmod {

// A fixed prime of Q(zeta_m) above p (p prime to m), realized as a Hensel-lifted
// irreducible factor g of the m-th cyclotomic polynomial mod p^N. The factor
// choice (an orbit of primitive m-th roots under Frobenius) is fixed per context;
// different choices permute embeddings, not verdicts.
class PAdicEmbedding {
public:
    PAdicEmbedding(long p, long m, long factor_index = 0);

    long p() const { return p_; }
    long m() const { return m_; }
    long f() const { return f_; }                    // residue degree = ord of p mod m
    long factor_index() const { return index_; }
    long num_factors() const { return num_factors_; }

    long precision() const;                          // current N
    void raise_precision(long target) const;         // monotone
    std::vector<Int> factor_mod(long target) const;  // g mod p^target (monic, degree f)

    // Exact valuation (in Z) of a nonzero element of Q(zeta_m); nullopt for 0.
    Val vm(const CVec& z) const;

    // All irreducible factors of Phi_m mod p (each monic, degree f), canonical order.
    const std::vector<std::vector<long>>& residue_factors() const { return factors_p_; }

    std::string describe() const;

private:
    long p_, m_, f_, index_, num_factors_;
    std::vector<std::vector<long>> factors_p_;  // all factors mod p
    std::vector<long> g_p_, h_p_, bez_a_, bez_b_;  // chosen factor, cofactor, Bezout mod p
    std::vector<Int> phi_int_;                     // Phi_m with integer coefficients

    mutable std::mutex mu_;
    mutable long N_;
    mutable std::vector<Int> gN_, hN_;  // lifted factor & cofactor mod p^N

    void lift_to(long target) const;  // caller holds mu_
};

}  // namespace filmod
