#pragma once

#include <memory>
#include <string>
#include <vector>

#include "filmod/errors.hpp"
#include "filmod/rational.hpp"

namespace filmod {

class PAdicEmbedding;

// Element of Q(zeta_m): coefficients w.r.t. 1, zeta, ..., zeta^{phi(m)-1},
// reduced mod the m-th cyclotomic polynomial.
using CVec = std::vector<Rat>;

// The coefficient field model
//   E = ( Q(zeta_m)[pi]/(pi^e - p) )[y]/Phi_{p^r}(y),   p odd, p not dividing m,
// i.e. the spec's E = Q(zeta_m, pi) extended by a tame-free prime-power layer
// y = zeta_{p^r} that hosts character values of p-power order (r = 0 gives the
// plain model). The p-power layer can split E into a product of fields; all
// admissibility-relevant scalars live in the y-free part.
class CoeffContext : public std::enable_shared_from_this<CoeffContext> {
public:
    static std::shared_ptr<const CoeffContext> make(long p, long m, long r, long e,
                                                    long hensel_factor_index = 0);

    long p() const { return p_; }
    long m() const { return m_; }
    long r() const { return r_; }
    long e() const { return e_; }
    long phi_m() const { return phi_m_; }
    long pr() const { return pr_; }          // p^r
    long phi_pr() const { return phi_pr_; }  // phi(p^r)
    long dim() const { return e_ * phi_pr_ * phi_m_; }

    // Largest n with zeta_n representable: lcm-structure (n' | m, p-part | p^r).
    bool supports_root_order(long n) const;

    const std::vector<Rat>& cyclo_m() const { return cyclo_m_; }

    // zeta_m^k (any k, reduced), as a basis vector of length phi_m.
    const CVec& zeta_m_pow(long k) const;
    // reduction row for zeta^k, k in [phi_m, 2 phi_m - 2] (internal to arithmetic)
    const CVec& zeta_m_pow_raw(long k) const;

    PAdicEmbedding& embedding() const;
    long hensel_factor_index() const { return hensel_index_; }

    std::string header() const;  // "p=3 m=8 r=1 e=2"

private:
    CoeffContext() = default;
    friend class ECoeff;

    long p_ = 3, m_ = 1, r_ = 0, e_ = 1;
    long phi_m_ = 1, pr_ = 1, phi_pr_ = 1;
    long hensel_index_ = 0;
    std::vector<Rat> cyclo_m_;               // Phi_m, monic, degree phi_m
    std::vector<CVec> zred_;                 // zeta^k for k in [phi_m, 2 phi_m - 2]
    std::vector<CVec> zpow_;                 // zeta^k for k in [0, m)
    std::vector<std::vector<Rat>> yred_;     // y^k for k in [phi_pr, 2 phi_pr - 2]
    mutable std::shared_ptr<PAdicEmbedding> emb_;
};

using Ctx = std::shared_ptr<const CoeffContext>;

// Exact element of E. Value semantics; immutable in spirit (all ops return new values).
class ECoeff {
public:
    ECoeff() = default;
    explicit ECoeff(Ctx ctx);  // zero

    static ECoeff from_rational(Ctx ctx, const Rat& x);
    static ECoeff integer(Ctx ctx, long n) { return from_rational(ctx, rat_of(n)); }
    static ECoeff one(Ctx ctx) { return from_rational(ctx, rat_of(1)); }
    static ECoeff zero(Ctx ctx) { return ECoeff(std::move(ctx)); }
    // zeta_n^k; requires supports_root_order(n)
    static ECoeff root_of_unity(Ctx ctx, long n, long k);
    // value exp(2*pi*i*lambda) for rational lambda
    static ECoeff root_from_exponent(Ctx ctx, const Rat& lambda);
    static ECoeff pi_pow(Ctx ctx, long k);  // pi^k, any k (negative allowed)

    const Ctx& ctx() const { return ctx_; }
    bool valid() const { return static_cast<bool>(ctx_); }

    bool is_zero() const;
    bool is_one() const;
    bool operator==(const ECoeff& o) const;
    bool operator!=(const ECoeff& o) const { return !(*this == o); }

    ECoeff operator+(const ECoeff& o) const;
    ECoeff operator-(const ECoeff& o) const;
    ECoeff operator-() const;
    ECoeff operator*(const ECoeff& o) const;
    ECoeff operator/(const ECoeff& o) const;  // input_error on zero / zero-divisor
    ECoeff inverse() const;
    ECoeff pow(long k) const;

    bool is_unit() const;
    // True if exactly one basis coefficient is nonzero.
    bool is_monomial() const;
    // True if no y-layer content (element of Q(zeta_m)(pi)).
    bool is_tame() const;

    // pi-part i as an element of Q(zeta_m) (requires is_tame()).
    CVec tame_part(long i) const;

    const Rat& coeff(long iy, long ipi, long iz) const;

    std::string str() const;                         // "3/2*zeta^5*pi^2 + -1*zetap^1"
    static ECoeff parse(Ctx ctx, const std::string& s);

    std::size_t hash() const;

private:
    friend class PAdicEmbedding;
    Ctx ctx_;
    std::vector<Rat> c_;  // index ((iy * e) + ipi) * phi_m + iz

    void check_same(const ECoeff& o) const;
    long idx(long iy, long ipi, long iz) const;
};

// Coefficients of the n-th cyclotomic polynomial (monic, degree phi(n)), cached.
const std::vector<Rat>& cyclotomic_poly(long n);

// Exact p-adic valuation of x, normalized by v(p) = 1; nullopt encodes v(0) = +inf.
// Defined on the y-free part of E (throws input_error on wild-layer content).
Val valuation(const ECoeff& x);

struct SqrtResult {
    std::optional<ECoeff> root;  // root*root == d, exactly (verified)
    bool exact_no = false;       // proven: no root exists in Q(zeta_m)(pi)
    bool bound_certified = false;  // no root with coefficient height below the bound
};

// Square root in the y-free part of E. Never returns a silent false negative:
// either a verified root, an exact impossibility proof (valuation parity /
// residue nonsquare / rational sign), or a bound-certified negative.
SqrtResult sqrt_in_E(const ECoeff& d, const Int& height_bound = Int(1000000000));

}  // namespace filmod
