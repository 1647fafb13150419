#include <algorithm>
#include <vector>

#include "filmod/cyclo.hpp"
#include "filmod/padic.hpp"

// Square roots in the tame part of E = Q(zeta_m)(pi). Strategy: exact
// obstructions first (valuation parity, residue nonsquares at every prime
// above p), then a p-adic lift in (Z/p^M)[x]/(Phi_m)[w]/(w^e - p) over all
// sign choices, rational reconstruction of the coordinates, and exact
// verification. Negatives without an obstruction are only ever reported as
// bound-certified.

namespace filmod {

namespace {

long mod_pos(long a, long n) {
    long r = a % n;
    return r < 0 ? r + n : r;
}

using FpPoly = std::vector<long>;

void fp_trim(FpPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

FpPoly fp_mul(const FpPoly& a, const FpPoly& b, long p) {
    if (a.empty() || b.empty()) return {};
    FpPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    }
    fp_trim(r);
    return r;
}

long fp_inv_scalar(long a, long p) {
    long t = 0, nt = 1, r = p, nr = mod_pos(a, p);
    while (nr) {
        long q = r / nr;
        long tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    return mod_pos(t, p);
}

std::pair<FpPoly, FpPoly> fp_divmod(FpPoly a, const FpPoly& b, long p) {
    FpPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
    long binv = fp_inv_scalar(b.back(), p);
    while (a.size() >= b.size() && !a.empty()) {
        long c = (a.back() * binv) % p;
        std::size_t sh = a.size() - b.size();
        q[sh] = c;
        for (std::size_t i = 0; i < b.size(); ++i) a[sh + i] = mod_pos(a[sh + i] - c * b[i], p);
        fp_trim(a);
    }
    fp_trim(q);
    return {q, a};
}

FpPoly fp_mod(FpPoly a, const FpPoly& b, long p) { return fp_divmod(std::move(a), b, p).second; }

void fp_ext_gcd(FpPoly a, FpPoly b, long p, FpPoly& g, FpPoly& u) {
    FpPoly s0{1}, s1{};
    fp_trim(a);
    fp_trim(b);
    while (!b.empty()) {
        auto [q, r] = fp_divmod(a, b, p);
        a = std::move(b);
        b = std::move(r);
        FpPoly qs = fp_mul(q, s1, p);
        FpPoly s2 = s0;
        s2.resize(std::max(s2.size(), qs.size()), 0);
        for (std::size_t i = 0; i < qs.size(); ++i) s2[i] = mod_pos(s2[i] - qs[i], p);
        fp_trim(s2);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    long inv = a.empty() ? 1 : fp_inv_scalar(a.back(), p);
    for (auto& c : a) c = (c * inv) % p;
    for (auto& c : s0) c = (c * inv) % p;
    g = std::move(a);
    u = std::move(s0);
}

// finite field F_p[t]/h
struct Fq {
    long p;
    FpPoly h;
    using E = FpPoly;
    E mul(const E& a, const E& b) const { return fp_mod(fp_mul(a, b, p), h, p); }
    E pw_big(E b, Int k) const {
        E r{1};
        while (k > 0) {
            if (mpz_odd_p(k.get_mpz_t())) r = mul(r, b);
            b = mul(b, b);
            k >>= 1;
        }
        return r;
    }
    bool is_one(const E& a) const { return a.size() == 1 && a[0] == 1; }
    bool is_zero(const E& a) const { return a.empty(); }
    E element(Int idx) const {
        E r;
        long f = static_cast<long>(h.size()) - 1;
        for (long i = 0; i < f; ++i) {
            Int q = idx / p;
            r.push_back(mpz_get_si(Int(idx - q * p).get_mpz_t()));
            idx = q;
        }
        fp_trim(r);
        return r;
    }
};

// Tonelli-Shanks; empty optional if a is a nonsquare
std::optional<FpPoly> fq_sqrt(const Fq& fq, const FpPoly& a) {
    if (fq.is_zero(a)) return FpPoly{};
    long f = static_cast<long>(fq.h.size()) - 1;
    Int q = 1;
    for (long i = 0; i < f; ++i) q *= fq.p;
    Int qm1 = q - 1;
    if (!fq.is_one(fq.pw_big(a, qm1 / 2))) return std::nullopt;
    // q-1 = 2^S * Q
    long S = 0;
    Int Q = qm1;
    while (Q % 2 == 0) {
        Q /= 2;
        ++S;
    }
    // non-residue
    FpPoly z;
    for (Int idx = 1;; ++idx) {
        FpPoly cand = fq.element(idx);
        if (fq.is_zero(cand)) continue;
        if (!fq.is_one(fq.pw_big(cand, qm1 / 2))) {
            z = cand;
            break;
        }
    }
    long M = S;
    FpPoly c = fq.pw_big(z, Q);
    FpPoly t = fq.pw_big(a, Q);
    FpPoly R = fq.pw_big(a, (Q + 1) / 2);
    while (!fq.is_one(t)) {
        long i = 0;
        FpPoly tt = t;
        while (!fq.is_one(tt)) {
            tt = fq.mul(tt, tt);
            ++i;
            if (i == M) return std::nullopt;
        }
        FpPoly b = c;
        for (long j = 0; j < M - i - 1; ++j) b = fq.mul(b, b);
        M = i;
        c = fq.mul(b, b);
        t = fq.mul(t, c);
        R = fq.mul(R, b);
    }
    return R;
}

// ---- work ring S = (Z/p^M)[x]/(Phi_m) [w]/(w^e - p) ----
struct SRing {
    long p, e, phim, M;
    Int P;  // p^M
    std::vector<Int> phi;  // Phi_m integer coefficients (monic)

    using E = std::vector<std::vector<Int>>;  // [e][phim]

    E zero() const { return E(e, std::vector<Int>(phim, Int(0))); }

    Int norm(Int v) const {
        v %= P;
        if (v < 0) v += P;
        return v;
    }

    E mul(const E& a, const E& b) const {
        std::vector<std::vector<Int>> raw(2 * e - 1, std::vector<Int>(2 * phim - 1, Int(0)));
        for (long i = 0; i < e; ++i)
            for (long k = 0; k < phim; ++k) {
                if (a[i][k] == 0) continue;
                for (long j = 0; j < e; ++j)
                    for (long l = 0; l < phim; ++l) {
                        if (b[j][l] == 0) continue;
                        raw[i + j][k + l] += a[i][k] * b[j][l];
                    }
            }
        // reduce x-axis mod Phi (monic)
        for (auto& row : raw) {
            for (long k = 2 * phim - 2; k >= phim; --k) {
                Int cv = row[k] % P;
                if (cv == 0) {
                    row[k] = 0;
                    continue;
                }
                for (long l = 0; l < phim; ++l) row[k - phim + l] -= cv * phi[l];
                row[k] = 0;
            }
        }
        // fold w-axis
        E r = zero();
        for (long i = 0; i < 2 * e - 1; ++i)
            for (long k = 0; k < phim; ++k) {
                Int v = raw[i][k];
                if (i >= e) {
                    r[i - e][k] = norm(r[i - e][k] + v * p);
                } else {
                    r[i][k] = norm(r[i][k] + v);
                }
            }
        return r;
    }

    E add(const E& a, const E& b) const {
        E r = a;
        for (long i = 0; i < e; ++i)
            for (long k = 0; k < phim; ++k) r[i][k] = norm(r[i][k] + b[i][k]);
        return r;
    }

    E sub(const E& a, const E& b) const {
        E r = a;
        for (long i = 0; i < e; ++i)
            for (long k = 0; k < phim; ++k) r[i][k] = norm(r[i][k] - b[i][k]);
        return r;
    }

    E scalar_mul(const E& a, const Int& s) const {
        E r = a;
        for (long i = 0; i < e; ++i)
            for (long k = 0; k < phim; ++k) r[i][k] = norm(r[i][k] * s);
        return r;
    }

    bool eq(const E& a, const E& b) const { return a == b; }
};

}  // namespace

SqrtResult sqrt_in_E(const ECoeff& d, const Int& height_bound) {
    SqrtResult res;
    if (!d.valid() || d.is_zero()) throw input_error("sqrt_in_E: argument must be nonzero");
    if (!d.is_tame()) throw input_error("sqrt_in_E: wild-layer (zetap) content not supported");
    const auto& cx = *d.ctx();
    long p = cx.p(), e = cx.e(), phim = cx.phi_m();

    // rational fast path: E = Q
    if (cx.m() == 1 && e == 1) {
        Rat q0 = d.coeff(0, 0, 0);
        if (q0 < 0) {
            res.exact_no = true;
            return res;
        }
        Int num = q0.get_num(), den = q0.get_den();
        if (mpz_perfect_square_p(num.get_mpz_t()) && mpz_perfect_square_p(den.get_mpz_t())) {
            Int rn, rd;
            mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
            mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
            Rat root(rn);
            root /= Rat(rd);
            res.root = ECoeff::from_rational(d.ctx(), root);
            return res;
        }
        res.exact_no = true;
        return res;
    }

    Val vopt = valuation(d);
    Rat v = *vopt;
    Rat t2r = v * e;
    if (t2r.get_den() != 1) throw std::logic_error("sqrt_in_E: valuation not in (1/e)Z");
    long t2 = static_cast<long>(mpz_get_si(Int(t2r.get_num()).get_mpz_t()));
    if (mod_pos(t2, 2) == 1) {
        res.exact_no = true;  // value-group obstruction
        return res;
    }
    ECoeff u = d * ECoeff::pi_pow(d.ctx(), -t2);

    // coordinates must be p-integral for the lifting ring
    for (long i = 0; i < e; ++i)
        for (long k = 0; k < phim; ++k) {
            const Rat& c = u.coeff(0, i, k);
            if (c != 0 && Int(c.get_den()) % p == 0) {
                res.bound_certified = true;  // imbalance across the primes above p
                return res;
            }
        }

    PAdicEmbedding& emb = cx.embedding();
    const auto& factors = emb.residue_factors();
    long nf = static_cast<long>(factors.size());
    if (nf > 12) throw input_error("sqrt_in_E: too many primes above p");

    // residue of u (w-part 0) mod p as an F_p[x] polynomial
    FpPoly u0;
    for (long k = 0; k < phim; ++k) {
        const Rat& c = u.coeff(0, 0, k);
        Int num = c.get_num() % p, den = c.get_den() % p;
        long nn = mod_pos(mpz_get_si(num.get_mpz_t()), p);
        long dd = mod_pos(mpz_get_si(den.get_mpz_t()), p);
        u0.push_back((nn * fp_inv_scalar(dd, p)) % p);
    }
    fp_trim(u0);

    // per-factor residues and square roots
    std::vector<FpPoly> roots;
    for (long kf = 0; kf < nf; ++kf) {
        FpPoly hk(factors[kf].begin(), factors[kf].end());
        FpPoly uk = fp_mod(u0, hk, p);
        if (uk.empty()) {
            // positive valuation at another prime above p; no cheap decision
            res.bound_certified = true;
            return res;
        }
        Fq fq{p, hk};
        auto rk = fq_sqrt(fq, uk);
        if (!rk) {
            res.exact_no = true;  // nonsquare residue at some prime above p
            return res;
        }
        roots.push_back(*rk);
    }

    // precision for rational reconstruction
    Int A = height_bound;
    long M = 2;
    {
        Int need = 2 * A * A;
        Int cur = p;
        while (cur <= need) {
            cur *= p;
            ++M;
        }
        M += 2;
    }

    SRing S;
    S.p = p;
    S.e = e;
    S.phim = phim;
    S.M = M;
    S.P = 1;
    for (long i = 0; i < M; ++i) S.P *= p;
    for (const Rat& c : cyclotomic_poly(cx.m())) S.phi.push_back(Int(c.get_num()));
    S.phi.pop_back();  // keep only the sub-leading coefficients (monic)

    // embed u into S
    SRing::E uS = S.zero();
    for (long i = 0; i < e; ++i)
        for (long k = 0; k < phim; ++k) {
            const Rat& c = u.coeff(0, i, k);
            if (c == 0) continue;
            Int num = c.get_num() % S.P, den = c.get_den() % S.P;
            if (num < 0) num += S.P;
            Int deninv;
            if (mpz_invert(deninv.get_mpz_t(), den.get_mpz_t(), S.P.get_mpz_t()) == 0)
                throw std::logic_error("sqrt_in_E: denominator not invertible");
            uS[i][k] = S.norm(num * deninv);
        }

    // CRT idempotents mod Phi_m over F_p
    FpPoly phibar;
    for (const Rat& c : cyclotomic_poly(cx.m())) {
        Int cc = Int(c.get_num()) % p;
        phibar.push_back(mod_pos(mpz_get_si(cc.get_mpz_t()), p));
    }
    fp_trim(phibar);
    std::vector<FpPoly> idems;
    for (long kf = 0; kf < nf; ++kf) {
        FpPoly hk(factors[kf].begin(), factors[kf].end());
        auto [cof, rem0] = fp_divmod(phibar, hk, p);
        if (!rem0.empty()) throw std::logic_error("sqrt_in_E: factor does not divide");
        FpPoly g, uinv;
        fp_ext_gcd(fp_mod(cof, hk, p), hk, p, g, uinv);
        if (g.size() != 1) throw std::logic_error("sqrt_in_E: idempotent failure");
        idems.push_back(fp_mod(fp_mul(cof, uinv, p), phibar, p));
    }

    Int inv2;
    {
        Int two(2);
        if (mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), S.P.get_mpz_t()) == 0)
            throw std::logic_error("sqrt_in_E: 2 not invertible");
    }

    long combos = 1L << (nf - 1);
    for (long mask = 0; mask < combos; ++mask) {
        // residue root with chosen signs (first factor positive)
        FpPoly rbar;
        for (long kf = 0; kf < nf; ++kf) {
            FpPoly rk = roots[kf];
            if (kf > 0 && ((mask >> (kf - 1)) & 1)) {
                for (auto& c : rk) c = mod_pos(-c, p);
            }
            rbar = [&] {
                FpPoly t = fp_mod(fp_mul(rk, idems[kf], p), phibar, p);
                t.resize(std::max(t.size(), rbar.size()), 0);
                for (std::size_t i = 0; i < rbar.size(); ++i) t[i] = (t[i] + rbar[i]) % p;
                fp_trim(t);
                return t;
            }();
        }
        // lift to S by Newton: r <- (r + u * r^{-1}) / 2
        SRing::E r = S.zero();
        for (std::size_t k = 0; k < rbar.size(); ++k) r[0][k] = rbar[k];
        // Newton inverse of r, maintained alongside
        long iters = 3;
        {
            long bits = 1;
            while ((1L << bits) < M * e + 2) ++bits;
            iters = bits + 3;
        }
        for (long it = 0; it < iters; ++it) {
            // rinv = inverse of r via separate Newton from residue
            // compute r^{-1} freshly: start from residue inverse
            FpPoly r0;
            for (long k = 0; k < phim; ++k) {
                Int cc = r[0][k] % p;
                r0.push_back(mod_pos(mpz_get_si(cc.get_mpz_t()), p));
            }
            fp_trim(r0);
            FpPoly g, i0;
            fp_ext_gcd(r0, phibar, p, g, i0);
            if (g.size() != 1) break;  // lost invertibility; abandon this combo
            SRing::E rinv = S.zero();
            for (std::size_t k = 0; k < i0.size(); ++k) rinv[0][k] = i0[k];
            for (long jt = 0; jt < iters; ++jt) {
                SRing::E prod = S.mul(r, rinv);
                SRing::E two = S.zero();
                two[0][0] = 2;
                rinv = S.mul(rinv, S.sub(two, prod));
            }
            SRing::E next = S.scalar_mul(S.add(r, S.mul(uS, rinv)), inv2);
            if (S.eq(next, r)) break;
            r = next;
        }
        if (!S.eq(S.mul(r, r), uS)) continue;

        // rational reconstruction of the coordinates
        auto reconstruct = [&](const Int& c, Rat& out) -> bool {
            Int r0 = S.P, r1 = c, t0 = 0, t1 = 1;
            while (r1 > A) {
                Int q = r0 / r1;
                Int tmp = r0 - q * r1;
                r0 = r1;
                r1 = tmp;
                tmp = t0 - q * t1;
                t0 = t1;
                t1 = tmp;
            }
            if (t1 == 0 || abs(t1) > A || abs(r1) > A) return false;
            Int num = r1, den = t1;
            if (den < 0) {
                den = -den;
                num = -num;
            }
            if (gcd(den, Int(p)) != 1) return false;
            out = Rat(num);
            out /= Rat(den);
            return true;
        };
        ECoeff cand = ECoeff::zero(d.ctx());
        bool ok = true;
        for (long i = 0; i < e && ok; ++i)
            for (long k = 0; k < phim && ok; ++k) {
                if (r[i][k] == 0) continue;
                Rat coord;
                if (!reconstruct(r[i][k], coord)) {
                    ok = false;
                    break;
                }
                ECoeff mono = ECoeff::from_rational(d.ctx(), coord);
                if (k > 0) mono = mono * ECoeff::root_of_unity(d.ctx(), cx.m(), k);
                if (i > 0) mono = mono * ECoeff::pi_pow(d.ctx(), i);
                cand = cand + mono;
            }
        if (!ok) continue;
        ECoeff full = cand * ECoeff::pi_pow(d.ctx(), t2 / 2);
        if (full * full == d) {
            res.root = full;
            return res;
        }
    }
    res.bound_certified = true;
    return res;
}

}  // namespace filmod
