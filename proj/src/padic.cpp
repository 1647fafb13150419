#include "filmod/padic.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace filmod {

namespace {

long mod_pos(long a, long n) {
    long r = a % n;
    return r < 0 ? r + n : r;
}

// ---- F_p[x] utilities (p small) ----
using FpPoly = std::vector<long>;  // coefficients in [0, p)

void fp_trim(FpPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

FpPoly fp_add(FpPoly a, const FpPoly& b, long p) {
    a.resize(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + b[i]) % p;
    fp_trim(a);
    return a;
}

FpPoly fp_sub(FpPoly a, const FpPoly& b, long p) {
    a.resize(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = mod_pos(a[i] - b[i], p);
    fp_trim(a);
    return a;
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

FpPoly fp_gcd(FpPoly a, FpPoly b, long p) {
    fp_trim(a);
    fp_trim(b);
    while (!b.empty()) {
        FpPoly r = fp_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        long inv = fp_inv_scalar(a.back(), p);
        for (auto& c : a) c = (c * inv) % p;
    }
    return a;
}

// extended gcd: u*a + v*b = g (monic)
void fp_ext_gcd(FpPoly a, FpPoly b, long p, FpPoly& g, FpPoly& u, FpPoly& v) {
    FpPoly s0{1}, s1{}, t0{}, t1{1};
    fp_trim(a);
    fp_trim(b);
    while (!b.empty()) {
        auto [q, r] = fp_divmod(a, b, p);
        a = std::move(b);
        b = std::move(r);
        FpPoly s2 = fp_sub(s0, fp_mul(q, s1, p), p);
        FpPoly t2 = fp_sub(t0, fp_mul(q, t1, p), p);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    long inv = a.empty() ? 1 : fp_inv_scalar(a.back(), p);
    for (auto& c : a) c = (c * inv) % p;
    for (auto& c : s0) c = (c * inv) % p;
    for (auto& c : t0) c = (c * inv) % p;
    g = std::move(a);
    u = std::move(s0);
    v = std::move(t0);
}

FpPoly fp_powmod(FpPoly base, long k, const FpPoly& h, long p) {
    FpPoly r{1};
    base = fp_mod(std::move(base), h, p);
    while (k) {
        if (k & 1) r = fp_mod(fp_mul(r, base, p), h, p);
        base = fp_mod(fp_mul(base, base, p), h, p);
        k >>= 1;
    }
    return r;
}

// x^(p^k) mod h
FpPoly fp_frobenius_power(const FpPoly& h, long p, long k) {
    FpPoly cur = fp_mod(FpPoly{0, 1}, h, p);
    for (long t = 0; t < k; ++t) cur = fp_powmod(cur, p, h, p);
    return cur;
}

bool fp_irreducible(const FpPoly& h, long p) {
    long f = static_cast<long>(h.size()) - 1;
    FpPoly x = fp_mod(FpPoly{0, 1}, h, p);
    if (fp_frobenius_power(h, p, f) != x) return false;
    for (long l = 2; l <= f; ++l) {
        bool prime = l >= 2;
        for (long d = 2; d * d <= l; ++d)
            if (l % d == 0) prime = false;
        if (!prime || f % l != 0) continue;
        FpPoly diff = fp_sub(fp_frobenius_power(h, p, f / l), x, p);
        if (fp_gcd(diff, h, p).size() != 1) return false;
    }
    return true;
}

// ---- F_{p^f} = F_p[t]/h ----
struct Fq {
    long p;
    FpPoly h;  // monic, degree f
    long f() const { return static_cast<long>(h.size()) - 1; }
    using E = FpPoly;
    E zero() const { return {}; }
    E one() const { return {1}; }
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
    E pw(E b, long k) const { return pw_big(std::move(b), Int(k)); }
    bool is_one(const E& a) const { return a.size() == 1 && a[0] == 1; }
    bool is_zero(const E& a) const { return a.empty(); }
    E element(Int idx) const {  // lex enumeration, constant coefficient first
        E r;
        for (long i = 0; i < f(); ++i) {
            Int q = idx / p;
            r.push_back(mpz_get_si(Int(idx - q * p).get_mpz_t()));
            idx = q;
        }
        fp_trim(r);
        return r;
    }
};

std::vector<long> prime_factors(Int n) {
    std::vector<long> primes;
    for (long q = 2; Int(q) * q <= n; ++q) {
        if (n % q == 0) {
            primes.push_back(q);
            while (n % q == 0) n /= q;
        }
    }
    if (n > 1) {
        if (!n.fits_slong_p()) throw std::logic_error("prime_factors: factor too large");
        primes.push_back(mpz_get_si(n.get_mpz_t()));
    }
    return primes;
}

Int pow_int(long p, long n) {
    Int r = 1;
    for (long i = 0; i < n; ++i) r *= p;
    return r;
}

using ZPoly = std::vector<Int>;

void z_trim(ZPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

ZPoly z_mul(const ZPoly& a, const ZPoly& b) {
    if (a.empty() || b.empty()) return {};
    ZPoly r(a.size() + b.size() - 1, Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    z_trim(r);
    return r;
}

// a mod b, b monic, coefficients reduced mod P
ZPoly z_rem_monic(ZPoly a, const ZPoly& b, const Int& P) {
    for (auto& c : a) {
        c %= P;
        if (c < 0) c += P;
    }
    z_trim(a);
    while (a.size() >= b.size() && !a.empty()) {
        Int c = a.back();
        std::size_t sh = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) {
            a[sh + i] -= c * b[i];
            a[sh + i] %= P;
            if (a[sh + i] < 0) a[sh + i] += P;
        }
        z_trim(a);
    }
    return a;
}

}  // namespace

PAdicEmbedding::PAdicEmbedding(long p, long m, long factor_index) : p_(p), m_(m) {
    // f = multiplicative order of p mod m
    long f = 1;
    if (m > 1) {
        long acc = mod_pos(p, m);
        while (acc != 1) {
            acc = (acc * p) % m;
            ++f;
            if (f > 64) throw std::logic_error("order computation overflow");
        }
    }
    f_ = f;
    if (f_ > 20) throw input_error("residue degree of the cyclotomic layer too large");

    for (const Rat& c : cyclotomic_poly(m_)) phi_int_.push_back(Int(c.get_num()));
    long phim = static_cast<long>(phi_int_.size()) - 1;
    num_factors_ = phim / f_;
    index_ = mod_pos(factor_index, num_factors_);

    // canonical irreducible h of degree f over F_p: lex-least with nonzero constant term
    Fq fq;
    fq.p = p_;
    {
        std::vector<long> coeffs(f_, 0);
        for (;;) {
            FpPoly h(coeffs.begin(), coeffs.end());
            h.push_back(1);
            if (h[0] != 0 && fp_irreducible(h, p_)) {
                fq.h = h;
                break;
            }
            long i = 0;
            while (i < f_ && ++coeffs[i] == p_) coeffs[i++] = 0;
            if (i == f_) throw std::logic_error("no irreducible polynomial found");
        }
    }

    // multiplicative generator of F_{p^f}, lex-least
    Int q_order = pow_int(p_, f_) - 1;
    std::vector<long> qprimes = prime_factors(q_order);
    Fq::E gen;
    for (Int idx = 1;; ++idx) {
        Fq::E cand = fq.element(idx);
        if (fq.is_zero(cand)) continue;
        bool ok = true;
        for (long ell : qprimes)
            if (fq.is_one(fq.pw_big(cand, q_order / ell))) {
                ok = false;
                break;
            }
        if (ok) {
            gen = cand;
            break;
        }
    }
    Fq::E zeta = fq.pw_big(gen, q_order / m_);

    // orbit representatives of (Z/m)^* under multiplication by p, ordered by least element
    std::vector<long> reps;
    {
        std::vector<char> seen(m_, 0);
        for (long u = 0; u < m_; ++u) {
            if (std::gcd(u, m_) != 1 || seen[u]) continue;
            reps.push_back(u);
            long v = u;
            do {
                seen[v] = 1;
                v = (v * p_) % m_;
            } while (v != u);
        }
    }
    if (static_cast<long>(reps.size()) != num_factors_)
        throw std::logic_error("factor count mismatch");

    for (long u : reps) {
        Fq::E root = fq.pw(zeta, u);
        // minimal polynomial over F_p: prod_{i<f} (X - root^{p^i})
        std::vector<Fq::E> fac{fq.one()};
        Fq::E r = root;
        for (long orbit = 0; orbit < f_; ++orbit) {
            std::vector<Fq::E> nf(fac.size() + 1, fq.zero());
            for (std::size_t i = 0; i < fac.size(); ++i) {
                nf[i + 1] = fp_add(nf[i + 1], fac[i], p_);
                nf[i] = fp_sub(nf[i], fq.mul(r, fac[i]), p_);
            }
            fac = std::move(nf);
            r = fq.pw(r, p_);
        }
        if (!(r == root)) throw std::logic_error("frobenius orbit length mismatch");
        FpPoly gp;
        for (const auto& cc : fac) {
            if (cc.size() > 1) throw std::logic_error("factor not rational over F_p");
            gp.push_back(cc.empty() ? 0 : cc[0]);
        }
        factors_p_.push_back(gp);
    }

    g_p_ = factors_p_[index_];
    FpPoly phi_p;
    for (const Int& c : phi_int_) {
        Int cc = c % p_;
        phi_p.push_back(mod_pos(mpz_get_si(cc.get_mpz_t()), p_));
    }
    fp_trim(phi_p);
    auto [quot, rem] = fp_divmod(phi_p, g_p_, p_);
    if (!rem.empty()) throw std::logic_error("chosen factor does not divide Phi_m mod p");
    h_p_ = quot;
    FpPoly g0;
    fp_ext_gcd(g_p_, h_p_, p_, g0, bez_a_, bez_b_);
    if (g0.size() != 1) throw std::logic_error("factor and cofactor not coprime mod p");

    N_ = 1;
    gN_.assign(g_p_.begin(), g_p_.end());
    hN_.assign(h_p_.begin(), h_p_.end());
}

long PAdicEmbedding::precision() const {
    std::lock_guard<std::mutex> lock(mu_);
    return N_;
}

void PAdicEmbedding::raise_precision(long target) const {
    std::lock_guard<std::mutex> lock(mu_);
    lift_to(target);
}

std::vector<Int> PAdicEmbedding::factor_mod(long target) const {
    std::lock_guard<std::mutex> lock(mu_);
    lift_to(target);
    Int P = pow_int(p_, target);
    std::vector<Int> r = gN_;
    for (auto& c : r) {
        c %= P;
        if (c < 0) c += P;
    }
    return r;
}

void PAdicEmbedding::lift_to(long target) const {
    while (N_ < target) {
        Int P = pow_int(p_, N_);
        Int Pp = P * p_;
        ZPoly gh = z_mul(gN_, hN_);
        std::size_t dlen = std::max(phi_int_.size(), gh.size());
        FpPoly delta_p(dlen, 0);
        for (std::size_t i = 0; i < dlen; ++i) {
            Int v = (i < phi_int_.size() ? phi_int_[i] : Int(0)) - (i < gh.size() ? gh[i] : Int(0));
            if (v % P != 0) throw std::logic_error("hensel: invariant broken");
            Int d = (v / P) % p_;
            delta_p[i] = mod_pos(mpz_get_si(d.get_mpz_t()), p_);
        }
        fp_trim(delta_p);
        FpPoly u = fp_mod(fp_mul(bez_b_, delta_p, p_), g_p_, p_);
        FpPoly v = fp_mod(fp_mul(bez_a_, delta_p, p_), h_p_, p_);
        gN_.resize(std::max(gN_.size(), u.size()), Int(0));
        for (std::size_t i = 0; i < u.size(); ++i) gN_[i] += P * u[i];
        hN_.resize(std::max(hN_.size(), v.size()), Int(0));
        for (std::size_t i = 0; i < v.size(); ++i) hN_[i] += P * v[i];
        ++N_;
        for (auto& c : gN_) {
            c %= Pp;
            if (c < 0) c += Pp;
        }
        for (auto& c : hN_) {
            c %= Pp;
            if (c < 0) c += Pp;
        }
    }
}

Val PAdicEmbedding::vm(const CVec& z) const {
    bool zero = true;
    for (const auto& c : z)
        if (c != 0) zero = false;
    if (zero) return std::nullopt;

    Int den(1);
    for (const auto& c : z) den = lcm(den, Int(c.get_den()));
    ZPoly zint;
    for (const auto& c : z) zint.push_back(Int(c.get_num()) * (den / Int(c.get_den())));
    z_trim(zint);
    long vden = 0;
    {
        Int d = den;
        while (d % p_ == 0) {
            d /= p_;
            ++vden;
        }
    }

    std::lock_guard<std::mutex> lock(mu_);
    long bound = -1;
    long N = std::max<long>(N_, 24);
    for (;;) {
        lift_to(N);
        Int P = pow_int(p_, N);
        ZPoly img = z_rem_monic(zint, gN_, P);
        long best = -1;
        for (const auto& c : img) {
            if (c == 0) continue;
            long v = 0;
            Int x = c;
            while (x % p_ == 0) {
                x /= p_;
                ++v;
            }
            if (best < 0 || v < best) best = v;
        }
        if (best >= 0) return Rat(best - vden);
        if (bound < 0) {
            // v_p(resultant(Phi_m, zint)) bounds the valuation sought
            std::vector<Rat> A(phi_int_.size()), B(zint.size());
            for (std::size_t i = 0; i < A.size(); ++i) A[i] = Rat(phi_int_[i]);
            for (std::size_t i = 0; i < B.size(); ++i) B[i] = Rat(zint[i]);
            Rat vres(0);
            auto deg = [](const std::vector<Rat>& x) { return static_cast<long>(x.size()) - 1; };
            for (;;) {
                if (B.empty()) throw std::logic_error("vm: resultant vanished");
                if (deg(B) == 0) {
                    vres += Rat(deg(A)) * Rat(vp_rational(B[0], p_));
                    break;
                }
                std::vector<Rat> R = A;
                while (R.size() >= B.size() && !R.empty()) {
                    Rat c = R.back() / B.back();
                    std::size_t sh = R.size() - B.size();
                    for (std::size_t i = 0; i < B.size(); ++i) R[sh + i] -= c * B[i];
                    while (!R.empty() && R.back() == 0) R.pop_back();
                }
                if (R.empty()) throw std::logic_error("vm: polynomials not coprime");
                vres += Rat(deg(A) - deg(R)) * Rat(vp_rational(B.back(), p_));
                A = std::move(B);
                B = std::move(R);
            }
            bound = static_cast<long>(mpz_get_si(Int(vres.get_num() / vres.get_den()).get_mpz_t()));
        }
        if (N > bound + 1) throw std::logic_error("vm: no digit below norm bound");
        N = std::max(N * 2, bound + 2);
    }
}

std::string PAdicEmbedding::describe() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::ostringstream os;
    os << "prime " << index_ << "/" << num_factors_ << " above " << p_ << " in Q(zeta_" << m_
       << "), residue degree " << f_ << ", factor mod " << p_ << ": [";
    for (std::size_t i = 0; i < g_p_.size(); ++i) os << (i ? " " : "") << g_p_[i];
    os << "]";
    return os.str();
}

// ---- valuation on E ----

Val valuation(const ECoeff& x) {
    if (!x.valid()) throw input_error("valuation of uninitialized coefficient");
    if (x.is_zero()) return std::nullopt;
    if (!x.is_tame())
        throw input_error("valuation not supported on wild-layer (zetap) content");
    const auto& cx = *x.ctx();
    PAdicEmbedding& emb = cx.embedding();
    Val best;
    for (long i = 0; i < cx.e(); ++i) {
        CVec part = x.tame_part(i);
        Val v = emb.vm(part);
        if (!v) continue;
        Rat cand = *v + rat_of(i, cx.e());
        if (!best || cand < *best) best = cand;
    }
    return best;
}

}  // namespace filmod
