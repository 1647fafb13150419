#include "filmod/cyclo.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>

#include "filmod/padic.hpp"

namespace filmod {

namespace {

// ---- dense polynomials over Q ----
using QPoly = std::vector<Rat>;

void qtrim(QPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

QPoly qmul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j] == 0) continue;
            r[i + j] += a[i] * b[j];
        }
    }
    qtrim(r);
    return r;
}

// exact division, remainder must vanish (used for cyclotomic recursion)
QPoly qdiv_exact(QPoly a, const QPoly& b) {
    QPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Rat(0));
    while (a.size() >= b.size() && !a.empty()) {
        Rat c = a.back() / b.back();
        std::size_t shift = a.size() - b.size();
        q[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
        qtrim(a);
    }
    if (!a.empty()) throw std::logic_error("qdiv_exact: nonzero remainder");
    return q;
}

long euler_phi(long n) {
    long result = n;
    for (long q = 2; q * q <= n; ++q) {
        if (n % q == 0) {
            while (n % q == 0) n /= q;
            result -= result / q;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

const QPoly& cyclotomic(long n) {
    static std::map<long, QPoly> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::function<QPoly(long)> build = [&](long k) -> QPoly {
        auto found = cache.find(k);
        if (found != cache.end()) return found->second;
        QPoly xk_minus_1(k + 1, Rat(0));
        xk_minus_1[0] = -1;
        xk_minus_1[k] = 1;
        QPoly acc = xk_minus_1;
        for (long d = 1; d < k; ++d)
            if (k % d == 0) acc = qdiv_exact(acc, build(d));
        cache[k] = acc;
        return acc;
    };
    build(n);
    return cache.at(n);
}

// ---- generic polynomial algebra over a field-like structure ----
// F provides: E, zero(), one(), is_zero(E), add, sub, mul, inv.
template <class F>
using Pol = std::vector<typename F::E>;

template <class F>
void ptrim(const F& f, Pol<F>& a) {
    while (!a.empty() && f.is_zero(a.back())) a.pop_back();
}

template <class F>
Pol<F> psub(const F& f, Pol<F> a, const Pol<F>& b) {
    if (a.size() < b.size()) a.resize(b.size(), f.zero());
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = f.sub(a[i], b[i]);
    ptrim(f, a);
    return a;
}

template <class F>
Pol<F> pmul(const F& f, const Pol<F>& a, const Pol<F>& b) {
    if (a.empty() || b.empty()) return {};
    Pol<F> r(a.size() + b.size() - 1, f.zero());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (f.is_zero(a[i])) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (f.is_zero(b[j])) continue;
            r[i + j] = f.add(r[i + j], f.mul(a[i], b[j]));
        }
    }
    ptrim(f, r);
    return r;
}

template <class F>
std::pair<Pol<F>, Pol<F>> pdivmod(const F& f, Pol<F> a, const Pol<F>& b) {
    if (b.empty()) throw std::logic_error("pdivmod: division by zero polynomial");
    Pol<F> q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, f.zero());
    auto lead_inv = f.inv(b.back());
    while (a.size() >= b.size() && !a.empty()) {
        auto c = f.mul(a.back(), lead_inv);
        std::size_t shift = a.size() - b.size();
        q[shift] = f.add(q[shift], c);
        for (std::size_t i = 0; i < b.size(); ++i)
            a[shift + i] = f.sub(a[shift + i], f.mul(c, b[i]));
        ptrim(f, a);
    }
    return {q, a};
}

// Extended Euclid: returns (g, u) with u*a == g (mod M). g is the gcd of a and M.
template <class F>
std::pair<Pol<F>, Pol<F>> ext_gcd_mod(const F& f, Pol<F> a, Pol<F> M) {
    Pol<F> r0 = std::move(a), r1 = std::move(M);
    Pol<F> s0 = {f.one()}, s1 = {};
    ptrim(f, r0);
    while (!r1.empty()) {
        auto [q, r] = pdivmod(f, r0, r1);
        r0 = std::move(r1);
        r1 = std::move(r);
        auto s2 = psub(f, s0, pmul(f, q, s1));
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    return {r0, s0};
}

// ---- the three coefficient layers ----

struct QF {
    using E = Rat;
    E zero() const { return Rat(0); }
    E one() const { return Rat(1); }
    bool is_zero(const E& a) const { return a == 0; }
    E add(const E& a, const E& b) const { return a + b; }
    E sub(const E& a, const E& b) const { return a - b; }
    E mul(const E& a, const E& b) const { return a * b; }
    E inv(const E& a) const {
        if (a == 0) throw input_error("division by zero");
        return 1 / a;
    }
};

// Q(zeta_m)
struct CycF {
    const CoeffContext* cx;
    using E = CVec;
    E zero() const { return CVec(cx->phi_m(), Rat(0)); }
    E one() const {
        CVec v(cx->phi_m(), Rat(0));
        v[0] = 1;
        return v;
    }
    bool is_zero(const E& a) const {
        for (const auto& x : a)
            if (x != 0) return false;
        return true;
    }
    E add(const E& a, const E& b) const {
        CVec r = a;
        for (long i = 0; i < cx->phi_m(); ++i) r[i] += b[i];
        return r;
    }
    E sub(const E& a, const E& b) const {
        CVec r = a;
        for (long i = 0; i < cx->phi_m(); ++i) r[i] -= b[i];
        return r;
    }
    E mul(const E& a, const E& b) const;
    E inv(const E& a) const;
};

CVec CycF::mul(const CVec& a, const CVec& b) const {
    long n = cx->phi_m();
    std::vector<Rat> raw(2 * n - 1, Rat(0));
    for (long i = 0; i < n; ++i) {
        if (a[i] == 0) continue;
        for (long j = 0; j < n; ++j) {
            if (b[j] == 0) continue;
            raw[i + j] += a[i] * b[j];
        }
    }
    CVec r(raw.begin(), raw.begin() + n);
    for (long k = 2 * n - 2; k >= n; --k) {
        if (raw[k] == 0) continue;
        const CVec& red = cx->zeta_m_pow_raw(k);
        for (long l = 0; l < n; ++l)
            if (red[l] != 0) r[l] += raw[k] * red[l];
    }
    return r;
}

CVec CycF::inv(const CVec& a) const {
    if (is_zero(a)) throw input_error("division by zero");
    QF qf;
    QPoly ap(a.begin(), a.end());
    qtrim(ap);
    QPoly mod = cx->cyclo_m();
    auto [g, u] = ext_gcd_mod(qf, ap, mod);
    if (g.size() != 1) throw std::logic_error("cyclotomic inverse: gcd not constant");
    if (u.size() > static_cast<std::size_t>(cx->phi_m()))
        throw std::logic_error("cyclotomic inverse: degree overflow");
    Rat gi = 1 / g[0];
    CVec r(cx->phi_m(), Rat(0));
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] * gi;
    return r;
}

// Q(zeta_m)(pi), pi^e = p
struct PiF {
    const CoeffContext* cx;
    using E = std::vector<CVec>;  // length e
    CycF base() const { return CycF{cx}; }
    E zero() const { return E(cx->e(), base().zero()); }
    E one() const {
        E v(cx->e(), base().zero());
        v[0] = base().one();
        return v;
    }
    bool is_zero(const E& a) const {
        CycF b = base();
        for (const auto& x : a)
            if (!b.is_zero(x)) return false;
        return true;
    }
    E add(const E& a, const E& b) const {
        CycF f = base();
        E r = a;
        for (long i = 0; i < cx->e(); ++i) r[i] = f.add(r[i], b[i]);
        return r;
    }
    E sub(const E& a, const E& b) const {
        CycF f = base();
        E r = a;
        for (long i = 0; i < cx->e(); ++i) r[i] = f.sub(r[i], b[i]);
        return r;
    }
    E mul(const E& a, const E& b) const {
        CycF f = base();
        long e = cx->e();
        std::vector<CVec> raw(2 * e - 1, f.zero());
        for (long i = 0; i < e; ++i) {
            if (f.is_zero(a[i])) continue;
            for (long j = 0; j < e; ++j) {
                if (f.is_zero(b[j])) continue;
                raw[i + j] = f.add(raw[i + j], f.mul(a[i], b[j]));
            }
        }
        E r(raw.begin(), raw.begin() + e);
        Rat pp(cx->p());
        for (long k = 2 * e - 2; k >= e; --k) {
            if (f.is_zero(raw[k])) continue;
            for (long l = 0; l < cx->phi_m(); ++l) r[k - e][l] += pp * raw[k][l];
        }
        return r;
    }
    E inv(const E& a) const {
        if (is_zero(a)) throw input_error("division by zero");
        CycF f = base();
        Pol<CycF> ap(a.begin(), a.end());
        ptrim(f, ap);
        // modulus W^e - p
        Pol<CycF> mod(cx->e() + 1, f.zero());
        mod[0] = f.zero();
        mod[0][0] = Rat(-cx->p());
        mod[cx->e()] = f.one();
        auto [g, u] = ext_gcd_mod(f, ap, mod);
        if (g.size() != 1) throw std::logic_error("pi-layer inverse: gcd not constant");
        if (u.size() > static_cast<std::size_t>(cx->e()))
            throw std::logic_error("pi-layer inverse: degree overflow");
        auto gi = f.inv(g[0]);
        E r = zero();
        for (std::size_t i = 0; i < u.size(); ++i) r[i] = f.mul(u[i], gi);
        return r;
    }
};

long mod_pos(long a, long n) {
    long r = a % n;
    return r < 0 ? r + n : r;
}

long pow_long(long b, long k) {
    long r = 1;
    while (k-- > 0) r *= b;
    return r;
}

long gcd_long(long a, long b) {
    while (b) {
        long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

long inv_mod_long(long a, long n) {  // n >= 1, gcd(a,n) = 1
    long t = 0, newt = 1, r = n, newr = mod_pos(a, n);
    while (newr != 0) {
        long q = r / newr;
        long tmp = t - q * newt;
        t = newt;
        newt = tmp;
        tmp = r - q * newr;
        r = newr;
        newr = tmp;
    }
    if (r != 1) throw std::logic_error("inv_mod_long: not invertible");
    return mod_pos(t, n);
}

bool is_prime_long(long n) {
    if (n < 2) return false;
    for (long q = 2; q * q <= n; ++q)
        if (n % q == 0) return false;
    return true;
}

}  // namespace

// expose the zeta reduction rows to CycF
const CVec& CoeffContext::zeta_m_pow_raw(long k) const { return zred_[k - phi_m_]; }

const std::vector<Rat>& cyclotomic_poly(long n) { return cyclotomic(n); }

std::shared_ptr<const CoeffContext> CoeffContext::make(long p, long m, long r, long e,
                                                       long hensel_factor_index) {
    if (!is_prime_long(p) || p == 2) throw input_error("p must be an odd prime");
    if (m < 1 || m % p == 0) throw input_error("cyclotomic order m must be positive and prime to p");
    if (r < 0 || e < 1) throw input_error("invalid context parameters (need r >= 0, e >= 1)");
    auto cx = std::shared_ptr<CoeffContext>(new CoeffContext());
    cx->p_ = p;
    cx->m_ = m;
    cx->r_ = r;
    cx->e_ = e;
    cx->hensel_index_ = hensel_factor_index;
    cx->phi_m_ = euler_phi(m);
    cx->pr_ = pow_long(p, r);
    cx->phi_pr_ = r == 0 ? 1 : (p - 1) * pow_long(p, r - 1);
    cx->cyclo_m_ = cyclotomic(m);

    long n = cx->phi_m_;
    // zeta^k for k in [n, 2n-2]
    cx->zred_.clear();
    if (n >= 1) {
        CVec top(n, Rat(0));  // zeta^n = -(lower coeffs of Phi_m)
        for (long l = 0; l < n; ++l) top[l] = -cx->cyclo_m_[l];
        cx->zred_.push_back(top);
        for (long k = n + 1; k <= 2 * n - 2; ++k) {
            const CVec& prev = cx->zred_.back();
            CVec cur(n, Rat(0));
            // multiply prev by zeta
            for (long l = 0; l < n - 1; ++l) cur[l + 1] = prev[l];
            if (prev[n - 1] != 0)
                for (long l = 0; l < n; ++l) cur[l] += prev[n - 1] * cx->zred_[0][l];
            cx->zred_.push_back(cur);
        }
    }
    // zeta^k for k in [0, m)
    cx->zpow_.resize(m);
    CVec cur(n, Rat(0));
    cur[0] = 1;
    for (long k = 0; k < m; ++k) {
        cx->zpow_[k] = cur;
        CVec nxt(n, Rat(0));
        for (long l = 0; l < n - 1; ++l) nxt[l + 1] = cur[l];
        if (cur[n - 1] != 0) {
            if (n == 1) {
                // phi(m) = 1: zeta = 1 (m = 1) or -1 (m = 2)
                nxt[0] += cur[0] * (m == 1 ? Rat(1) : Rat(-1));
            } else {
                const CVec& red = cx->zred_[0];
                for (long l = 0; l < n; ++l) nxt[l] += cur[n - 1] * red[l];
            }
        }
        cur = nxt;
    }

    // y-layer reduction: Phi_{p^r}(y) = sum_{t<p} y^{t p^{r-1}}
    long ny = cx->phi_pr_;
    cx->yred_.clear();
    if (r >= 1 && ny >= 1) {
        std::vector<Rat> top(ny, Rat(0));
        long step = pow_long(p, r - 1);
        for (long t = 0; t < p - 1; ++t) top[t * step] = Rat(-1);
        cx->yred_.push_back(top);
        for (long k = ny + 1; k <= 2 * ny - 2; ++k) {
            const auto& prev = cx->yred_.back();
            std::vector<Rat> curr(ny, Rat(0));
            for (long l = 0; l < ny - 1; ++l) curr[l + 1] = prev[l];
            if (prev[ny - 1] != 0)
                for (long l = 0; l < ny; ++l) curr[l] += prev[ny - 1] * cx->yred_[0][l];
            cx->yred_.push_back(curr);
        }
    }
    return cx;
}

bool CoeffContext::supports_root_order(long n) const {
    if (n < 1) return false;
    long pa = 1;
    while (n % p_ == 0) {
        n /= p_;
        pa *= p_;
    }
    return m_ % n == 0 && pr_ % pa == 0;
}

const CVec& CoeffContext::zeta_m_pow(long k) const { return zpow_[mod_pos(k, m_)]; }

std::string CoeffContext::header() const {
    std::ostringstream os;
    os << "p=" << p_ << " m=" << m_ << " r=" << r_ << " e=" << e_;
    return os.str();
}

PAdicEmbedding& CoeffContext::embedding() const {
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    if (!emb_) emb_ = std::make_shared<PAdicEmbedding>(p_, m_, hensel_index_);
    return *emb_;
}

// ---- ECoeff ----

ECoeff::ECoeff(Ctx ctx) : ctx_(std::move(ctx)) {
    c_.assign(ctx_->dim(), Rat(0));
}

long ECoeff::idx(long iy, long ipi, long iz) const {
    return (iy * ctx_->e() + ipi) * ctx_->phi_m() + iz;
}

const Rat& ECoeff::coeff(long iy, long ipi, long iz) const { return c_[idx(iy, ipi, iz)]; }

void ECoeff::check_same(const ECoeff& o) const {
    if (!ctx_ || !o.ctx_) throw input_error("uninitialized coefficient");
    if (ctx_ != o.ctx_ &&
        (ctx_->p() != o.ctx_->p() || ctx_->m() != o.ctx_->m() || ctx_->r() != o.ctx_->r() ||
         ctx_->e() != o.ctx_->e()))
        throw input_error("coefficient context mismatch: " + ctx_->header() + " vs " +
                          o.ctx_->header());
}

ECoeff ECoeff::from_rational(Ctx ctx, const Rat& x) {
    ECoeff r(std::move(ctx));
    r.c_[0] = x;
    return r;
}

ECoeff ECoeff::root_of_unity(Ctx ctx, long n, long k) {
    if (n < 1) throw input_error("root_of_unity: order must be positive");
    long p = ctx->p();
    long n_tame = n, pa = 1;
    while (n_tame % p == 0) {
        n_tame /= p;
        pa *= p;
    }
    if (ctx->m() % n_tame != 0 || ctx->pr() % pa != 0)
        throw input_error("root_of_unity: order " + std::to_string(n) +
                          " not supported by context " + ctx->header());
    k = mod_pos(k, n);
    // CRT split: k/n = A/n_tame + B/pa (mod 1)
    long A = 0, B = 0;
    if (n_tame > 1 && pa > 1) {
        A = mod_pos(k * inv_mod_long(pa, n_tame), n_tame);
        B = mod_pos(k * inv_mod_long(n_tame, pa), pa);
    } else if (n_tame > 1) {
        A = k;
    } else {
        B = k;
    }
    ECoeff r(ctx);
    long zdeg = n_tame > 0 ? mod_pos(A * (ctx->m() / std::max(n_tame, 1L)), ctx->m()) : 0;
    const CVec& zm = ctx->zeta_m_pow(zdeg);
    long ydeg_full = pa > 1 ? mod_pos(B * (ctx->pr() / pa), ctx->pr()) : 0;
    // y^ydeg_full reduced mod Phi_{p^r}
    std::vector<Rat> ycoef(ctx->phi_pr(), Rat(0));
    if (ydeg_full < ctx->phi_pr()) {
        ycoef[ydeg_full] = 1;
    } else {
        // repeated reduction: maintain dense y-vector
        ycoef[0] = 1;
        for (long t = 0; t < ydeg_full; ++t) {
            std::vector<Rat> nxt(ctx->phi_pr(), Rat(0));
            for (long l = 0; l + 1 < ctx->phi_pr(); ++l) nxt[l + 1] = ycoef[l];
            const Rat& topc = ycoef[ctx->phi_pr() - 1];
            if (topc != 0) {
                if (ctx->r() == 0) {
                    nxt[0] += topc;  // y = 1
                } else {
                    const auto& red = ctx->yred_[0];
                    for (long l = 0; l < ctx->phi_pr(); ++l) nxt[l] += topc * red[l];
                }
            }
            ycoef = nxt;
        }
    }
    for (long iy = 0; iy < ctx->phi_pr(); ++iy) {
        if (ycoef[iy] == 0) continue;
        for (long iz = 0; iz < ctx->phi_m(); ++iz)
            if (zm[iz] != 0) r.c_[r.idx(iy, 0, iz)] = ycoef[iy] * zm[iz];
    }
    return r;
}

ECoeff ECoeff::root_from_exponent(Ctx ctx, const Rat& lambda) {
    Rat l = lambda - Rat(mpz_class(lambda.get_num() / lambda.get_den()));
    if (l < 0) l += 1;
    long den = mpz_get_si(l.get_den().get_mpz_t());
    long num = mpz_get_si(l.get_num().get_mpz_t());
    return root_of_unity(std::move(ctx), den, num);
}

ECoeff ECoeff::pi_pow(Ctx ctx, long k) {
    long e = ctx->e();
    long ip = mod_pos(k, e);
    long pw = (k - ip) / e;
    Rat c(1);
    if (pw >= 0)
        for (long t = 0; t < pw; ++t) c *= ctx->p();
    else
        for (long t = 0; t < -pw; ++t) c /= ctx->p();
    ECoeff r(std::move(ctx));
    r.c_[r.idx(0, ip, 0)] = c;
    return r;
}

bool ECoeff::is_zero() const {
    for (const auto& x : c_)
        if (x != 0) return false;
    return true;
}

bool ECoeff::is_one() const {
    if (c_[0] != 1) return false;
    for (std::size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

bool ECoeff::operator==(const ECoeff& o) const {
    check_same(o);
    return c_ == o.c_;
}

ECoeff ECoeff::operator+(const ECoeff& o) const {
    check_same(o);
    ECoeff r = *this;
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
    return r;
}

ECoeff ECoeff::operator-(const ECoeff& o) const {
    check_same(o);
    ECoeff r = *this;
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
    return r;
}

ECoeff ECoeff::operator-() const {
    ECoeff r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

ECoeff ECoeff::operator*(const ECoeff& o) const {
    check_same(o);
    const auto& cx = *ctx_;
    long E = cx.e(), PY = cx.phi_pr(), PZ = cx.phi_m();
    long RY = 2 * PY - 1, RP = 2 * E - 1, RZ = 2 * PZ - 1;
    std::vector<Rat> raw(static_cast<std::size_t>(RY) * RP * RZ, Rat(0));
    auto ridx = [&](long iy, long ip, long iz) { return (iy * RP + ip) * RZ + iz; };
    for (long iy = 0; iy < PY; ++iy)
        for (long ip = 0; ip < E; ++ip)
            for (long iz = 0; iz < PZ; ++iz) {
                const Rat& a = c_[idx(iy, ip, iz)];
                if (a == 0) continue;
                for (long jy = 0; jy < PY; ++jy)
                    for (long jp = 0; jp < E; ++jp)
                        for (long jz = 0; jz < PZ; ++jz) {
                            const Rat& b = o.c_[o.idx(jy, jp, jz)];
                            if (b == 0) continue;
                            raw[ridx(iy + jy, ip + jp, iz + jz)] += a * b;
                        }
            }
    // zeta axis
    for (long k = RZ - 1; k >= PZ; --k)
        for (long iy = 0; iy < RY; ++iy)
            for (long ip = 0; ip < RP; ++ip) {
                Rat cv = raw[ridx(iy, ip, k)];
                if (cv == 0) continue;
                const CVec& red = cx.zeta_m_pow_raw(k);
                for (long l = 0; l < PZ; ++l)
                    if (red[l] != 0) raw[ridx(iy, ip, l)] += cv * red[l];
                raw[ridx(iy, ip, k)] = 0;
            }
    // pi axis
    for (long k = RP - 1; k >= E; --k)
        for (long iy = 0; iy < RY; ++iy)
            for (long iz = 0; iz < PZ; ++iz) {
                Rat cv = raw[ridx(iy, k, iz)];
                if (cv == 0) continue;
                raw[ridx(iy, k - E, iz)] += cv * cx.p();
                raw[ridx(iy, k, iz)] = 0;
            }
    // y axis
    for (long k = RY - 1; k >= PY; --k)
        for (long ip = 0; ip < E; ++ip)
            for (long iz = 0; iz < PZ; ++iz) {
                Rat cv = raw[ridx(k, ip, iz)];
                if (cv == 0) continue;
                if (cx.r() == 0) {
                    raw[ridx(0, ip, iz)] += cv;
                } else {
                    const auto& red = cx.yred_[k - PY];
                    for (long l = 0; l < PY; ++l)
                        if (red[l] != 0) raw[ridx(l, ip, iz)] += cv * red[l];
                }
                raw[ridx(k, ip, iz)] = 0;
            }
    ECoeff res(ctx_);
    for (long iy = 0; iy < PY; ++iy)
        for (long ip = 0; ip < E; ++ip)
            for (long iz = 0; iz < PZ; ++iz) res.c_[res.idx(iy, ip, iz)] = raw[ridx(iy, ip, iz)];
    return res;
}

bool ECoeff::is_monomial() const {
    int nz = 0;
    for (const auto& x : c_)
        if (x != 0 && ++nz > 1) return false;
    return nz == 1;
}

bool ECoeff::is_tame() const {
    for (long iy = 1; iy < ctx_->phi_pr(); ++iy)
        for (long ip = 0; ip < ctx_->e(); ++ip)
            for (long iz = 0; iz < ctx_->phi_m(); ++iz)
                if (c_[idx(iy, ip, iz)] != 0) return false;
    return true;
}

CVec ECoeff::tame_part(long i) const {
    if (!is_tame()) throw input_error("tame_part: element has wild-layer content");
    CVec r(ctx_->phi_m());
    for (long iz = 0; iz < ctx_->phi_m(); ++iz) r[iz] = c_[idx(0, i, iz)];
    return r;
}

ECoeff ECoeff::inverse() const {
    if (is_zero()) throw input_error("division by zero");
    const auto& cx = *ctx_;
    if (is_monomial()) {
        long my = 0, mp = 0, mz = 0;
        Rat cv;
        for (long iy = 0; iy < cx.phi_pr(); ++iy)
            for (long ip = 0; ip < cx.e(); ++ip)
                for (long iz = 0; iz < cx.phi_m(); ++iz)
                    if (c_[idx(iy, ip, iz)] != 0) {
                        my = iy;
                        mp = ip;
                        mz = iz;
                        cv = c_[idx(iy, ip, iz)];
                    }
        // basis monomial zeta^mz * y^my * pi^mp; invert each factor
        ECoeff r = from_rational(ctx_, 1 / cv);
        if (mz != 0) r = r * root_of_unity(ctx_, cx.m(), cx.m() - mz);
        if (my != 0) {
            // y = zeta_{p^r}: y^my inverse = y^{p^r - my}
            r = r * root_of_unity(ctx_, cx.pr(), cx.pr() - my);
        }
        if (mp != 0) r = r * pi_pow(ctx_, -mp);
        return r;
    }
    // layered extended Euclid
    PiF pif{ctx_.get()};
    // unpack into y-polynomial over PiF
    Pol<PiF> ap;
    for (long iy = 0; iy < cx.phi_pr(); ++iy) {
        PiF::E part(cx.e(), CVec(cx.phi_m(), Rat(0)));
        for (long ip = 0; ip < cx.e(); ++ip)
            for (long iz = 0; iz < cx.phi_m(); ++iz) part[ip][iz] = c_[idx(iy, ip, iz)];
        ap.push_back(std::move(part));
    }
    ptrim(pif, ap);
    Pol<PiF> mod;
    if (cx.r() == 0) {
        mod = {pif.sub(pif.zero(), pif.one()), pif.one()};  // y - 1
    } else {
        mod.assign(cx.phi_pr() + 1, pif.zero());
        long step = 1;
        for (long t = 1; t < cx.r(); ++t) step *= cx.p();
        for (long t = 0; t < cx.p(); ++t) mod[t * step] = pif.one();
    }
    auto [g, u] = ext_gcd_mod(pif, ap, mod);
    if (g.size() != 1) {
        throw input_error("division by a zero divisor of E (wild layer splits)");
    }
    if (u.size() > static_cast<std::size_t>(cx.phi_pr()))
        throw std::logic_error("inverse: degree overflow");
    auto gi = pif.inv(g[0]);
    ECoeff r(ctx_);
    for (std::size_t iy = 0; iy < u.size(); ++iy) {
        auto coef = pif.mul(u[iy], gi);
        for (long ip = 0; ip < cx.e(); ++ip)
            for (long iz = 0; iz < cx.phi_m(); ++iz)
                r.c_[r.idx(static_cast<long>(iy), ip, iz)] = coef[ip][iz];
    }
    return r;
}

ECoeff ECoeff::operator/(const ECoeff& o) const {
    check_same(o);
    return *this * o.inverse();
}

ECoeff ECoeff::pow(long k) const {
    ECoeff base = k >= 0 ? *this : inverse();
    unsigned long kk = k >= 0 ? k : -k;
    ECoeff r = one(ctx_);
    while (kk) {
        if (kk & 1) r = r * base;
        base = base * base;
        kk >>= 1;
    }
    return r;
}

bool ECoeff::is_unit() const {
    if (is_zero()) return false;
    try {
        (void)inverse();
        return true;
    } catch (const input_error&) {
        return false;
    }
}

std::string ECoeff::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (long iy = 0; iy < ctx_->phi_pr(); ++iy)
        for (long ip = 0; ip < ctx_->e(); ++ip)
            for (long iz = 0; iz < ctx_->phi_m(); ++iz) {
                const Rat& cv = c_[idx(iy, ip, iz)];
                if (cv == 0) continue;
                if (!first) os << " + ";
                first = false;
                os << cv.get_str();
                if (iz != 0) os << "*zeta^" << iz;
                if (iy != 0) os << "*zetap^" << iy;
                if (ip != 0) os << "*pi^" << ip;
            }
    return os.str();
}

std::size_t ECoeff::hash() const { return std::hash<std::string>{}(str()); }

namespace {
void strip(std::string& s) {
    auto issp = [](char ch) { return ch == ' ' || ch == '\t'; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
}
}  // namespace

ECoeff ECoeff::parse(Ctx ctx, const std::string& text) {
    std::string s = text;
    strip(s);
    if (s.empty()) throw input_error("empty coefficient literal");
    if (s == "0") return zero(ctx);
    ECoeff acc = zero(ctx);
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find('+', pos);
        std::string term = s.substr(pos, next == std::string::npos ? next : next - pos);
        pos = next == std::string::npos ? s.size() : next + 1;
        strip(term);
        if (term.empty()) throw input_error("malformed coefficient literal: '" + text + "'");
        ECoeff tval = one(ctx);
        bool saw_factor = false;
        std::size_t fpos = 0;
        while (fpos < term.size()) {
            std::size_t fnext = term.find('*', fpos);
            std::string fac = term.substr(fpos, fnext == std::string::npos ? fnext : fnext - fpos);
            fpos = fnext == std::string::npos ? term.size() : fnext + 1;
            strip(fac);
            if (fac.empty()) throw input_error("malformed coefficient literal: '" + text + "'");
            auto parse_exp = [&](const std::string& f, const std::string& name) -> long {
                if (f == name) return 1;
                if (f.size() <= name.size() + 1 || f.compare(0, name.size(), name) != 0 ||
                    f[name.size()] != '^')
                    throw input_error("malformed factor '" + f + "'");
                return std::stol(f.substr(name.size() + 1));
            };
            if (fac.rfind("zetap", 0) == 0) {
                long k = parse_exp(fac, "zetap");
                if (ctx->r() == 0) throw input_error("zetap used but context has r = 0");
                tval = tval * root_of_unity(ctx, ctx->pr(), k);
            } else if (fac.rfind("zeta", 0) == 0) {
                long k = parse_exp(fac, "zeta");
                tval = tval * root_of_unity(ctx, ctx->m(), k);
            } else if (fac.rfind("pi", 0) == 0) {
                long k = parse_exp(fac, "pi");
                tval = tval * pi_pow(ctx, k);
            } else {
                // rational
                try {
                    Rat q(fac);
                    q.canonicalize();
                    tval = tval * from_rational(ctx, q);
                } catch (const std::exception&) {
                    throw input_error("malformed rational '" + fac + "' in '" + text + "'");
                }
            }
            saw_factor = true;
        }
        if (!saw_factor) throw input_error("malformed coefficient literal: '" + text + "'");
        acc = acc + tval;
    }
    return acc;
}

}  // namespace filmod
