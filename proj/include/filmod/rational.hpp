#pragma once

#include <gmpxx.h>
#include <optional>
#include <stdexcept>
#include <string>

namespace filmod {

using Rat = mpq_class;
using Int = mpz_class;

// v_p of a nonzero rational, as a plain integer.
inline long vp_rational(const Rat& x, long p) {
    if (x == 0) throw std::invalid_argument("vp_rational: zero");
    long v = 0;
    Int num = x.get_num(), den = x.get_den();
    Int q, r;
    for (;;) {
        mpz_fdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), p);
        if (r != 0) break;
        num = q;
        ++v;
    }
    for (;;) {
        mpz_fdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), den.get_mpz_t(), p);
        if (r != 0) break;
        den = q;
        --v;
    }
    return v;
}

inline std::string rat_str(const Rat& x) {
    return x.get_str();
}

inline Rat rat_of(long n, long d = 1) {
    Rat r(n, d);
    r.canonicalize();
    return r;
}

// Extended valuation: nullopt encodes +infinity (valuation of zero).
using Val = std::optional<Rat>;

inline bool val_le(const Val& a, const Val& b) {  // a <= b with inf handling
    if (!a) return !b ? true : false;
    if (!b) return true;
    return *a <= *b;
}

inline std::string val_str(const Val& v) {
    return v ? v->get_str() : std::string("inf");
}

}  // namespace filmod
