#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "filmod/cyclo.hpp"

namespace filmod {

enum class CaseTag {
    Steinberg,
    PSIrreducible,
    PSNonSplit,
    PSSplit,
    SCUnramified,
    SCRamified,
};

std::string case_name(CaseTag t);
std::optional<CaseTag> case_from_name(const std::string& s);
inline bool case_is_sc(CaseTag t) {
    return t == CaseTag::SCUnramified || t == CaseTag::SCRamified;
}

struct AbelianFactors {
    std::vector<long> orders;
    long size() const {
        long s = 1;
        for (long o : orders) s *= o;
        return s;
    }
};

// Normal form delta^del * gamma+^up * gamma-^um * sigma^sig * iota^iota;
// Steinberg/PS groups use only `cyc`.
struct GElem {
    long cyc = 0;
    long del = 0;
    std::vector<long> up, um;
    long sig = 0;
    int iota = 0;
    bool operator==(const GElem&) const = default;
};

class GaloisData {
public:
    enum class Family { Cyclic, SCUnram, SCRam };

    static GaloisData cyclic(long order);
    static GaloisData sc_unramified(long p, long m0, long m1, long n1, AbelianFactors up,
                                    AbelianFactors um);
    static GaloisData sc_ramified(long p, long m0, long m1, long n1, AbelianFactors up,
                                  AbelianFactors um);

    Family family() const { return family_; }
    long order() const { return order_; }
    long q() const { return q_; }
    long m0() const { return m0_; }
    long m1() const { return m1_; }
    long n1() const { return n1_; }
    long delta_order() const { return delta_order_; }
    long cyclic_order() const { return cyclic_order_; }
    const AbelianFactors& uplus() const { return up_; }
    const AbelianFactors& uminus() const { return um_; }

    GElem id() const;
    GElem mul(const GElem& a, const GElem& b) const;
    GElem inv(const GElem& a) const;
    GElem pow(GElem a, long k) const;
    bool is_id(const GElem& a) const;

    long encode(const GElem& a) const;  // bijection onto [0, order)
    GElem decode(long idx) const;

    std::vector<GElem> elements() const;

    bool in_inertia(const GElem& a) const;
    long shift_of(const GElem& a, long n0) const;  // homomorphism to Z/n0

    // lemma-basis subgroup H: full group (cyclic cases) or Gal(F/K') (SC cases)
    bool in_H(const GElem& a) const;
    std::vector<GElem> H_generators() const;

    struct NamedGen {
        std::string name;
        GElem g;
    };
    std::vector<NamedGen> generators() const;
    GElem generator(const std::string& name) const;

    // words over named generators, for representation-property checks
    using Word = std::vector<std::pair<std::string, long>>;
    struct Relation {
        std::string name;
        Word lhs, rhs;
    };
    std::vector<Relation> relations() const;
    GElem eval_word(const Word& w) const;

private:
    Family family_ = Family::Cyclic;
    long order_ = 1;
    long p_ = 3, q_ = 3, m0_ = 1, m1_ = 1, n1_ = 1;
    long delta_order_ = 1, cyclic_order_ = 1, two_m1_ = 2;
    AbelianFactors up_, um_;
};

struct RelationCheck {
    std::string name;
    long instances = 0;
    bool pass = true;
    std::string detail;
};

struct GroupReport {
    std::vector<RelationCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Checks every structural relation by direct computation; in the ramified case
// also checks that no order-2 lift of the ramified quadratic's involution
// exists inside I(F/K) (the usable form of the non-splitness of the extension
// 1 -> Gal(F/K') -> Gal(F/K) -> Gal(K'/K) -> 1).
GroupReport verify_group_relations(const GaloisData& G);

struct CharacterData {
    // Steinberg / PS-irreducible / PS-nonsplit: chi_cyc = exponent on the cyclic generator.
    // PS-split: chi_cyc and chi2_cyc are the exponents of chi_1 and chi_2.
    long chi_cyc = 0, chi2_cyc = 0;
    // SC cases: chi = omega^s * chi_1 * chi_2 on k'^x times U_+ times U_-
    long s = 0;
    std::vector<long> chi1, chi2;
};

struct TowerParams {
    CaseTag tag = CaseTag::Steinberg;
    long p = 3, m0 = 1, eK = 1, m1 = 1, n1 = 1, cyclic_order = 1;
    std::vector<long> uplus, uminus;  // cyclic factor orders; empty = elementary abelian default
    long m = 0, r = -1, e = 0;        // coefficient model; 0 / -1 = derive from characters
    long hensel_index = 0;
    std::vector<long> base_rotation;  // per-j basepoint rotation (group element indices)
};

struct FieldTower {
    CaseTag tag;
    long p, m0, eK, m1, n1, cyclic_order;
    long q;         // residue cardinality of K
    long n0;        // [F_0 : Q_p]
    long K_deg;     // [K : Q_p] = |J|
    long F_over_K;  // [F : K] = |Gal(F/K)|
    long F_deg;     // [F : Q_p] = |J_F|
    Ctx ctx;
    std::shared_ptr<const GaloisData> group;
    std::vector<long> base_rotation;
    CharacterData chars;
};

using TowerPtr = std::shared_ptr<const FieldTower>;

// Builds tower + group + coefficient context, and verifies all group
// invariants before returning.
TowerPtr build_tower(const TowerParams& tp, const CharacterData& chars);

// J_F as a disjoint union over j in J of right Gal(F/K)-torsors with a chosen
// base point per fiber; i(j_F) in Z/n0 intertwines the action with the shift.
class EmbeddingTorsor {
public:
    explicit EmbeddingTorsor(TowerPtr tw);

    long J() const { return tower_->K_deg; }
    long fiber_size() const { return tower_->F_over_K; }
    long jf_count() const { return J() * fiber_size(); }

    long index_of(long j, long k) const { return j * fiber_size() + k; }
    long j_of(long jf) const { return jf / fiber_size(); }
    long k_of(long jf) const { return jf % fiber_size(); }

    const GElem& coord(long jf) const;    // torsor coordinate g_k
    long act(long jf, const GElem& g) const;  // j_F . g
    long component(long jf) const;        // i(j_F) in Z/n0
    long base_component(long j) const;    // i_0(j) (+ rotation shift)

    const FieldTower& tower() const { return *tower_; }

private:
    TowerPtr tower_;
    std::vector<GElem> elems_;
    std::vector<long> comp_;  // component per jf
};

using TorsorPtr = std::shared_ptr<const EmbeddingTorsor>;

// exponent-in-Q/Z character function on group elements
using ExpChar = std::function<Rat(const GElem&)>;

// chi as a character of the lemma subgroup H (trivial on the sigma-part)
ExpChar chi_tilde(const FieldTower& tw, const CharacterData& cd, int which /*1 or 2*/);

struct LemmaBasis {
    std::vector<std::vector<ECoeff>> vecs;  // [m][fiber], zero off the orbit
    std::vector<long> orbit_of;             // fiber-local index -> orbit number
    std::vector<long> reps;                 // fiber-local representative per orbit
};

// The basis x_1, ..., x_m of the chi^{-1}-eigenspace of one fiber: each x_t is
// supported on one H-orbit and propagated by x_{j_F . g} = chi(g)^{-1} x_{j_F};
// a combination sum a_t x_t is a unit iff all a_t are nonzero. Both properties
// are verified on construction.
LemmaBasis lemma_basis(const EmbeddingTorsor& torsor, long j, const ExpChar& chi,
                       bool alt_reps = false);

// True exactly when chi extends (i.e. the non-extendability criterion fails):
// unramified: s = 0 mod q+1 and chi_2^2 = 1; ramified: chi_2^2 = 1.
bool check_extendability(const FieldTower& tw, const CharacterData& cd);

// Test oracle: does some character of the full group (unramified case) resp.
// of I(F/K) (ramified case) restrict to chi on the inertia part?
bool extendability_by_enumeration(const FieldTower& tw, const CharacterData& cd);

}  // namespace filmod
