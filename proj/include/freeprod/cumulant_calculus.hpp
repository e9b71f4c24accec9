#pragma once

#include "freeprod/moment_space.hpp"
#include "freeprod/nc_lattice.hpp"

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace freeprod {

using MomentOracle = std::function<Complex(const Word&)>;

/// kappa_n(a_1, ..., a_n) = sum over sigma in NC(n) of phi_sigma[a] mu(sigma, 1_n),
/// where each argument is a monomial and phi is any moment functional.
Complex free_cumulant(std::span<const Word> args, const MomentOracle& phi);

/// kappa_pi[a] = sum over sigma <= pi of phi_sigma[a] mu(sigma, pi).
Complex free_cumulant_pi_moebius(const Partition& pi, std::span<const Word> args, const MomentOracle& phi);

Complex kappa_n(const FactorState& state, std::span<const Letter> letters);
Complex kappa_n(const FactorState& state, std::span<const Word> args);
Complex kappa_n(const FactorState& state, std::span<const Polynomial> args);

/// Multiplicative extension: product over blocks of kappa_n on the
/// order-preserved block subsequences.
Complex kappa_pi(const FactorState& state, const Partition& pi, std::span<const Letter> letters);
/// The same value via the Möbius sum over sigma <= pi.
Complex kappa_pi_moebius(const FactorState& state, const Partition& pi, std::span<const Letter> letters);

/// Joint free cumulants of one factor, keyed by argument tuples. A table is
/// either backed by a state (values computed on demand and memoized) or holds
/// explicit values, in which case a missing entry is an error.
class CumulantTable {
public:
    using Key = std::vector<Word>;

    explicit CumulantTable(std::shared_ptr<const FactorState> source, int max_order = kMaxGroundSet);
    explicit CumulantTable(const FactorState& source, int max_order = kMaxGroundSet);
    CumulantTable(FactorIndex factor, int degree_bound, std::map<Key, Complex> values);

    /// Explicit table over every letter tuple up to the state's degree bound.
    static CumulantTable tabulate(const FactorState& state);

    FactorIndex factor() const noexcept { return factor_; }
    int degree_bound() const noexcept { return degree_bound_; }
    bool backed_by_state() const noexcept { return source_ != nullptr; }
    const FactorState* source() const noexcept { return source_.get(); }

    Complex value(std::span<const Word> args) const;
    Complex value(std::span<const Letter> letters) const;
    /// Multilinear in each slot.
    Complex value(std::span<const Polynomial> args) const;

    /// Explicit values, or everything memoized so far.
    std::map<Key, Complex> entries() const;

private:
    struct Memo;

    FactorIndex factor_ = 0;
    int degree_bound_ = 0;
    int max_order_ = kMaxGroundSet;
    std::shared_ptr<const FactorState> source_;
    std::shared_ptr<Memo> memo_;
};

/// phi(a_1 ... a_n) = sum over sigma in NC(n) of kappa_sigma[a], reading only
/// the table.
Complex moments_from_cumulants(const CumulantTable& table, std::span<const Letter> letters);
Complex moments_from_cumulants(const CumulantTable& table, std::span<const Word> args);

/// Moments m_1..m_N of a single selfadjoint variable.
struct MomentSequence {
    std::vector<Complex> values;
    int degree_bound() const noexcept { return static_cast<int>(values.size()); }
};

/// Free cumulants kappa_1..kappa_N of a single selfadjoint variable.
struct CumulantSequence {
    std::vector<Complex> values;
    int degree_bound() const noexcept { return static_cast<int>(values.size()); }
};

CumulantSequence cumulants_from_moments(const MomentSequence& m);
MomentSequence moments_from_cumulants(const CumulantSequence& k);

/// Distribution of x + y for free x, y: free cumulants add.
MomentSequence free_convolve_additive(const MomentSequence& x, const MomentSequence& y);

} // namespace freeprod
