#pragma once

#include "crawlq/linalg.hpp"

namespace crawlq {

/// Phase-type distribution (init, subgen): absorption time of a transient CTMC
/// started from `init`. Used for both service times and obsolescence times.
/// Instances only exist in validated form.
class PhaseType {
public:
    /// Validates and builds. Throws ValidationError listing every violated invariant:
    /// init stochastic and nonnegative, subgen diagonal < 0, off-diagonal ≥ 0,
    /// exit = −subgen·e ≥ 0 with at least one positive entry, subgen nonsingular.
    static PhaseType validate(linalg::RowVector init, linalg::Matrix subgen, double tol = 1e-9);

    static PhaseType exponential(double rate);

    const linalg::RowVector& init() const { return init_; }
    const linalg::Matrix& subgen() const { return subgen_; }
    const linalg::Vector& exit() const { return exit_; }
    linalg::Index size() const { return init_.size(); }

    /// b₁ = init·(−S)⁻¹·e
    double mean() const;
    /// 2·init·S⁻²·e − mean²
    double variance() const;
    double scv() const { return variance() / (mean() * mean()); }

    /// Same init, subgen multiplied by s > 0; the mean scales by 1/s.
    PhaseType scaled(double s) const;

private:
    PhaseType(linalg::RowVector init, linalg::Matrix subgen);

    linalg::RowVector init_;
    linalg::Matrix subgen_;
    linalg::Vector exit_;
};

}  // namespace crawlq
