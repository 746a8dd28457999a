#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrob/gauge.hpp"
#include "qrob/rng.hpp"

namespace qrob {

/// Equal-weight sample law: sorted sample vector, right-continuous step CDF
/// F(x) = (1/N) #{ s_i <= x }, quantile(u) = sample at index ceil(uN).
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> samples);

    const std::vector<double>& samples() const noexcept { return *sorted_; }
    std::size_t size() const noexcept { return sorted_->size(); }

    double cdf(double x) const;
    double cdf_left(double x) const; // (1/N) #{ s_i < x }
    double quantile(double u) const;
    double min() const noexcept { return sorted_->front(); }
    double max() const noexcept { return sorted_->back(); }
    double mean() const;

private:
    std::shared_ptr<const std::vector<double>> sorted_;
};

/// A law on the real line. Immutable after construction and cheap to copy;
/// exposes CDF, generalized-inverse quantile, inverse-CDF sampling and the
/// declared finite-moment order used by admissibility checks.
class Distribution {
public:
    enum class Kind { Empirical, Dirac, Uniform, Normal, Pareto, Mixture };

    static Distribution empirical(std::vector<double> samples);
    static Distribution empirical(EmpiricalDistribution emp);
    static Distribution dirac(double c);
    static Distribution uniform(double a, double b);
    static Distribution normal(double mu, double sigma);
    /// One-sided Pareto on [scale, inf) with tail index alpha; `reflected`
    /// mirrors the law to (-inf, -scale]. Declares finite moments of every
    /// order strictly below alpha.
    static Distribution pareto(double scale, double alpha, bool reflected = false);
    /// CDF (1-weight)*F_left + weight*F_right.
    static Distribution mixture(double weight, Distribution left, Distribution right);

    Kind kind() const noexcept;

    double cdf(double x) const;
    double cdf_left(double x) const;
    /// Generalized inverse inf{ x : F(x) >= u }, u in (0,1).
    double quantile(double u) const;
    /// n i.i.d. draws, inverse-CDF applied to the stream's uniforms.
    std::vector<double> sample(std::size_t n, RngStream& rng) const;

    /// sup of p with E|X|^p finite (may be +inf).
    double finite_moment_order() const noexcept;
    /// Strict at the Pareto boundary: Pareto(alpha) has no finite alpha-th
    /// moment, while the declared-infinite families admit every order.
    bool has_finite_moment(double p) const noexcept;

    bool is_step() const noexcept;              // purely atomic law
    std::vector<double> jump_points() const;    // CDF jump locations, sorted
    /// (value, weight) atoms when the law is purely atomic; nullopt otherwise.
    std::optional<std::vector<std::pair<double, double>>> atoms() const;
    const EmpiricalDistribution* as_empirical() const noexcept;

    std::string describe() const;

private:
    struct Impl;
    explicit Distribution(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Mixture (1-eps)*base + eps*noise; eps in [0,1].
Distribution contaminate(const Distribution& base, double eps,
                         const Distribution& noise);

/// Admissible at order p: every moment up to p declared finite.
bool is_admissible(const Distribution& dist, double p);

/// Integral of phi against the law: exact sum for atomic laws, quantile-space
/// quadrature otherwise. Returns +inf when phi's growth order exceeds the
/// law's declared finite-moment order.
double moment(const Distribution& dist, const GaugeFunction& phi, double tol);

/// E[g(X)] by exact atom sums or quantile-space quadrature to tolerance tol.
double expect(const Distribution& dist, const std::function<double(double)>& g,
              double tol);

double normal_cdf(double x);
double normal_quantile(double u);

} // namespace qrob
