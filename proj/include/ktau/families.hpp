#pragma once

// The three bivariate families with a scalar dependence parameter t:
//
//   normal : standard bivariate normal with correlation t,  t in (-1, 1)
//   fgm    : F(x,y) = xy + t(x - x^2)(y - y^2) on (0,1)^2,   t in [-1, 1]
//   pareto : F(x,y) = 1 - (1+x)^-t - (1+y)^-t + (1+x+y)^-t,  t in (0, inf)

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "ktau/error.hpp"
#include "ktau/rng.hpp"

namespace ktau {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// A point estimate with its standard error.
struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

enum class Family { BivariateNormal, FgmCopula, BivariatePareto };

class FamilySpec {
public:
    constexpr explicit FamilySpec(Family kind) noexcept : kind_(kind) {}

    /// Accepts the CLI names `normal`, `fgm`, `pareto`.
    [[nodiscard]] static FamilySpec parse(std::string_view name) {
        if (name == "normal") return FamilySpec(Family::BivariateNormal);
        if (name == "fgm") return FamilySpec(Family::FgmCopula);
        if (name == "pareto") return FamilySpec(Family::BivariatePareto);
        throw Error(ErrorKind::InvalidArgument,
                    "unknown family '" + std::string(name) + "' (expected normal, fgm or pareto)");
    }

    [[nodiscard]] constexpr Family kind() const noexcept { return kind_; }

    [[nodiscard]] constexpr const char* name() const noexcept {
        switch (kind_) {
            case Family::BivariateNormal: return "normal";
            case Family::FgmCopula: return "fgm";
            case Family::BivariatePareto: return "pareto";
        }
        return "";
    }

    [[nodiscard]] constexpr const char* domain_text() const noexcept {
        switch (kind_) {
            case Family::BivariateNormal: return "(-1, 1)";
            case Family::FgmCopula: return "[-1, 1]";
            case Family::BivariatePareto: return "(0, inf)";
        }
        return "";
    }

    [[nodiscard]] bool contains(double t) const noexcept {
        if (!std::isfinite(t)) return false;
        switch (kind_) {
            case Family::BivariateNormal: return t > -1.0 && t < 1.0;
            case Family::FgmCopula: return t >= -1.0 && t <= 1.0;
            case Family::BivariatePareto: return t > 0.0;
        }
        return false;
    }

    /// Throws a Domain error unless t is a valid parameter. `index` is the
    /// 1-based sequence position for diagnostics, if any.
    void require(double t, std::optional<std::int64_t> index = std::nullopt) const {
        if (contains(t)) return;
        std::string msg = std::string(name()) + " parameter " + std::to_string(t) +
                          " outside " + domain_text();
        std::size_t pos = Error::npos;
        if (index) {
            msg += " at i = " + std::to_string(*index);
            pos = static_cast<std::size_t>(*index);
        }
        throw Error(ErrorKind::Domain, msg, pos);
    }

    friend constexpr bool operator==(FamilySpec, FamilySpec) = default;

private:
    Family kind_;
};

// ---------------------------------------------------------------------------
// Conditional distributions used by the exact samplers.

/// FGM conditional CDF of Y given X = x: y + a(y - y^2), a = t(1 - 2x).
inline double fgm_conditional_cdf(double t, double x, double y) noexcept {
    const double a = t * (1.0 - 2.0 * x);
    return y + a * (y - y * y);
}

/// Root in [0,1] of a*y^2 - (1+a)*y + u = 0, the inverse of
/// fgm_conditional_cdf. Written as 2u / ((1+a) + sqrt(disc)) so that
/// small |a| does not cancel.
inline double fgm_conditional_quantile(double t, double x, double u) noexcept {
    const double a = t * (1.0 - 2.0 * x);
    if (std::fabs(a) < 1e-12) return u;
    const double b = 1.0 + a;
    const double disc = std::fmax(b * b - 4.0 * a * u, 0.0);
    return std::fmin(2.0 * u / (b + std::sqrt(disc)), 1.0);
}

/// Pareto conditional survival P(Y > y | X = x) = ((1+x)/(1+x+y))^(t+1).
inline double pareto_conditional_survival(double t, double x, double y) noexcept {
    return std::pow((1.0 + x) / (1.0 + x + y), t + 1.0);
}

// ---------------------------------------------------------------------------

/// Joint CDF. Not available for the normal family.
inline double cdf(FamilySpec family, double t, Point p) {
    family.require(t);
    switch (family.kind()) {
        case Family::BivariateNormal:
            throw Error(ErrorKind::Unsupported, "bivariate normal CDF is not implemented");
        case Family::FgmCopula: {
            if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
                throw Error(ErrorKind::Domain, "fgm CDF argument outside [0,1]^2");
            }
            const double v = p.x * p.y + t * (p.x - p.x * p.x) * (p.y - p.y * p.y);
            return std::clamp(v, 0.0, 1.0);
        }
        case Family::BivariatePareto: {
            if (!(p.x >= 0.0 && p.y >= 0.0) || std::isnan(p.x) || std::isnan(p.y)) {
                throw Error(ErrorKind::Domain, "pareto CDF argument must be non-negative");
            }
            const double v = 1.0 - std::pow(1.0 + p.x, -t) - std::pow(1.0 + p.y, -t) +
                             std::pow(1.0 + p.x + p.y, -t);
            return std::clamp(v, 0.0, 1.0);
        }
    }
    return 0.0;
}

/// Marginal CDF of X (identical to that of Y for all three families).
inline double marginal_cdf(FamilySpec family, double t, double x) {
    family.require(t);
    switch (family.kind()) {
        case Family::BivariateNormal: return 0.5 * std::erfc(-x / std::numbers::sqrt2);
        case Family::FgmCopula: return std::clamp(x, 0.0, 1.0);
        case Family::BivariatePareto: return x <= 0.0 ? 0.0 : 1.0 - std::pow(1.0 + x, -t);
    }
    return 0.0;
}

/// Deterministic map from two open uniforms to one exact draw.
///   normal : (Z1, Z2) by Box-Muller; X = Z1, Y = t Z1 + sqrt(1-t^2) Z2
///   fgm    : X = u1, Y = conditional quantile at u2
///   pareto : X = u1^(-1/t) - 1, Y = (1+X)(u2^(-1/(t+1)) - 1)
inline Point sample_from_uniforms(FamilySpec family, double t, double u1, double u2) {
    family.require(t);
    switch (family.kind()) {
        case Family::BivariateNormal: {
            const auto [z1, z2] = box_muller(u1, u2);
            return {z1, t * z1 + std::sqrt(1.0 - t * t) * z2};
        }
        case Family::FgmCopula: return {u1, fgm_conditional_quantile(t, u1, u2)};
        case Family::BivariatePareto: {
            // expm1/log form keeps full precision when t is large and X is tiny.
            const double x = std::expm1(-std::log(u1) / t);
            const double y = (1.0 + x) * std::expm1(-std::log(u2) / (t + 1.0));
            return {x, y};
        }
    }
    return {};
}

inline Point sample(FamilySpec family, double t, Rng& rng) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    return sample_from_uniforms(family, t, u1, u2);
}

/// p = P(X_j <= X_i, Y_j <= Y_i) with (X_i, Y_i) ~ family(t_i) and
/// (X_j, Y_j) ~ family(t_j) independent.
inline double pair_expectation(FamilySpec family, double t_i, double t_j) {
    family.require(t_i);
    family.require(t_j);
    switch (family.kind()) {
        case Family::BivariateNormal: {
            double arg = 0.5 * (t_i + t_j);
            if (std::fabs(arg) > 1.0) {
                if (std::fabs(arg) - 1.0 > 1e-12) {
                    throw Error(ErrorKind::Domain, "arcsin argument outside [-1, 1]");
                }
                arg = std::copysign(1.0, arg);
            }
            return std::asin(arg) / (2.0 * std::numbers::pi) + 0.25;
        }
        case Family::FgmCopula: return 0.25 + (t_i + t_j) / 36.0;
        case Family::BivariatePareto: {
            const double s = t_i + t_j;
            return (t_j * t_j + t_j) / (s * (s + 1.0));
        }
    }
    return 0.0;
}

/// Monte Carlo estimate of the same probability as pair_expectation, with
/// binomial standard error.
inline Estimate pair_prob_mc(FamilySpec family, double t_i, double t_j, std::int64_t reps, Rng& rng) {
    family.require(t_i);
    family.require(t_j);
    if (reps < 1000) {
        throw Error(ErrorKind::InvalidArgument, "pair_prob_mc needs reps >= 1000");
    }
    std::int64_t hits = 0;
    for (std::int64_t r = 0; r < reps; ++r) {
        const Point a = sample(family, t_i, rng);
        const Point b = sample(family, t_j, rng);
        if (b.x <= a.x && b.y <= a.y) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(reps);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(reps))};
}

}  // namespace ktau
