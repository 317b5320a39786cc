#pragma once
// Averaged localisation functions R_f and the flow-free pair-limit
// formulas used as oracles by the sojourn engine.

#include "sojourn/extrapolate.hpp"
#include "sojourn/types.hpp"

#include <vector>

namespace sojourn {

/// Even cutoff on R^d: a plateau f = 1 near the origin and power-law decay
/// <x>^-rho. Three built-in families:
///   - radial smooth:  f(x) = f0(|x|), C^inf profile with a smooth join;
///   - product smooth: f(x) = prod_j f0(|x_j|);
///   - characteristic ball: sharp indicator of |x| <= 1 (no gradient).
class LocalisationFunction {
public:
    enum class Kind { RadialSmooth, ProductSmooth, CharacteristicBall };

    static LocalisationFunction radial_bump(int dim, double rho, double delta = 1.0);
    static LocalisationFunction product_bump(int dim, double rho, double delta = 1.0);
    static LocalisationFunction characteristic_ball(int dim);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double rho() const { return rho_; }
    double delta() const { return delta_; }

    bool smooth() const { return kind_ != Kind::CharacteristicBall; }
    bool has_hessian() const { return smooth(); }
    /// Radius beyond which f vanishes (1 for the ball, +inf otherwise).
    double support_radius() const;
    /// Largest radius with f identically 1 inside (in the Euclidean norm).
    double plateau_radius() const { return delta_; }

    double operator()(const Vec& x) const;
    Vec gradient(const Vec& x) const;
    Mat hessian(const Vec& x) const;

    /// Sampled-ray constants: |f(x)| <= C <x>^-rho, |df(x)| <= C' <x>^-(1+rho).
    double decay_constant() const { return decay_c_; }
    double gradient_decay_constant() const { return grad_decay_c_; }

    // 1-D profile (radial profile, and the factor of the product kind)
    double profile(double s) const;
    double profile_derivative(double s) const;
    double profile_second(double s) const;

    std::string kind_name() const;

private:
    LocalisationFunction(Kind k, int dim, double rho, double delta);
    void record_decay_constants();

    Kind kind_;
    int dim_;
    double rho_;
    double delta_;
    double decay_c_ = 1.0;
    double grad_decay_c_ = 1.0;
};

struct RfOptions {
    double quad_tol = 1e-10;
};

/// R_f(x) = Int_0^inf dmu/mu [f(mu x) - 1_{[0,1]}(mu)],  x != 0.
double eval_Rf(const LocalisationFunction& f, const Vec& x, const RfOptions& opt = {});

/// Gradient of R_f. Radial kinds (including the ball) use the closed form
/// -x/|x|^2; the product kind integrates Int_0^inf (grad f)(mu x) dmu.
Vec grad_Rf(const LocalisationFunction& f, const Vec& x, const RfOptions& opt = {});

/// Quadrature route for grad R_f, available for any smooth kind. Used to
/// cross-check the radial closed form.
Vec grad_Rf_quadrature(const LocalisationFunction& f, const Vec& x, const RfOptions& opt = {});

struct HomogeneitySample {
    Vec x;
    double euler_residual;  // |x . grad R_f(x) + 1|
    double scale_residual;  // max_t |t grad R_f(t x) - grad R_f(x)|_inf, t in {1/2, 2}
};

struct HomogeneityReport {
    double max_euler_residual = 0.0;
    double max_scale_residual = 0.0;
    std::vector<HomogeneitySample> samples;
};

HomogeneityReport check_homogeneity(const LocalisationFunction& f, const std::vector<Vec>& xs,
                                    const RfOptions& opt = {});

struct PairLimitOptions {
    double quad_tol = 1e-10;
    double tail_tol = 1e-9; // target for the analytic tail bound of the t-integral
};

/// (1/2) Int_0^inf dt [f((x-t y)/r) - f((x+t y)/r)] at a fixed radius r.
/// For the sharp ball the integrand is piecewise constant and the integral
/// reduces to the measure of the inside intervals, located exactly.
double pair_integral(const LocalisationFunction& f, const Vec& x, const Vec& y, double r,
                     const PairLimitOptions& opt = {});

/// (1/2) Sum_{n>=1} [f((x-n y)/r) - f((x+n y)/r)], truncated by the same
/// tail bound. Requires two derivatives with decay (sharp ball rejected).
double pair_sum(const LocalisationFunction& f, const Vec& x, const Vec& y, double r,
                const PairLimitOptions& opt = {});

struct LimitEstimate {
    std::vector<double> radii;
    std::vector<double> values;
    double limit = 0.0;
    double rate = 0.0;
    bool from_fit = false;
};

LimitEstimate pair_limit_continuous(const LocalisationFunction& f, const Vec& x, const Vec& y,
                                    const std::vector<double>& radii,
                                    const PairLimitOptions& opt = {});

LimitEstimate pair_limit_discrete(const LocalisationFunction& f, const Vec& x, const Vec& y,
                                  const std::vector<double>& radii,
                                  const PairLimitOptions& opt = {});

} // namespace sojourn
