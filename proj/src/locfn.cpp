#include "sojourn/locfn.hpp"

#include "sojourn/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace sojourn {

namespace {

// Profile tail: for s > delta let u = s - delta and w(u) = u^2 exp(-1/u).
// Then f0(s) = (1 + w)^(-(1+rho)/2). The exp(-1/u) factor makes the join at
// the plateau edge C^inf; for large u the profile decays like u^-(1+rho).
struct Tail {
    double w, dw, d2w;
};

Tail tail_terms(double u)
{
    if (u <= 0.0)
        return {0.0, 0.0, 0.0};
    const double e = std::exp(-1.0 / u);
    const double w = u * u * e;
    const double dw = (2.0 * u + 1.0) * e;
    const double d2w = e * (2.0 + (2.0 * u + 1.0) / (u * u));
    return {w, dw, d2w};
}

} // namespace

LocalisationFunction::LocalisationFunction(Kind k, int dim, double rho, double delta)
    : kind_(k), dim_(dim), rho_(rho), delta_(delta)
{
    if (dim < 1)
        throw ConfigError("localisation function: dimension must be positive");
    if (k != Kind::CharacteristicBall && rho <= 0.0)
        throw ConfigError("localisation function: decay exponent rho must be positive");
    if (delta <= 0.0)
        throw ConfigError("localisation function: plateau radius must be positive");
    record_decay_constants();
}

LocalisationFunction LocalisationFunction::radial_bump(int dim, double rho, double delta)
{
    return LocalisationFunction(Kind::RadialSmooth, dim, rho, delta);
}

LocalisationFunction LocalisationFunction::product_bump(int dim, double rho, double delta)
{
    return LocalisationFunction(Kind::ProductSmooth, dim, rho, delta);
}

LocalisationFunction LocalisationFunction::characteristic_ball(int dim)
{
    return LocalisationFunction(Kind::CharacteristicBall, dim, 1.0, 1.0);
}

double LocalisationFunction::support_radius() const
{
    return kind_ == Kind::CharacteristicBall ? 1.0
                                             : std::numeric_limits<double>::infinity();
}

double LocalisationFunction::profile(double s) const
{
    s = std::abs(s);
    if (kind_ == Kind::CharacteristicBall)
        return s <= 1.0 ? 1.0 : 0.0;
    const Tail t = tail_terms(s - delta_);
    if (t.w == 0.0)
        return 1.0;
    return std::pow(1.0 + t.w, -0.5 * (1.0 + rho_));
}

double LocalisationFunction::profile_derivative(double s) const
{
    if (kind_ == Kind::CharacteristicBall)
        throw UnsupportedFunctionError("characteristic ball has no derivative");
    const double sign = s < 0.0 ? -1.0 : 1.0;
    s = std::abs(s);
    const Tail t = tail_terms(s - delta_);
    if (t.w == 0.0 && t.dw == 0.0)
        return 0.0;
    const double beta = 0.5 * (1.0 + rho_);
    return sign * (-beta) * std::pow(1.0 + t.w, -beta - 1.0) * t.dw;
}

double LocalisationFunction::profile_second(double s) const
{
    if (kind_ == Kind::CharacteristicBall)
        throw UnsupportedFunctionError("characteristic ball has no derivative");
    s = std::abs(s);
    const Tail t = tail_terms(s - delta_);
    if (t.w == 0.0 && t.dw == 0.0 && t.d2w == 0.0)
        return 0.0;
    const double beta = 0.5 * (1.0 + rho_);
    const double base = 1.0 + t.w;
    return beta * (beta + 1.0) * std::pow(base, -beta - 2.0) * t.dw * t.dw -
           beta * std::pow(base, -beta - 1.0) * t.d2w;
}

double LocalisationFunction::operator()(const Vec& x) const
{
    switch (kind_) {
    case Kind::CharacteristicBall:
        return x.norm() <= 1.0 ? 1.0 : 0.0;
    case Kind::RadialSmooth:
        return profile(x.norm());
    case Kind::ProductSmooth: {
        double p = 1.0;
        for (int j = 0; j < dim_; ++j)
            p *= profile(x[j]);
        return p;
    }
    }
    return 0.0;
}

Vec LocalisationFunction::gradient(const Vec& x) const
{
    Vec g = Vec::Zero(dim_);
    switch (kind_) {
    case Kind::CharacteristicBall:
        throw UnsupportedFunctionError("characteristic ball has no gradient");
    case Kind::RadialSmooth: {
        const double s = x.norm();
        if (s <= delta_ || s == 0.0)
            return g;
        g = (profile_derivative(s) / s) * x;
        return g;
    }
    case Kind::ProductSmooth: {
        Vec vals(dim_);
        for (int j = 0; j < dim_; ++j)
            vals[j] = profile(x[j]);
        for (int j = 0; j < dim_; ++j) {
            double d = profile_derivative(x[j]);
            if (d == 0.0) {
                g[j] = 0.0;
                continue;
            }
            for (int k = 0; k < dim_; ++k)
                if (k != j) d *= vals[k];
            g[j] = d;
        }
        return g;
    }
    }
    return g;
}

Mat LocalisationFunction::hessian(const Vec& x) const
{
    Mat h = Mat::Zero(dim_, dim_);
    switch (kind_) {
    case Kind::CharacteristicBall:
        throw UnsupportedFunctionError("characteristic ball has no hessian");
    case Kind::RadialSmooth: {
        const double s = x.norm();
        if (s <= delta_ || s == 0.0)
            return h;
        const double d1 = profile_derivative(s);
        const double d2 = profile_second(s);
        const Vec u = x / s;
        h = (d2 - d1 / s) * (u * u.transpose());
        h += (d1 / s) * Mat::Identity(dim_, dim_);
        return h;
    }
    case Kind::ProductSmooth: {
        Vec vals(dim_), d1(dim_), d2(dim_);
        for (int j = 0; j < dim_; ++j) {
            vals[j] = profile(x[j]);
            d1[j] = profile_derivative(x[j]);
            d2[j] = profile_second(x[j]);
        }
        for (int j = 0; j < dim_; ++j) {
            for (int k = 0; k < dim_; ++k) {
                double term = (j == k) ? d2[j] : d1[j] * d1[k];
                for (int l = 0; l < dim_; ++l)
                    if (l != j && l != k) term *= vals[l];
                h(j, k) = term;
            }
        }
        return h;
    }
    }
    return h;
}

void LocalisationFunction::record_decay_constants()
{
    if (kind_ == Kind::CharacteristicBall) {
        decay_c_ = std::pow(2.0, 0.5 * rho_); // |f| <= <x>^-1 * sqrt(2) on the support
        grad_decay_c_ = 0.0;
        return;
    }
    // Sample rays through the axes, the diagonal, and a fixed pseudo-random
    // fan of directions; a 1.5x margin covers directions between samples.
    std::vector<Vec> dirs;
    for (int j = 0; j < dim_; ++j)
        dirs.push_back(Vec::Unit(dim_, j));
    dirs.push_back(Vec::Constant(dim_, 1.0 / std::sqrt(double(dim_))));
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    auto next = [&state]() {
        state ^= state << 13; state ^= state >> 7; state ^= state << 17;
        return double(state >> 11) / double(1ull << 53);
    };
    for (int k = 0; k < 24; ++k) {
        Vec v(dim_);
        for (int j = 0; j < dim_; ++j)
            v[j] = 2.0 * next() - 1.0;
        if (v.norm() > 1e-3)
            dirs.push_back(v / v.norm());
    }
    double c = 0.0, cg = 0.0;
    for (const Vec& v : dirs) {
        for (double s = 0.25 * delta_; s < 1e6; s *= 1.1) {
            const Vec x = s * v;
            const double bracket = std::sqrt(1.0 + s * s);
            c = std::max(c, std::abs((*this)(x)) * std::pow(bracket, rho_));
            cg = std::max(cg, gradient(x).lpNorm<Eigen::Infinity>() * std::pow(bracket, 1.0 + rho_));
        }
    }
    decay_c_ = std::max(1.5 * c, 1.0);
    grad_decay_c_ = std::max(1.5 * cg, 1e-3);
}

std::string LocalisationFunction::kind_name() const
{
    switch (kind_) {
    case Kind::RadialSmooth: return "radial-smooth";
    case Kind::ProductSmooth: return "product-smooth";
    case Kind::CharacteristicBall: return "characteristic-ball";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// R_f and its gradient

double eval_Rf(const LocalisationFunction& f, const Vec& x, const RfOptions& opt)
{
    if (x.size() != f.dim())
        throw std::domain_error("eval_Rf: dimension mismatch");
    const double ax = x.norm();
    if (ax == 0.0)
        throw std::domain_error("eval_Rf: x must be nonzero");

    if (f.kind() == LocalisationFunction::Kind::CharacteristicBall) {
        // f(mu x) = 1_{mu <= 1/|x|}; the integrand is -1/mu or +1/mu between
        // the two jumps, zero elsewhere.
        return -std::log(ax);
    }

    // mu below the plateau exit contributes nothing.
    double scale = ax;
    if (f.kind() == LocalisationFunction::Kind::ProductSmooth)
        scale = x.lpNorm<Eigen::Infinity>();
    const double mu_plateau = f.plateau_radius() / scale;

    auto g = [&](double mu) { return f(mu * x) / mu; };

    double value = 0.0;
    double lo = 1.0; // start of the remaining smooth piece
    if (mu_plateau < 1.0) {
        value += integrate([&](double mu) { return (f(mu * x) - 1.0) / mu; }, mu_plateau, 1.0,
                           {opt.quad_tol / 3.0});
    } else {
        value += std::log(mu_plateau); // f = 1, indicator = 0 on [1, mu_plateau]
        lo = mu_plateau;
    }

    // Grow the upper limit until the analytic tail bound C |x|^-rho M^-rho / rho
    // falls below tolerance.
    const double rho = f.rho();
    const double c = f.decay_constant();
    double hi = std::max(2.0 * lo, 2.0);
    double tail = c * std::pow(ax * hi, -rho) / rho;
    double piece = integrate(g, lo, hi, {opt.quad_tol / 3.0});
    value += piece;
    int guard = 0;
    while (tail > 0.5 * opt.quad_tol && ++guard < 60) {
        const double next = 2.0 * hi;
        value += integrate(g, hi, next, {opt.quad_tol / 6.0});
        hi = next;
        tail = c * std::pow(ax * hi, -rho) / rho;
    }
    if (tail > 0.5 * opt.quad_tol)
        throw NumericError("eval_Rf: tail bound not met, remaining bound " + std::to_string(tail));
    return value;
}

Vec grad_Rf(const LocalisationFunction& f, const Vec& x, const RfOptions& opt)
{
    if (x.size() != f.dim())
        throw std::domain_error("grad_Rf: dimension mismatch");
    if (x.norm() == 0.0)
        throw std::domain_error("grad_Rf: x must be nonzero");
    if (f.kind() != LocalisationFunction::Kind::ProductSmooth)
        return -x / x.squaredNorm(); // radial closed form, ball included
    return grad_Rf_quadrature(f, x, opt);
}

Vec grad_Rf_quadrature(const LocalisationFunction& f, const Vec& x, const RfOptions& opt)
{
    if (!f.smooth())
        throw UnsupportedFunctionError("grad_Rf_quadrature: gradient field required");
    const double ax = x.norm();
    if (ax == 0.0)
        throw std::domain_error("grad_Rf_quadrature: x must be nonzero");

    double scale = ax;
    if (f.kind() == LocalisationFunction::Kind::ProductSmooth)
        scale = x.lpNorm<Eigen::Infinity>();
    const double mu_plateau = f.plateau_radius() / scale;

    auto g = [&](double mu) -> Vec { return f.gradient(mu * x); };

    const double rho = f.rho();
    const double cg = f.gradient_decay_constant();
    const int d = f.dim();

    double hi = 2.0 * mu_plateau;
    Vec value = integrate(g, mu_plateau, hi, {opt.quad_tol / 3.0});
    double tail = std::sqrt(double(d)) * cg * std::pow(ax, -(1.0 + rho)) * std::pow(hi, -rho) / rho;
    int guard = 0;
    while (tail > 0.5 * opt.quad_tol && ++guard < 60) {
        const double next = 2.0 * hi;
        value += integrate(g, hi, next, {opt.quad_tol / 6.0});
        hi = next;
        tail = std::sqrt(double(d)) * cg * std::pow(ax, -(1.0 + rho)) * std::pow(hi, -rho) / rho;
    }
    if (tail > 0.5 * opt.quad_tol)
        throw NumericError("grad_Rf_quadrature: tail bound not met");
    return value;
}

HomogeneityReport check_homogeneity(const LocalisationFunction& f, const std::vector<Vec>& xs,
                                    const RfOptions& opt)
{
    HomogeneityReport rep;
    for (const Vec& x : xs) {
        HomogeneitySample s;
        s.x = x;
        const Vec g = grad_Rf(f, x, opt);
        s.euler_residual = std::abs(x.dot(g) + 1.0);
        s.scale_residual = 0.0;
        for (double t : {0.5, 2.0}) {
            const Vec gt = grad_Rf(f, (t * x).eval(), opt);
            s.scale_residual = std::max(s.scale_residual, (t * gt - g).lpNorm<Eigen::Infinity>());
        }
        rep.max_euler_residual = std::max(rep.max_euler_residual, s.euler_residual);
        rep.max_scale_residual = std::max(rep.max_scale_residual, s.scale_residual);
        rep.samples.push_back(std::move(s));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Pair limits

namespace {

// Clipped length of {t >= 0 : q(t) <= 0} for q(t) = A t^2 + 2 s B t + C,
// A > 0 (the inside interval of one branch of the sharp ball).
double inside_length(double A, double B, double C, double sgn)
{
    const double disc = sgn * sgn * B * B - A * C; // sgn = +-1
    if (disc <= 0.0)
        return 0.0;
    const double root = std::sqrt(disc);
    const double t1 = (-sgn * B - root) / A;
    const double t2 = (-sgn * B + root) / A;
    return std::max(0.0, t2) - std::max(0.0, t1);
}

struct TailBound {
    // Bound on the remaining integral of |f((x-ty)/r) - f((x+ty)/r)| past T:
    //   (2 |x| C' / (|y| rho)) * ((T|y| - |x|) / r)^-rho.
    double ax, ay, r, rho, cg;
    double operator()(double T) const
    {
        const double u = (T * ay - ax) / r;
        if (u <= 1.0)
            return std::numeric_limits<double>::infinity();
        return 2.0 * ax * cg / (ay * rho) * std::pow(u, -rho);
    }
};

} // namespace

double pair_integral(const LocalisationFunction& f, const Vec& x, const Vec& y, double r,
                     const PairLimitOptions& opt)
{
    if (y.norm() == 0.0)
        throw std::domain_error("pair_integral: y must be nonzero");
    if (r <= 0.0)
        throw std::domain_error("pair_integral: radius must be positive");
    if (x.size() != f.dim() || y.size() != f.dim())
        throw std::domain_error("pair_integral: dimension mismatch");

    const double A = y.squaredNorm();
    const double B = x.dot(y);

    if (f.kind() == LocalisationFunction::Kind::CharacteristicBall) {
        const double C = x.squaredNorm() - r * r;
        const double t_minus = inside_length(A, B, C, -1.0); // |x - t y| <= r
        const double t_plus = inside_length(A, B, C, +1.0);  // |x + t y| <= r
        return 0.5 * (t_minus - t_plus);
    }

    auto integrand = [&](double t) {
        return 0.5 * (f((x - t * y) / r) - f((x + t * y) / r));
    };

    // Breakpoints: plateau and unit-scale exits of both branches.
    std::vector<double> pts{0.0};
    for (double level : {f.plateau_radius() * r, r}) {
        const double C = x.squaredNorm() - level * level;
        for (double sgn : {-1.0, 1.0}) {
            const double disc = B * B - A * C;
            if (disc <= 0.0)
                continue;
            const double root = std::sqrt(disc);
            for (double t : {(-sgn * B - root) / A, (-sgn * B + root) / A})
                if (t > 0.0)
                    pts.push_back(t);
        }
    }
    const double ax = x.norm();
    const double ay = std::sqrt(A);
    double t_core = (r + ax) / ay;
    pts.push_back(t_core);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    double value = integrate_segments(integrand, pts, {opt.quad_tol / 2.0});

    const TailBound bound{ax, ay, r, f.rho(), f.gradient_decay_constant()};
    double T = pts.back();
    int guard = 0;
    while (ax > 0.0 && bound(T) > opt.tail_tol && ++guard < 48) {
        const double next = 2.0 * T;
        value += integrate(integrand, T, next, {opt.quad_tol / 4.0});
        T = next;
    }
    if (ax > 0.0 && bound(T) > opt.tail_tol)
        throw NumericError("pair_integral: tail bound not met at T = " + std::to_string(T));
    return value;
}

double pair_sum(const LocalisationFunction& f, const Vec& x, const Vec& y, double r,
                const PairLimitOptions& opt)
{
    if (!f.has_hessian())
        throw UnsupportedFunctionError(
            "pair_sum: the discrete formula needs two derivatives with decay");
    if (y.norm() == 0.0)
        throw std::domain_error("pair_sum: y must be nonzero");
    if (r <= 0.0)
        throw std::domain_error("pair_sum: radius must be positive");

    const double ax = x.norm();
    const double ay = y.norm();
    const TailBound bound{ax, ay, r, f.rho(), f.gradient_decay_constant()};

    double T = (r + ax) / ay + 1.0;
    int guard = 0;
    while (ax > 0.0 && bound(T) > opt.tail_tol && ++guard < 48)
        T *= 2.0;
    if (ax > 0.0 && bound(T) > opt.tail_tol)
        throw NumericError("pair_sum: tail bound not met at N = " + std::to_string(T));

    const auto n_terms = static_cast<long long>(std::ceil(T));
    double sum = 0.0, comp = 0.0; // Kahan accumulation over long ranges
    for (long long n = 1; n <= n_terms; ++n) {
        const double term = 0.5 * (f((x - double(n) * y) / r) - f((x + double(n) * y) / r));
        const double yk = term - comp;
        const double tk = sum + yk;
        comp = (tk - sum) - yk;
        sum = tk;
    }
    return sum;
}

namespace {

LimitEstimate run_schedule(const std::vector<double>& radii,
                           const std::function<double(double)>& eval)
{
    if (radii.size() < 3)
        throw std::domain_error("pair limit: need at least three radii");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1])
            throw std::domain_error("pair limit: radii must increase");
    LimitEstimate est;
    est.radii = radii;
    for (double r : radii)
        est.values.push_back(eval(r));
    const LimitFit fit = fit_geometric_limit(est.radii, est.values);
    est.limit = fit.limit;
    est.rate = fit.rate;
    est.from_fit = fit.from_fit;
    return est;
}

} // namespace

LimitEstimate pair_limit_continuous(const LocalisationFunction& f, const Vec& x, const Vec& y,
                                    const std::vector<double>& radii, const PairLimitOptions& opt)
{
    return run_schedule(radii, [&](double r) { return pair_integral(f, x, y, r, opt); });
}

LimitEstimate pair_limit_discrete(const LocalisationFunction& f, const Vec& x, const Vec& y,
                                  const std::vector<double>& radii, const PairLimitOptions& opt)
{
    return run_schedule(radii, [&](double r) { return pair_sum(f, x, y, r, opt); });
}

} // namespace sojourn
