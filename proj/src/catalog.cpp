#include "sojourn/catalog.hpp"

#include "sojourn/integrators.hpp"
#include "sojourn/quadrature.hpp"

#include <cmath>

namespace sojourn {

namespace {

double param(const SystemSpec& spec, const std::string& key, double fallback)
{
    auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : it->second;
}

int param_int(const SystemSpec& spec, const std::string& key, int fallback)
{
    const double v = param(spec, key, double(fallback));
    const int i = int(std::lround(v));
    if (std::abs(v - double(i)) > 1e-12)
        throw ConfigError(spec.name + ": parameter " + key + " must be an integer");
    return i;
}

Vec vector_param(const SystemSpec& spec, const std::string& prefix, int n)
{
    Vec v(n);
    for (int j = 0; j < n; ++j)
        v[j] = param(spec, prefix + std::to_string(j + 1), std::pow(2.0, -j));
    return v;
}

Vec concat(const Vec& a, const Vec& b)
{
    Vec out(a.size() + b.size());
    out << a, b;
    return out;
}

// Int_0^t g(s) ds with signed t.
template <class G>
auto signed_integral(G&& g, double t, const std::vector<double>& inner_knots,
                     double tol) -> decltype(g(0.0))
{
    const double a = std::abs(t);
    std::vector<double> pts{0.0};
    for (double s : inner_knots)
        if (s > 0.0 && s < a)
            pts.push_back(s);
    pts.push_back(a);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (t >= 0.0)
        return integrate_segments([&](double s) { return g(s); }, pts, {tol});
    auto val = integrate_segments([&](double s) { return g(-s); }, pts, {tol});
    return decltype(val)(-val);
}

std::mt19937_64 checker_rng()
{
    return std::mt19937_64(0x51c077ull);
}

// ---------------------------------------------------------------------------

HamiltonianSystem build_friedrichs(const SystemSpec& spec)
{
    const int n = param_int(spec, "n", 2);
    const double amp = param(spec, "amp", 1.0);
    const Vec v = vector_param(spec, "v", n);
    if (v.norm() == 0.0)
        throw ConfigError("friedrichs: drift vector v must be nonzero");

    auto grad_V = [amp](const Vec& q) -> Vec { return -amp * std::exp(-0.5 * q.squaredNorm()) * q; };
    auto V = [amp](const Vec& q) { return amp * std::exp(-0.5 * q.squaredNorm()); };

    HamiltonianSystem sys;
    sys.name = "friedrichs";
    sys.description = "drift Hamiltonian v.p + V(q) with a localized potential, Phi = q";
    sys.n = n;
    sys.d = n;
    sys.params["n"] = n;
    sys.params["amp"] = amp;
    for (int j = 0; j < n; ++j)
        sys.params["v" + std::to_string(j + 1)] = v[j];

    sys.hamiltonian = [n, v, V](const Vec& m) { return v.dot(m.tail(n)) + V(m.head(n)); };
    sys.position = [n](const Vec& m) -> Vec { return m.head(n); };
    sys.grad_hamiltonian = [n, v, grad_V](const Vec& m) {
        Vec g(2 * n);
        g.head(n) = grad_V(m.head(n));
        g.tail(n) = v;
        return g;
    };
    sys.position_jacobian = [n](const Vec&) {
        Mat j = Mat::Zero(n, 2 * n);
        j.leftCols(n) = Mat::Identity(n, n);
        return j;
    };
    sys.velocity_closed_form = [v](const Vec&) { return v; };
    sys.flow = ExactFlow{[n, v, grad_V](double t, const Vec& m) {
        const Vec q = m.head(n);
        // the potential kick lives where |q + v s| is small; seed the
        // quadrature around the closest approach
        const double s_star = -q.dot(v) / v.squaredNorm();
        const double width = (9.0 + q.norm()) / v.norm();
        const Vec kick = signed_integral([&](double s) -> Vec { return grad_V(q + s * v); }, t,
                                         {s_star - width, s_star, s_star + width}, 1e-13);
        Vec out(2 * n);
        out.head(n) = q + t * v;
        out.tail(n) = m.tail(n) - kick;
        return out;
    }};
    sys.sample_point = [n](std::mt19937_64& gen) {
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        Vec m(2 * n);
        for (int i = 0; i < 2 * n; ++i)
            m[i] = u(gen);
        return m;
    };
    return sys;
}

HamiltonianSystem build_stark(const SystemSpec& spec)
{
    const int n = param_int(spec, "n", 2);
    const double eps = param(spec, "quartic", 0.1);
    const Vec v = vector_param(spec, "v", n);
    if (v.norm() == 0.0)
        throw ConfigError("stark: field vector v must be nonzero");

    auto grad_h = [eps](const Vec& p) -> Vec { return p + eps * p.array().cube().matrix(); };
    auto h = [eps](const Vec& p) {
        return 0.5 * p.squaredNorm() + 0.25 * eps * p.array().pow(4).sum();
    };

    HamiltonianSystem sys;
    sys.name = "stark";
    sys.description = "kinetic Hamiltonian h(p) tilted by a constant field v.q, Phi = p";
    sys.n = n;
    sys.d = n;
    sys.params["n"] = n;
    sys.params["quartic"] = eps;
    for (int j = 0; j < n; ++j)
        sys.params["v" + std::to_string(j + 1)] = v[j];

    sys.hamiltonian = [n, v, h](const Vec& m) { return h(m.tail(n)) + v.dot(m.head(n)); };
    sys.position = [n](const Vec& m) -> Vec { return m.tail(n); };
    sys.grad_hamiltonian = [n, v, grad_h](const Vec& m) {
        Vec g(2 * n);
        g.head(n) = v;
        g.tail(n) = grad_h(m.tail(n));
        return g;
    };
    sys.position_jacobian = [n](const Vec&) {
        Mat j = Mat::Zero(n, 2 * n);
        j.rightCols(n) = Mat::Identity(n, n);
        return j;
    };
    sys.velocity_closed_form = [v](const Vec&) -> Vec { return -v; };
    sys.flow = ExactFlow{[n, v, eps](double t, const Vec& m) {
        const Vec p = m.tail(n);
        Vec shift(n); // Int_0^t grad h(p - v s) ds, closed component-wise
        for (int j = 0; j < n; ++j) {
            const double pj = p[j], vj = v[j];
            double lin, cub;
            if (vj == 0.0) {
                lin = pj * t;
                cub = pj * pj * pj * t;
            } else {
                lin = pj * t - 0.5 * vj * t * t;
                cub = (std::pow(pj, 4) - std::pow(pj - vj * t, 4)) / (4.0 * vj);
            }
            shift[j] = lin + eps * cub;
        }
        Vec out(2 * n);
        out.head(n) = m.head(n) + shift;
        out.tail(n) = p - t * v;
        return out;
    }};
    sys.sample_point = [n](std::mt19937_64& gen) {
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        Vec m(2 * n);
        for (int i = 0; i < 2 * n; ++i)
            m[i] = u(gen);
        return m;
    };
    return sys;
}

HamiltonianSystem build_dilation(const SystemSpec& spec)
{
    const int n = param_int(spec, "n", 2);
    const double K = param(spec, "K", 0.0);
    if (K < 0.0)
        throw ConfigError("dilation_homogeneous: K must be >= 0");

    HamiltonianSystem sys;
    sys.name = "dilation_homogeneous";
    sys.n = n;
    sys.d = 1;
    sys.params["n"] = n;
    sys.params["K"] = K;
    sys.position = [n](const Vec& m) -> Vec {
        Vec out(1);
        out[0] = 0.5 * m.head(n).dot(m.tail(n));
        return out;
    };
    sys.position_jacobian = [n](const Vec& m) {
        Mat j(1, 2 * n);
        j.leftCols(n) = 0.5 * m.tail(n).transpose();
        j.rightCols(n) = 0.5 * m.head(n).transpose();
        return j;
    };

    if (K == 0.0) {
        sys.description = "degree-2 kinetic Hamiltonian with the half dilation generator as Phi";
        sys.hamiltonian = [n](const Vec& m) { return 0.5 * m.tail(n).squaredNorm(); };
        sys.grad_hamiltonian = [n](const Vec& m) {
            Vec g = Vec::Zero(2 * n);
            g.tail(n) = m.tail(n);
            return g;
        };
        sys.velocity_closed_form = [n](const Vec& m) -> Vec {
            Vec out(1);
            out[0] = 0.5 * m.tail(n).squaredNorm();
            return out;
        };
        sys.flow = ExactFlow{[n](double t, const Vec& m) {
            Vec out = m;
            out.head(n) += t * m.tail(n);
            return out;
        }};
        sys.sample_point = [n](std::mt19937_64& gen) {
            std::uniform_real_distribution<double> u(-2.0, 2.0);
            Vec m(2 * n);
            do {
                for (int i = 0; i < 2 * n; ++i)
                    m[i] = u(gen);
            } while (m.tail(n).norm() < 0.5);
            return m;
        };
        return sys;
    }

    sys.description =
        "homogeneous Hamiltonian |p|^2/2 + K |q|^-2 / 2 with the half dilation generator as Phi";
    sys.hamiltonian = [n, K](const Vec& m) {
        return 0.5 * (m.tail(n).squaredNorm() + K / m.head(n).squaredNorm());
    };
    sys.grad_hamiltonian = [n, K](const Vec& m) {
        Vec g(2 * n);
        const Vec q = m.head(n);
        g.head(n) = -K * q / std::pow(q.squaredNorm(), 2);
        g.tail(n) = m.tail(n);
        return g;
    };
    sys.velocity_closed_form = [n, K](const Vec& m) -> Vec {
        Vec out(1);
        out[0] = 0.5 * (m.tail(n).squaredNorm() + K / m.head(n).squaredNorm());
        return out;
    };
    sys.domain = [n](const Vec& m) { return m.head(n).norm() > 0.0; };
    sys.domain_description = "|q| > 0";
    SplittingFlow flow;
    flow.velocity = [](const Vec& p) { return p; };
    flow.force = [K](const Vec& q) -> Vec { return K * q / std::pow(q.squaredNorm(), 2); };
    flow.order = 6;
    flow.step = 0.02;
    sys.flow = flow;
    sys.sample_point = [n](std::mt19937_64& gen) {
        std::normal_distribution<double> g(0.0, 1.0);
        std::uniform_real_distribution<double> rad(0.7, 1.6);
        std::uniform_real_distribution<double> u(-1.5, 1.5);
        Vec m(2 * n);
        Vec dir(n);
        for (int i = 0; i < n; ++i)
            dir[i] = g(gen);
        m.head(n) = rad(gen) / dir.norm() * dir;
        for (int i = 0; i < n; ++i)
            m[n + i] = u(gen);
        return m;
    };
    return sys;
}

HamiltonianSystem build_ratio(const SystemSpec& spec)
{
    (void)spec;
    HamiltonianSystem sys;
    sys.name = "ratio_homogeneous";
    sys.description = "H = q2/q1 + q1/q2 on the open quadrant, Phi = p1 q2 + p2 q1";
    sys.n = 2;
    sys.d = 1;

    auto dH_dq = [](const Vec& q) -> Vec {
        Vec g(2);
        g[0] = -q[1] / (q[0] * q[0]) + 1.0 / q[1];
        g[1] = 1.0 / q[0] - q[0] / (q[1] * q[1]);
        return g;
    };

    sys.hamiltonian = [](const Vec& m) { return m[1] / m[0] + m[0] / m[1]; };
    sys.position = [](const Vec& m) -> Vec {
        Vec out(1);
        out[0] = m[2] * m[1] + m[3] * m[0];
        return out;
    };
    sys.grad_hamiltonian = [dH_dq](const Vec& m) {
        Vec g = Vec::Zero(4);
        g.head(2) = dH_dq(m.head(2));
        return g;
    };
    sys.position_jacobian = [](const Vec& m) {
        Mat j(1, 4);
        j << m[3], m[2], m[1], m[0];
        return j;
    };
    sys.velocity_closed_form = [](const Vec& m) -> Vec {
        const double h = m[1] / m[0] + m[0] / m[1];
        Vec out(1);
        out[0] = h * h - 4.0;
        return out;
    };
    sys.domain = [](const Vec& m) { return m[0] > 0.0 && m[1] > 0.0; };
    sys.domain_description = "q1 > 0 and q2 > 0";
    sys.flow = ExactFlow{[dH_dq](double t, const Vec& m) {
        Vec out = m;
        out.tail(2) -= t * dH_dq(m.head(2));
        return out;
    }};
    sys.sample_point = [](std::mt19937_64& gen) {
        std::uniform_real_distribution<double> uq(0.4, 2.5);
        std::uniform_real_distribution<double> up(-2.0, 2.0);
        Vec m(4);
        do {
            m[0] = uq(gen);
            m[1] = uq(gen);
        } while (std::abs(std::log(m[1] / m[0])) < 0.35); // stay off the critical ray q1 = q2
        m[2] = up(gen);
        m[3] = up(gen);
        return m;
    };
    return sys;
}

HamiltonianSystem build_kinetic(const SystemSpec& spec)
{
    const int n = param_int(spec, "n", 2);
    const double eps = param(spec, "quartic", 0.0);

    auto grad_h = [eps](const Vec& p) -> Vec {
        return eps == 0.0 ? p : Vec(p + eps * p.array().cube().matrix());
    };

    HamiltonianSystem sys;
    sys.name = "kinetic";
    sys.description = "purely kinetic Hamiltonian h(p) with the position observable Phi = q";
    sys.n = n;
    sys.d = n;
    sys.params["n"] = n;
    sys.params["quartic"] = eps;

    sys.hamiltonian = [n, eps](const Vec& m) {
        return 0.5 * m.tail(n).squaredNorm() + 0.25 * eps * m.tail(n).array().pow(4).sum();
    };
    sys.position = [n](const Vec& m) -> Vec { return m.head(n); };
    sys.grad_hamiltonian = [n, grad_h](const Vec& m) {
        Vec g = Vec::Zero(2 * n);
        g.tail(n) = grad_h(m.tail(n));
        return g;
    };
    sys.position_jacobian = [n](const Vec&) {
        Mat j = Mat::Zero(n, 2 * n);
        j.leftCols(n) = Mat::Identity(n, n);
        return j;
    };
    sys.velocity_closed_form = [n, grad_h](const Vec& m) { return grad_h(m.tail(n)); };
    sys.flow = ExactFlow{[n, grad_h](double t, const Vec& m) {
        Vec out = m;
        out.head(n) += t * grad_h(m.tail(n));
        return out;
    }};
    sys.sample_point = [n, grad_h](std::mt19937_64& gen) {
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        Vec m(2 * n);
        do {
            for (int i = 0; i < 2 * n; ++i)
                m[i] = u(gen);
        } while (grad_h(m.tail(n)).norm() < 0.4);
        return m;
    };
    return sys;
}

// inverted oscillator, kept in characteristic coordinates (u, w) where the
// flow is the diagonal map (u e^{Kt}, w e^{-Kt}); raw (q, p) coordinates
// lose all precision in p - Kq once e^{2Kt} exceeds 1/eps
HamiltonianSystem build_repulsive(const SystemSpec& spec)
{
    const int n = param_int(spec, "n", 1);
    const double K = param(spec, "K", 1.0);
    if (K == 0.0)
        throw ConfigError("repulsive_harmonic: K must be nonzero");

    auto hj = [](double u, double w) { return -0.5 * u * w; };
    auto smoothing = [](double h) {
        if (h == 0.0)
            return 0.0;
        const double e = -1.0 / (h * h);
        return e < -745.0 ? 0.0 : std::exp(e);
    };

    HamiltonianSystem sys;
    sys.name = "repulsive_harmonic";
    sys.description = "inverted oscillator in characteristic coordinates u = Kq+p, w = Kq-p; "
                      "Phi_j is the smoothed hyperbolic angle";
    sys.n = n;
    sys.d = n;
    sys.params["n"] = n;
    sys.params["K"] = K;

    sys.hamiltonian = [n, hj](const Vec& m) {
        double h = 0.0;
        for (int j = 0; j < n; ++j)
            h += hj(m[j], m[n + j]);
        return h;
    };
    sys.position = [n, K, hj, smoothing](const Vec& m) -> Vec {
        Vec phi(n);
        for (int j = 0; j < n; ++j) {
            const double u = m[j], w = m[n + j];
            const double g = smoothing(hj(u, w));
            phi[j] = g == 0.0
                         ? 0.0
                         : g * (std::log(std::abs(u)) - std::log(std::abs(w))) / (2.0 * K);
        }
        return phi;
    };
    sys.velocity_closed_form = [n, hj, smoothing](const Vec& m) -> Vec {
        Vec vel(n);
        for (int j = 0; j < n; ++j)
            vel[j] = smoothing(hj(m[j], m[n + j]));
        return vel;
    };
    sys.grad_hamiltonian = [n](const Vec& m) {
        Vec g(2 * n);
        g.head(n) = -0.5 * m.tail(n);
        g.tail(n) = -0.5 * m.head(n);
        return g;
    };
    sys.poisson_tensor = [n, K](const Vec&) {
        Mat j = Mat::Zero(2 * n, 2 * n);
        j.topRightCorner(n, n) = -2.0 * K * Mat::Identity(n, n);
        j.bottomLeftCorner(n, n) = 2.0 * K * Mat::Identity(n, n);
        return j;
    };
    const double window = 700.0 / std::abs(K);
    sys.flow = ExactFlow{[n, K](double t, const Vec& m) {
                             Vec out(2 * n);
                             out.head(n) = std::exp(K * t) * m.head(n);
                             out.tail(n) = std::exp(-K * t) * m.tail(n);
                             return out;
                         },
                         window};
    sys.sample_point = [n](std::mt19937_64& gen) {
        std::uniform_real_distribution<double> uu(0.8, 2.0);
        std::uniform_real_distribution<double> uh(0.85, 2.5);
        std::bernoulli_distribution flip(0.5);
        Vec m(2 * n);
        for (int j = 0; j < n; ++j) {
            const double u = (flip(gen) ? 1.0 : -1.0) * uu(gen);
            const double h = (flip(gen) ? 1.0 : -1.0) * uh(gen);
            m[j] = u;
            m[n + j] = -2.0 * h / u;
        }
        return m;
    };
    return sys;
}

HamiltonianSystem build_pendulum(const SystemSpec& spec)
{
    const double K = param(spec, "K", 1.0);
    if (K <= 0.0)
        throw ConfigError("pendulum: K must be positive");

    HamiltonianSystem sys;
    sys.name = "pendulum";
    sys.description = "simple pendulum above the separatrix; Phi is the elliptic time function";
    sys.n = 1;
    sys.d = 1;
    sys.params["K"] = K;

    sys.hamiltonian = [K](const Vec& m) {
        return 0.5 * (m[1] * m[1] + K * (1.0 - std::cos(m[0])));
    };
    sys.position = [K](const Vec& m) -> Vec {
        const double h = 0.5 * (m[1] * m[1] + K * (1.0 - std::cos(m[0])));
        Vec out(1);
        out[0] = std::sqrt(2.0 / h) * elliptic_F_real(0.5 * m[0], std::sqrt(K / h));
        return out;
    };
    sys.velocity_closed_form = [](const Vec& m) -> Vec {
        Vec out(1);
        out[0] = m[1] > 0.0 ? 1.0 : -1.0;
        return out;
    };
    sys.grad_hamiltonian = [K](const Vec& m) {
        Vec g(2);
        g[0] = 0.5 * K * std::sin(m[0]);
        g[1] = m[1];
        return g;
    };
    sys.domain = [K](const Vec& m) {
        const double c = std::cos(0.5 * m[0]);
        return 0.5 * m[1] * m[1] - K * c * c > 0.0;
    };
    sys.domain_description = "p^2/2 - K cos^2(q/2) > 0";
    SplittingFlow flow;
    flow.velocity = [](const Vec& p) { return p; };
    flow.force = [K](const Vec& q) -> Vec {
        Vec f(1);
        f[0] = -0.5 * K * std::sin(q[0]);
        return f;
    };
    flow.order = 6;
    flow.step = 0.02;
    sys.flow = flow;
    sys.sample_point = [K](std::mt19937_64& gen) {
        std::uniform_real_distribution<double> uq(-2.5, 2.5);
        std::uniform_real_distribution<double> ue(1.3 * K, 3.5 * K);
        std::bernoulli_distribution flip(0.5);
        Vec m(2);
        m[0] = uq(gen);
        const double s = std::sin(0.5 * m[0]);
        const double p = std::sqrt(2.0 * (ue(gen) - K * s * s));
        m[1] = flip(gen) ? p : -p;
        return m;
    };
    return sys;
}

HamiltonianSystem build_central_force(const SystemSpec& spec)
{
    const int n = param_int(spec, "n", 2);
    const double K = param(spec, "K", 1.0);
    if (K == 0.0)
        throw ConfigError("central_force: K must be nonzero");
    if (K > 0.0 && n < 2)
        throw ConfigError("central_force: attracting case needs n >= 2");

    HamiltonianSystem sys;
    sys.name = "central_force";
    sys.description = "Coulomb-type Hamiltonian on unbounded orbits; Phi is the hyperbolic "
                      "time function";
    sys.n = n;
    sys.d = 1;
    sys.params["n"] = n;
    sys.params["K"] = K;

    sys.hamiltonian = [n, K](const Vec& m) {
        return 0.5 * (m.tail(n).squaredNorm() - K / m.head(n).norm());
    };
    sys.position = [n, K](const Vec& m) -> Vec {
        Vec out(1);
        out[0] = central_force_phi(m, K, 0);
        return out;
    };
    sys.velocity_closed_form = [](const Vec&) -> Vec {
        Vec out(1);
        out[0] = 1.0;
        return out;
    };
    sys.grad_hamiltonian = [n, K](const Vec& m) {
        Vec g(2 * n);
        const Vec q = m.head(n);
        g.head(n) = 0.5 * K * q / std::pow(q.norm(), 3);
        g.tail(n) = m.tail(n);
        return g;
    };
    sys.domain = [n, K](const Vec& m) {
        const Vec q = m.head(n);
        const Vec p = m.tail(n);
        if (q.norm() == 0.0)
            return false;
        const double h = 0.5 * (p.squaredNorm() - K / q.norm());
        if (h <= 0.0)
            return false;
        if (K < 0.0)
            return true;
        const double gram = q.squaredNorm() * p.squaredNorm() - std::pow(q.dot(p), 2);
        return gram > 1e-12;
    };
    sys.domain_description = "|q| > 0, H > 0, and (for K > 0) total angular momentum != 0";
    AdaptiveFlow flow;
    flow.rhs = [n, K](const Vec& m) {
        Vec d(2 * n);
        const Vec q = m.head(n);
        d.head(n) = m.tail(n);
        d.tail(n) = -0.5 * K * q / std::pow(q.norm(), 3);
        return d;
    };
    flow.rel_tol = 1e-13;
    flow.abs_tol = 1e-13;
    sys.flow = flow;
    sys.sample_point = [n, K](std::mt19937_64& gen) {
        std::normal_distribution<double> g(0.0, 1.0);
        std::uniform_real_distribution<double> rad(1.0, 3.0);
        std::uniform_real_distribution<double> uh(0.3, 1.2);
        Vec m(2 * n);
        while (true) {
            Vec q(n), p(n);
            for (int i = 0; i < n; ++i) {
                q[i] = g(gen);
                p[i] = g(gen);
            }
            q *= rad(gen) / q.norm();
            const double h = uh(gen);
            const double p2 = 2.0 * h + K / q.norm();
            if (p2 <= 0.0)
                continue;
            p *= std::sqrt(p2) / p.norm();
            m.head(n) = q;
            m.tail(n) = p;
            const double gram = q.squaredNorm() * p.squaredNorm() - std::pow(q.dot(p), 2);
            if (K < 0.0 || gram > 0.3)
                return m;
        }
    };
    return sys;
}

HamiltonianSystem build_poincare(const SystemSpec& spec)
{
    const int n = param_int(spec, "n", 2);

    HamiltonianSystem sys;
    sys.name = "poincare_ball";
    sys.description = "geodesic flow of the hyperbolic ball; Phi is the smoothed boundary "
                      "time function";
    sys.n = n;
    sys.d = 1;
    sys.params["n"] = n;

    auto ham = [n](const Vec& m) {
        const double f = 1.0 - m.head(n).squaredNorm();
        return 0.125 * m.tail(n).squaredNorm() * f * f;
    };
    sys.hamiltonian = ham;
    // atanh((p.q)(1-|q|^2) / (sqrt(2H)(1+|q|^2))) rewritten through the
    // factorisation 1 -+ arg = |q -+ p/|p||^2 / (1+|q|^2); the direct form
    // loses every digit once the orbit nears the boundary sphere.
    sys.position = [n, ham](const Vec& m) -> Vec {
        const double h = ham(m);
        Vec out(1);
        if (h <= 0.0 || 1.0 / h > 745.0) {
            out[0] = 0.0; // factor underflows; the point is effectively critical
            return out;
        }
        const Vec q = m.head(n);
        const Vec phat = m.tail(n).normalized();
        out[0] = std::exp(-1.0 / h) * (std::log((q + phat).norm()) - std::log((q - phat).norm()));
        return out;
    };
    sys.velocity_closed_form = [ham](const Vec& m) -> Vec {
        const double h = ham(m);
        Vec out(1);
        out[0] = (h <= 0.0 || 1.0 / h > 745.0) ? 0.0 : std::exp(-1.0 / h) * std::sqrt(2.0 * h);
        return out;
    };
    sys.grad_hamiltonian = [n](const Vec& m) {
        const Vec q = m.head(n);
        const Vec p = m.tail(n);
        const double f = 1.0 - q.squaredNorm();
        Vec g(2 * n);
        g.head(n) = -0.5 * p.squaredNorm() * f * q;
        g.tail(n) = 0.25 * f * f * p;
        return g;
    };
    sys.domain = [n](const Vec& m) {
        return m.head(n).norm() < 1.0 && m.tail(n).norm() > 0.0;
    };
    sys.domain_description = "|q| < 1 and p != 0";
    AdaptiveFlow flow;
    flow.rhs = [n](const Vec& m) {
        const Vec q = m.head(n);
        const Vec p = m.tail(n);
        const double f = 1.0 - q.squaredNorm();
        Vec d(2 * n);
        d.head(n) = 0.25 * f * f * p;
        d.tail(n) = 0.5 * p.squaredNorm() * f * q;
        return d;
    };
    flow.rel_tol = 1e-13;
    flow.abs_tol = 1e-13;
    sys.flow = flow;
    sys.sample_point = [n](std::mt19937_64& gen) {
        std::normal_distribution<double> g(0.0, 1.0);
        std::uniform_real_distribution<double> rad(0.1, 0.6);
        std::uniform_real_distribution<double> uh(1.0, 1.6);
        Vec m(2 * n);
        Vec q(n), p(n);
        for (int i = 0; i < n; ++i) {
            q[i] = g(gen);
            p[i] = g(gen);
        }
        q *= rad(gen) / q.norm();
        const double h = uh(gen);
        p *= std::sqrt(8.0 * h) / ((1.0 - q.squaredNorm()) * p.norm());
        m.head(n) = q;
        m.tail(n) = p;
        return m;
    };
    return sys;
}

HamiltonianSystem build_sphere_covering(const SystemSpec& spec)
{
    (void)spec;
    HamiltonianSystem sys;
    sys.name = "sphere_covering";
    sys.description = "height function on the covering of the rotation sphere, chart (theta, z)";
    sys.n = 1;
    sys.d = 1;
    sys.hamiltonian = [](const Vec& m) { return m[1]; };
    sys.position = [](const Vec& m) -> Vec { return m.head(1); };
    sys.grad_hamiltonian = [](const Vec&) {
        Vec g(2);
        g << 0.0, 1.0;
        return g;
    };
    sys.position_jacobian = [](const Vec&) {
        Mat j(1, 2);
        j << 1.0, 0.0;
        return j;
    };
    sys.velocity_closed_form = [](const Vec&) -> Vec {
        Vec out(1);
        out[0] = 1.0;
        return out;
    };
    sys.domain = [](const Vec& m) { return std::abs(m[1]) < 1.0; };
    sys.domain_description = "-1 < z < 1";
    sys.flow = ExactFlow{[](double t, const Vec& m) {
        Vec out = m;
        out[0] += t;
        return out;
    }};
    sys.sample_point = [](std::mt19937_64& gen) {
        std::uniform_real_distribution<double> uth(-3.0, 3.0);
        std::uniform_real_distribution<double> uz(-0.85, 0.85);
        Vec m(2);
        m << uth(gen), uz(gen);
        return m;
    };
    return sys;
}

HamiltonianSystem build_oscillator_covering(const SystemSpec& spec)
{
    const int n = param_int(spec, "n", 2);
    const double K = param(spec, "K", 1.0);
    if (K == 0.0)
        throw ConfigError("oscillator_covering: K must be nonzero");

    HamiltonianSystem sys;
    sys.name = "oscillator_covering";
    sys.description = "harmonic oscillator lifted to the covering chart (r, theta) where the "
                      "angles drift linearly";
    sys.n = n;
    sys.d = n;
    sys.params["n"] = n;
    sys.params["K"] = K;

    sys.hamiltonian = [n](const Vec& m) { return 0.5 * m.head(n).squaredNorm(); };
    sys.position = [n](const Vec& m) -> Vec { return m.tail(n); };
    sys.grad_hamiltonian = [n](const Vec& m) {
        Vec g = Vec::Zero(2 * n);
        g.head(n) = m.head(n);
        return g;
    };
    sys.position_jacobian = [n](const Vec&) {
        Mat j = Mat::Zero(n, 2 * n);
        j.rightCols(n) = Mat::Identity(n, n);
        return j;
    };
    sys.velocity_closed_form = [n, K](const Vec&) -> Vec { return Vec::Constant(n, -K); };
    sys.poisson_tensor = [n, K](const Vec& m) {
        Mat j = Mat::Zero(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            j(i, n + i) = K / m[i];
            j(n + i, i) = -K / m[i];
        }
        return j;
    };
    sys.domain = [n](const Vec& m) { return (m.head(n).array() > 0.0).all(); };
    sys.domain_description = "r_j > 0 for every j";
    sys.flow = ExactFlow{[n, K](double t, const Vec& m) {
        Vec out = m;
        out.tail(n).array() -= K * t;
        return out;
    }};
    sys.sample_point = [n](std::mt19937_64& gen) {
        std::uniform_real_distribution<double> ur(0.5, 2.0);
        std::uniform_real_distribution<double> uth(-3.0, 3.0);
        Vec m(2 * n);
        for (int i = 0; i < n; ++i) {
            m[i] = ur(gen);
            m[n + i] = uth(gen);
        }
        return m;
    };
    return sys;
}

void cross_check_velocity(HamiltonianSystem& sys)
{
    if (!sys.velocity_closed_form || !sys.sample_point)
        return;
    auto gen = checker_rng();
    for (int i = 0; i < 5; ++i) {
        const Vec m = sys.sample_point(gen);
        const Vec closed = sys.velocity_closed_form(m);
        const Vec bracket = nabla_h_bracket(sys, m);
        const double err = (closed - bracket).lpNorm<Eigen::Infinity>();
        const double scale = std::max(1.0, closed.lpNorm<Eigen::Infinity>());
        if (err > 1e-6 * scale)
            throw NumericError(sys.name + ": closed-form velocity disagrees with the bracket "
                                          "at a sampled point (|diff| = " +
                               std::to_string(err) + ")");
    }
}

void tune_splitting(HamiltonianSystem& sys)
{
    auto* split = std::get_if<SplittingFlow>(&sys.flow);
    if (!split || !sys.sample_point)
        return;
    auto gen = checker_rng();
    std::vector<Vec> probes;
    for (int i = 0; i < 3; ++i)
        probes.push_back(sys.sample_point(gen));
    split->step = refine_splitting_step(*split, sys.hamiltonian, probes, 30.0, sys.drift_budget);
}

} // namespace

Vec repulsive_chart_from_qp(const Vec& q, const Vec& p, double K)
{
    Vec m(2 * q.size());
    m.head(q.size()) = K * q + p;
    m.tail(q.size()) = K * q - p;
    return m;
}

void repulsive_qp_from_chart(const Vec& m, double K, Vec& q, Vec& p)
{
    const int n = int(m.size()) / 2;
    q = (m.head(n) + m.tail(n)) / (2.0 * K);
    p = (m.head(n) - m.tail(n)) / 2.0;
}

double central_force_phi(const Vec& m, double K, int branch)
{
    const int n = int(m.size()) / 2;
    const Vec q = m.head(n);
    const Vec p = m.tail(n);
    const double e2 = p.squaredNorm() - K / q.norm(); // 2H
    if (e2 <= 0.0)
        throw std::domain_error("central_force_phi: needs H > 0");
    const double pq = p.dot(q);
    const double lead = pq / e2;
    const double coef = K / (2.0 * std::pow(e2, 1.5));
    const double a = q.norm() * (e2 + p.squaredNorm());
    const double b = 2.0 * std::sqrt(e2) * pq;
    switch (branch) {
    case +1:
        return lead - coef * std::log(a + b);
    case -1:
        return lead + coef * std::log(a - b);
    case 0:
        return lead - coef * std::atanh(b / a);
    default:
        throw std::invalid_argument("central_force_phi: branch must be -1, 0 or +1");
    }
}

HamiltonianSystem build(const SystemSpec& spec)
{
    HamiltonianSystem sys;
    if (spec.name == "friedrichs")
        sys = build_friedrichs(spec);
    else if (spec.name == "stark")
        sys = build_stark(spec);
    else if (spec.name == "dilation_homogeneous")
        sys = build_dilation(spec);
    else if (spec.name == "ratio_homogeneous")
        sys = build_ratio(spec);
    else if (spec.name == "kinetic")
        sys = build_kinetic(spec);
    else if (spec.name == "repulsive_harmonic")
        sys = build_repulsive(spec);
    else if (spec.name == "pendulum")
        sys = build_pendulum(spec);
    else if (spec.name == "central_force")
        sys = build_central_force(spec);
    else if (spec.name == "poincare_ball")
        sys = build_poincare(spec);
    else if (spec.name == "sphere_covering")
        sys = build_sphere_covering(spec);
    else if (spec.name == "oscillator_covering")
        sys = build_oscillator_covering(spec);
    else
        throw ConfigError("unknown system: " + spec.name);

    tune_splitting(sys);
    cross_check_velocity(sys);
    return sys;
}

const std::vector<CatalogEntry>& list()
{
    static const std::vector<CatalogEntry> entries = [] {
        std::vector<CatalogEntry> v;
        v.push_back({"friedrichs",
                     "drift Hamiltonian v.p + V(q), localized potential, Phi = q",
                     {{"n", 2, "n >= 1"}, {"amp", 1, "potential amplitude"},
                      {"v1", 1, "drift components v1..vn, not all zero"}},
                     true});
        v.push_back({"stark",
                     "kinetic Hamiltonian tilted by a constant field v.q, Phi = p",
                     {{"n", 2, "n >= 1"}, {"quartic", 0.1, "quartic momentum weight"},
                      {"v1", 1, "field components v1..vn, not all zero"}},
                     true});
        v.push_back({"dilation_homogeneous",
                     "degree-2 homogeneous Hamiltonian with the half dilation generator as Phi; "
                     "K = 0 is free motion, K > 0 adds the inverse-square barrier",
                     {{"n", 2, "n >= 1"}, {"K", 0, "K >= 0"}},
                     true});
        v.push_back({"ratio_homogeneous",
                     "H = q2/q1 + q1/q2 on the open quadrant, Phi = p1 q2 + p2 q1",
                     {},
                     true});
        v.push_back({"kinetic",
                     "purely kinetic Hamiltonian h(p), Phi = q",
                     {{"n", 2, "n >= 1"}, {"quartic", 0, "quartic momentum weight"}},
                     true});
        v.push_back({"repulsive_harmonic",
                     "inverted oscillator in characteristic coordinates, smoothed hyperbolic "
                     "angle as Phi",
                     {{"n", 1, "n >= 1"}, {"K", 1, "K != 0"}},
                     true});
        v.push_back({"pendulum",
                     "simple pendulum above the separatrix, elliptic time function as Phi",
                     {{"K", 1, "K > 0"}},
                     false});
        v.push_back({"central_force",
                     "Coulomb-type Hamiltonian on unbounded orbits, hyperbolic time function "
                     "as Phi",
                     {{"n", 2, "n >= 2 when K > 0"}, {"K", 1, "K != 0"}},
                     false});
        v.push_back({"poincare_ball",
                     "geodesic flow of the hyperbolic ball, smoothed boundary time as Phi",
                     {{"n", 2, "n >= 1"}},
                     false});
        v.push_back({"sphere_covering",
                     "height function on the covering of the rotation sphere, chart (theta, z)",
                     {},
                     true});
        v.push_back({"oscillator_covering",
                     "harmonic oscillator on the covering chart (r, theta), angles drift "
                     "linearly",
                     {{"n", 2, "n >= 1"}, {"K", 1, "K != 0"}},
                     true});
        return v;
    }();
    return entries;
}

} // namespace sojourn
