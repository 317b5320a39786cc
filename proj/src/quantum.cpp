#include "sojourn/quantum.hpp"

#include <cmath>

namespace sojourn {

namespace {

constexpr std::complex<double> I_UNIT{0.0, 1.0};

void require_unit(const CVec& psi)
{
    if (std::abs(psi.squaredNorm() - 1.0) > 1e-9)
        throw std::domain_error("quantum state must have unit norm");
}

} // namespace

std::shared_ptr<const QuantumSystem> build_shift_system(int dim, int margin)
{
    if (dim < 16)
        throw ConfigError("build_shift_system: need dim >= 16");
    if (margin < 1 || margin >= dim / 4)
        throw ConfigError("build_shift_system: need 1 <= margin < dim/4");

    auto sys = std::make_shared<QuantumSystem>();
    sys->dim = dim;
    sys->margin = margin;

    sys->U = Mat::Zero(dim, dim);
    for (int k = 0; k + 1 < dim; ++k)
        sys->U(k + 1, k) = 1.0;
    sys->Delta = 0.5 * (sys->U + sys->U.transpose());
    sys->W = sys->U - sys->U.transpose();
    sys->number = Vec::LinSpaced(dim, 0.0, double(dim - 1));

    const Mat N = sys->number.asDiagonal();
    sys->pos_form = 0.5 * (sys->W * N + N * sys->W);

    sys->S = -0.5 * I_UNIT * sys->W.cast<std::complex<double>>();
    const CMat Nc = N.cast<std::complex<double>>();
    sys->A = 0.5 * (sys->S * Nc + Nc * sys->S);

    if ((sys->S - sys->S.adjoint()).norm() > 1e-13 || (sys->A - sys->A.adjoint()).norm() > 1e-13)
        throw NumericError("build_shift_system: self-adjointness check failed");

    Eigen::SelfAdjointEigenSolver<Mat> eig(sys->Delta);
    if (eig.info() != Eigen::Success)
        throw NumericError("build_shift_system: eigensolver failed");
    sys->eigenvalues = eig.eigenvalues();
    sys->eigenvectors = eig.eigenvectors();
    if (sys->eigenvalues.minCoeff() < -1.0 - 1e-12 || sys->eigenvalues.maxCoeff() > 1.0 + 1e-12)
        throw NumericError("build_shift_system: spectrum left [-1, 1]");

    // interior rows of U N U^* = N - 1
    const Mat lhs = sys->U * N * sys->U.transpose() - N + Mat::Identity(dim, dim);
    for (int k = margin; k <= dim - 1 - margin; ++k)
        if (lhs.col(k).norm() > 1e-13)
            throw NumericError("build_shift_system: number-operator identity failed at row " +
                               std::to_string(k));
    return sys;
}

double expectation(const CMat& op, const CVec& psi)
{
    require_unit(psi);
    const std::complex<double> v = psi.dot(op * psi);
    if (std::abs(v.imag()) > 1e-10)
        throw NumericError("expectation: operator not self-adjoint on this state");
    return v.real();
}

double expectation(const Mat& op, const CVec& psi)
{
    require_unit(psi);
    return (psi.real().dot(op * psi.real()) + psi.imag().dot(op * psi.imag()));
}

CVec evolve(const QuantumSystem& sys, const CVec& psi, double t)
{
    require_unit(psi);
    const CVec hat = sys.eigenvectors.transpose().cast<std::complex<double>>() * psi;
    CVec rotated(sys.dim);
    for (int k = 0; k < sys.dim; ++k)
        rotated[k] = std::exp(I_UNIT * (sys.eigenvalues[k] * t)) * hat[k];
    return sys.eigenvectors.cast<std::complex<double>>() * rotated;
}

CVec gaussian_packet(int dim, double center, double width, double momentum)
{
    CVec psi(dim);
    for (int k = 0; k < dim; ++k) {
        const double x = (k - center) / (2.0 * width);
        psi[k] = std::exp(-x * x) * std::exp(I_UNIT * (momentum * k));
    }
    return psi / psi.norm();
}

double velocity_expectation(const QuantumSystem& sys, const CVec& psi)
{
    return (sys.Delta * psi.real()).squaredNorm() + (sys.Delta * psi.imag()).squaredNorm() -
           psi.squaredNorm();
}

Vec real_chart(const CVec& psi)
{
    Vec m(2 * psi.size());
    m.head(psi.size()) = psi.real();
    m.tail(psi.size()) = psi.imag();
    return m;
}

CVec from_real_chart(const Vec& m)
{
    const auto n = m.size() / 2;
    return m.head(n) + I_UNIT * m.tail(n);
}

HamiltonianSystem expectation_system(std::shared_ptr<const QuantumSystem> sys)
{
    const int D = sys->dim;
    HamiltonianSystem cls;
    cls.name = "shift_expectation";
    cls.description = "expectation values of the truncated shift system on the real chart";
    cls.n = D;
    cls.d = 1;
    cls.params["dim"] = D;
    cls.params["margin"] = sys->margin;

    cls.hamiltonian = [sys, D](const Vec& m) {
        return m.head(D).dot(sys->Delta * m.head(D)) + m.tail(D).dot(sys->Delta * m.tail(D));
    };
    cls.position = [sys, D](const Vec& m) -> Vec {
        Vec out(1);
        out[0] = m.head(D).dot(sys->pos_form * m.tail(D));
        return out;
    };
    cls.position_jacobian = [sys, D](const Vec& m) {
        Mat j(1, 2 * D);
        j.leftCols(D) = (sys->pos_form * m.tail(D)).transpose();
        j.rightCols(D) = -(sys->pos_form * m.head(D)).transpose();
        return j;
    };
    cls.grad_hamiltonian = [sys, D](const Vec& m) {
        Vec g(2 * D);
        g.head(D) = 2.0 * (sys->Delta * m.head(D));
        g.tail(D) = 2.0 * (sys->Delta * m.tail(D));
        return g;
    };
    cls.velocity_closed_form = [sys, D](const Vec& m) -> Vec {
        Vec out(1);
        out[0] = (sys->Delta * m.head(D)).squaredNorm() +
                 (sys->Delta * m.tail(D)).squaredNorm() - m.squaredNorm();
        return out;
    };
    cls.poisson_tensor = [D](const Vec&) {
        Mat j = Mat::Zero(2 * D, 2 * D);
        j.topRightCorner(D, D) = -0.5 * Mat::Identity(D, D);
        j.bottomLeftCorner(D, D) = 0.5 * Mat::Identity(D, D);
        return j;
    };
    cls.domain = [](const Vec& m) { return std::abs(m.squaredNorm() - 1.0) < 1e-9; };
    cls.domain_description = "|psi| = 1";
    cls.flow = ExactFlow{[sys, D](double t, const Vec& m) {
        const Vec hu = sys->eigenvectors.transpose() * m.head(D);
        const Vec hv = sys->eigenvectors.transpose() * m.tail(D);
        Vec ru(D), rv(D);
        for (int k = 0; k < D; ++k) {
            const double c = std::cos(sys->eigenvalues[k] * t);
            const double s = std::sin(sys->eigenvalues[k] * t);
            ru[k] = c * hu[k] - s * hv[k];
            rv[k] = s * hu[k] + c * hv[k];
        }
        Vec out(2 * D);
        out.head(D) = sys->eigenvectors * ru;
        out.tail(D) = sys->eigenvectors * rv;
        return out;
    }};
    cls.critical_eps = 1e-3; // spectral mass near +-1 makes <Delta^2 - 1> small
    return cls;
}

SlopeReport check_expectation_slope(const QuantumSystem& sys, const CVec& psi, double t_max,
                                    int samples)
{
    if (samples < 3)
        throw std::domain_error("check_expectation_slope: need at least three samples");
    SlopeReport rep;
    rep.expected = velocity_expectation(sys, psi);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < samples; ++i) {
        const double t = -t_max + 2.0 * t_max * i / (samples - 1);
        const double a = expectation(sys.A, evolve(sys, psi, t));
        sx += t;
        sy += a;
        sxx += t * t;
        sxy += t * a;
    }
    rep.slope = (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
    rep.relative_error = std::abs(rep.slope - rep.expected) /
                         std::max(std::abs(rep.expected), 1e-12);
    return rep;
}

QuantumSojournResult quantum_sojourn(std::shared_ptr<const QuantumSystem> sys,
                                     const LocalisationFunction& f, const CVec& psi,
                                     const std::vector<double>& radii, const SojournOptions& opt,
                                     double leak_budget)
{
    if (f.dim() != 1)
        throw std::domain_error("quantum_sojourn: the position observable has one component");
    require_unit(psi);

    const int D = sys->dim;
    const int b = sys->margin;
    auto cls = expectation_system(sys);
    const Vec m0 = real_chart(psi);

    const double vel = velocity_expectation(*sys, psi);
    if (std::abs(vel) < cls.critical_eps)
        throw std::domain_error("quantum_sojourn: state is critical "
                                "(spectral mass concentrated near +-1)");
    const double phi0 = std::abs(m0.head(D).dot(sys->pos_form * m0.tail(D)));
    const double speed = std::abs(vel);

    QuantumSojournResult result;
    result.leak_budget = leak_budget;

    // certify the usable window: mass reaching the top rows is truncation
    // error; scan both time directions until it exceeds the budget
    auto top_mass = [&](double t) {
        const CVec evolved = evolve(*sys, psi, t);
        return evolved.tail(b).squaredNorm();
    };
    const double scan_step = 2.0;
    const double scan_cap = 6.0 * D;
    double window = 0.0;
    for (double t = scan_step; t <= scan_cap; t += scan_step) {
        if (top_mass(t) > leak_budget || top_mass(-t) > leak_budget)
            break;
        window = t;
    }
    result.certified_window = window;

    auto needed_time = [&](double r) {
        if (f.kind() == LocalisationFunction::Kind::CharacteristicBall)
            return 1.05 * (r + phi0) / speed + 2.0;
        const double cg = f.gradient_decay_constant();
        const double rho = f.rho();
        // invert the tail bound used by the engine
        const double tail = std::min(opt.tail_tol, 0.1 * opt.acceptance_tol);
        const double u = std::pow(2.0 * phi0 * cg / (speed * rho * tail), 1.0 / rho);
        return (std::max(u, 2.0) * r + phi0) / speed;
    };
    result.max_usable_radius =
        std::max(0.0, (window - 2.0) * speed / 1.05 - phi0); // sharp-ball inverse

    std::vector<double> kept;
    for (double r : radii) {
        if (needed_time(r) <= window)
            kept.push_back(r);
        else
            result.rejected_radii.push_back(r);
    }
    if (kept.size() < 4)
        throw NumericError("quantum_sojourn: certified window too small for the requested "
                           "radii; largest usable radius is about " +
                           std::to_string(result.max_usable_radius));
    result.certified_radii = kept;
    result.series = converge(cls, f, m0, kept, opt);
    return result;
}

} // namespace sojourn
