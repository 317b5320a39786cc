#include "sojourn/integrators.hpp"

#include <algorithm>
#include <cmath>

namespace sojourn {

namespace {

// Triple-jump composition coefficients for the leapfrog base step.
const double w4_1 = 1.3512071919596578;  // 1 / (2 - 2^(1/3))
const double w4_0 = 1.0 - 2.0 * w4_1;

const double w6_1 = -1.17767998417887;
const double w6_2 = 0.235573213359357;
const double w6_3 = 0.784513610477560;
const double w6_0 = 1.0 - 2.0 * (w6_1 + w6_2 + w6_3);

void leapfrog(const SplittingFlow& f, Vec& q, Vec& p, double h)
{
    p += 0.5 * h * f.force(q);
    q += h * f.velocity(p);
    p += 0.5 * h * f.force(q);
}

} // namespace

void splitting_step(const SplittingFlow& f, Vec& q, Vec& p, double h)
{
    switch (f.order) {
    case 2:
        leapfrog(f, q, p, h);
        return;
    case 4:
        leapfrog(f, q, p, w4_1 * h);
        leapfrog(f, q, p, w4_0 * h);
        leapfrog(f, q, p, w4_1 * h);
        return;
    case 6:
        for (double w : {w6_3, w6_2, w6_1, w6_0, w6_1, w6_2, w6_3})
            leapfrog(f, q, p, w * h);
        return;
    default:
        throw ConfigError("splitting flow: order must be 2, 4 or 6");
    }
}

void advance_splitting(const SplittingFlow& f, Vec& state, double t)
{
    if (t == 0.0)
        return;
    const int n = int(state.size()) / 2;
    Vec q = state.head(n);
    Vec p = state.tail(n);
    const double h = (t > 0 ? f.step : -f.step);
    const auto full = static_cast<long long>(std::floor(std::abs(t) / f.step));
    for (long long i = 0; i < full; ++i)
        splitting_step(f, q, p, h);
    const double rem = t - double(full) * h;
    if (std::abs(rem) > 1e-14 * std::abs(t))
        splitting_step(f, q, p, rem);
    state.head(n) = q;
    state.tail(n) = p;
}

double refine_splitting_step(const SplittingFlow& f,
                             const std::function<double(const Vec&)>& hamiltonian,
                             const std::vector<Vec>& probes, double probe_time, double budget)
{
    SplittingFlow trial = f;
    while (true) {
        double drift = 0.0;
        for (const Vec& m : probes) {
            const double h0 = hamiltonian(m);
            for (double sign : {1.0, -1.0}) {
                const int n = int(m.size()) / 2;
                Vec q = m.head(n);
                Vec p = m.tail(n);
                const auto steps = static_cast<long long>(std::ceil(probe_time / trial.step));
                for (long long i = 0; i < steps; ++i) {
                    splitting_step(trial, q, p, sign * trial.step);
                    Vec state(m.size());
                    state.head(n) = q;
                    state.tail(n) = p;
                    drift = std::max(drift, std::abs(hamiltonian(state) - h0));
                    if (drift > 0.25 * budget)
                        break;
                }
                if (drift > 0.25 * budget)
                    break;
            }
            if (drift > 0.25 * budget)
                break;
        }
        if (drift <= 0.25 * budget)
            return trial.step;
        trial.step *= 0.5;
        if (trial.step < 1e-5)
            throw NumericError("splitting step refinement: drift budget unattainable above the "
                               "step floor");
    }
}

// ---------------------------------------------------------------------------
// Embedded Dormand-Prince 8(5,3)

namespace dp853 {

const double c2 = 0.526001519587677318785587544488e-01;
const double c3 = 0.789002279381515978178381316732e-01;
const double c4 = 0.118350341907227396726757197510e+00;
const double c5 = 0.281649658092772603273242802490e+00;
const double c6 = 0.333333333333333333333333333333e+00;
const double c7 = 0.25e+00;
const double c8 = 0.307692307692307692307692307692e+00;
const double c9 = 0.651282051282051282051282051282e+00;
const double c10 = 0.6e+00;
const double c11 = 0.857142857142857142857142857142e+00;

const double a21 = 5.26001519587677318785587544488e-2;
const double a31 = 1.97250569845378994544595329183e-2;
const double a32 = 5.91751709536136983633785987549e-2;
const double a41 = 2.95875854768068491816892993775e-2;
const double a43 = 8.87627564304205475450678981324e-2;
const double a51 = 2.41365134159266685502369798665e-1;
const double a53 = -8.84549479328286085344864962717e-1;
const double a54 = 9.24834003261792003115737966543e-1;
const double a61 = 3.7037037037037037037037037037e-2;
const double a64 = 1.70828608729473871279604482173e-1;
const double a65 = 1.25467687566822425016691814123e-1;
const double a71 = 3.7109375e-2;
const double a74 = 1.70252211019544039314978060272e-1;
const double a75 = 6.02165389804559606850219397283e-2;
const double a76 = -1.7578125e-2;
const double a81 = 3.70920001185047927108779319836e-2;
const double a84 = 1.70383925712239993810214054705e-1;
const double a85 = 1.07262030446373284651809199168e-1;
const double a86 = -1.53194377486244017527936158236e-2;
const double a87 = 8.27378916381402288758473766002e-3;
const double a91 = 6.24110958716075717114429577812e-1;
const double a94 = -3.36089262944694129406857109825e0;
const double a95 = -8.68219346841726006818189891453e-1;
const double a96 = 2.75920996994467083049415600797e1;
const double a97 = 2.01540675504778934086186788979e1;
const double a98 = -4.34898841810699588477366255144e1;
const double a101 = 4.77662536438264365890433908527e-1;
const double a104 = -2.48811461997166764192642586468e0;
const double a105 = -5.90290826836842996371446475743e-1;
const double a106 = 2.12300514481811942347288949897e1;
const double a107 = 1.52792336328824235832596922938e1;
const double a108 = -3.32882109689848629194453265587e1;
const double a109 = -2.03312017085086261358222928593e-2;
const double a111 = -9.3714243008598732571704021658e-1;
const double a114 = 5.18637242884406370830023853209e0;
const double a115 = 1.09143734899672957818500254654e0;
const double a116 = -8.14978701074692612513997267357e0;
const double a117 = -1.85200656599969598641566180701e1;
const double a118 = 2.27394870993505042818970056734e1;
const double a119 = 2.49360555267965238987089396762e0;
const double a1110 = -3.0467644718982195003823669022e0;
const double a121 = 2.27331014751653820792359768449e0;
const double a124 = -1.05344954667372501984066689879e1;
const double a125 = -2.00087205822486249909675718444e0;
const double a126 = -1.79589318631187989172765950534e1;
const double a127 = 2.79488845294199600508499808837e1;
const double a128 = -2.85899827713502369474065508674e0;
const double a129 = -8.87285693353062954433549289258e0;
const double a1210 = 1.23605671757943030647266201528e1;
const double a1211 = 6.43392746015763530355970484046e-1;

const double b1 = 5.42937341165687622380535766363e-2;
const double b6 = 4.45031289275240888144113950566e0;
const double b7 = 1.89151789931450038304281599044e0;
const double b8 = -5.8012039600105847814672114227e0;
const double b9 = 3.1116436695781989440891606237e-1;
const double b10 = -1.52160949662516078556178806805e-1;
const double b11 = 2.01365400804030348374776537501e-1;
const double b12 = 4.47106157277725905176885569043e-2;

const double bhh1 = 0.244094488188976377952755905512e+00;
const double bhh2 = 0.733846688281611857341361741547e+00;
const double bhh3 = 0.220588235294117647058823529412e-01;

const double er1 = 0.1312004499419488073250102996e-01;
const double er6 = -0.1225156446376204440720569753e+01;
const double er7 = -0.4957589496572501915214079952e+00;
const double er8 = 0.1664377182454986536961530415e+01;
const double er9 = -0.3503288487499736816886487290e+00;
const double er10 = 0.3341791187130174790297318841e+00;
const double er11 = 0.8192320648511571246570742613e-01;
const double er12 = -0.2235530786388629525884427845e-01;

} // namespace dp853

void integrate_adaptive(const AdaptiveFlow& f, Vec& y, double t0, double t1)
{
    using namespace dp853;
    if (t0 == t1)
        return;
    const double dir = (t1 > t0) ? 1.0 : -1.0;
    const auto n = y.size();

    Vec k1 = f.rhs(y);
    // crude initial step from the scaled derivative norm
    double d0 = 0.0, d1 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sc = f.abs_tol + f.rel_tol * std::abs(y[i]);
        d0 += std::pow(y[i] / sc, 2);
        d1 += std::pow(k1[i] / sc, 2);
    }
    double h = (d0 > 1e-10 && d1 > 1e-10) ? 0.01 * std::sqrt(d0 / d1) : 1e-6;
    h = dir * std::min(h, std::abs(t1 - t0));

    double t = t0;
    bool rejected = false;
    long long steps = 0;
    Vec k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, y8, bsum;

    while (dir * (t1 - t) > 0.0) {
        if (++steps > 20'000'000)
            throw NumericError("adaptive integrator: step limit exceeded at t = " +
                               std::to_string(t));
        if (std::abs(h) < 1e-14 * (1.0 + std::abs(t)))
            throw NumericError("adaptive integrator: step underflow at t = " + std::to_string(t));
        if (dir * (t + h - t1) > 0.0)
            h = t1 - t;

        k2 = f.rhs(y + h * (a21 * k1));
        k3 = f.rhs(y + h * (a31 * k1 + a32 * k2));
        k4 = f.rhs(y + h * (a41 * k1 + a43 * k3));
        k5 = f.rhs(y + h * (a51 * k1 + a53 * k3 + a54 * k4));
        k6 = f.rhs(y + h * (a61 * k1 + a64 * k4 + a65 * k5));
        k7 = f.rhs(y + h * (a71 * k1 + a74 * k4 + a75 * k5 + a76 * k6));
        k8 = f.rhs(y + h * (a81 * k1 + a84 * k4 + a85 * k5 + a86 * k6 + a87 * k7));
        k9 = f.rhs(y + h * (a91 * k1 + a94 * k4 + a95 * k5 + a96 * k6 + a97 * k7 + a98 * k8));
        k10 = f.rhs(y + h * (a101 * k1 + a104 * k4 + a105 * k5 + a106 * k6 + a107 * k7 +
                             a108 * k8 + a109 * k9));
        k11 = f.rhs(y + h * (a111 * k1 + a114 * k4 + a115 * k5 + a116 * k6 + a117 * k7 +
                             a118 * k8 + a119 * k9 + a1110 * k10));
        k12 = f.rhs(y + h * (a121 * k1 + a124 * k4 + a125 * k5 + a126 * k6 + a127 * k7 +
                             a128 * k8 + a129 * k9 + a1210 * k10 + a1211 * k11));

        bsum = b1 * k1 + b6 * k6 + b7 * k7 + b8 * k8 + b9 * k9 + b10 * k10 + b11 * k11 +
               b12 * k12;
        y8 = y + h * bsum;

        double err5 = 0.0, err3 = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc = f.abs_tol + f.rel_tol * std::max(std::abs(y[i]), std::abs(y8[i]));
            const double e3 = bsum[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i];
            const double e5 = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] +
                              er9 * k9[i] + er10 * k10[i] + er11 * k11[i] + er12 * k12[i];
            err3 += (e3 / sc) * (e3 / sc);
            err5 += (e5 / sc) * (e5 / sc);
        }
        double deno = err5 + 0.01 * err3;
        if (deno <= 0.0)
            deno = 1.0;
        const double err = std::abs(h) * err5 * std::sqrt(1.0 / (double(n) * deno));

        if (err <= 1.0) {
            t += h;
            y.swap(y8);
            k1 = f.rhs(y);
            double fac = 0.9 * std::pow(std::max(err, 1e-32), -0.125);
            fac = std::clamp(fac, 1.0 / 3.0, rejected ? 1.0 : 6.0);
            h *= fac;
            rejected = false;
        } else {
            h *= std::max(0.9 * std::pow(err, -0.125), 1.0 / 3.0);
            rejected = true;
        }
    }
}

// ---------------------------------------------------------------------------
// FlowCache

FlowCache::FlowCache(const HamiltonianSystem& sys, Vec m0) : sys_(sys), m0_(std::move(m0))
{
    sys_.require_domain(m0_);
    h0_ = sys_.hamiltonian(m0_);
}

const Vec& FlowCache::insert(int side, double at, Vec state)
{
    ++evals_;
    auto it = branch_[side].emplace(at, std::move(state)).first;
    const double drift = std::abs(sys_.hamiltonian(it->second) - h0_);
    if (drift > max_drift_)
        max_drift_ = drift;
    return it->second;
}

const Vec& FlowCache::at(double t)
{
    if (t == 0.0)
        return m0_;
    const int side = t < 0.0 ? 1 : 0;
    const double a = std::abs(t);

    auto& branch = branch_[side];
    auto hit = branch.find(a);
    if (hit != branch.end())
        return hit->second;

    if (const auto* exact = std::get_if<ExactFlow>(&sys_.flow)) {
        if (a > exact->max_time)
            throw NumericError(sys_.name + ": flow evaluation at |t| = " + std::to_string(a) +
                               " exceeds the representable window " +
                               std::to_string(exact->max_time));
        return insert(side, a, exact->map(t, m0_));
    }

    // nearest cached state on the same side, at or below |t|
    double from = 0.0;
    const Vec* base = &m0_;
    auto lb = branch.lower_bound(a);
    if (lb != branch.begin()) {
        --lb;
        from = lb->first;
        base = &lb->second;
    }
    Vec state = *base;
    const double sgn = side ? -1.0 : 1.0;

    if (const auto* split = std::get_if<SplittingFlow>(&sys_.flow)) {
        advance_splitting(*split, state, sgn * (a - from));
        return insert(side, a, std::move(state));
    }
    const auto& adaptive = std::get<AdaptiveFlow>(sys_.flow);
    integrate_adaptive(adaptive, state, sgn * from, sgn * a);
    return insert(side, a, std::move(state));
}

} // namespace sojourn
