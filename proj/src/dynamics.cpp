#include "hyperfall/dynamics.hpp"
#include "hyperfall/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>

namespace hyperfall {

namespace {

constexpr const char *kModule = "dynamics";

FallState advance(const FallState &s, const StateDerivative &d, double h) {
    FallState out = s;
    out.t = s.t + h;
    out.xi += h * d.xi;
    out.omega += h * d.omega;
    out.G += h * d.G;
    out.Q += h * d.Q;
    out.c += h * d.c;
    return out;
}

Mat3 nearest_rotation(const Mat3 &Q) {
    const Eigen::JacobiSVD<Mat3> svd(Q, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

double state_magnitude(const FallState &s) {
    return std::max({s.xi.norm(), s.omega.norm(), s.c.norm(), s.G.norm(), s.Q.norm()});
}

bool finite_state(const FallState &s) {
    return s.xi.allFinite() && s.omega.allFinite() && s.G.allFinite() && s.Q.allFinite() && s.c.allFinite();
}

double angle_between(const Vec3 &a, const Vec3 &b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

} // namespace

FallState FallState::at_rest(const Vec3 &g) {
    FallState s;
    s.G = g.normalized();
    return s;
}

void DynamicsParams::validate() const {
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw DomainError(kModule, "integrate", "time step and end time must be positive");
    if (!(Re >= 0.0))
        throw DomainError(kModule, "integrate", "Reynolds number must be non-negative");
    if (stride < 1)
        throw DomainError(kModule, "integrate", "output stride must be at least 1");
}

QuasiSteadyModel::QuasiSteadyModel(const ResistanceSet &R, const MassProperties &mp, double Re)
    : R_(R), mp_(mp), Re_(Re) {
    if (!(mp.m > 0.0))
        throw MassModelError(kModule, "rhs", "total mass must be positive");
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(mp.J);
    const double jnorm = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(jnorm > 0.0))
        throw MassModelError(kModule, "rhs", "inertia tensor vanishes");
    int nulls = 0;
    for (int i = 0; i < 3; ++i) {
        const Vec3 v = eig.eigenvectors().col(i);
        if (eig.eigenvalues()(i) <= 1e-12 * jnorm) {
            ++nulls;
            axis_ = v;
            continue;
        }
        J_pinv_ += v * v.transpose() / eig.eigenvalues()(i);
    }
    if (nulls > 1)
        throw MassModelError(kModule, "rhs", "inertia tensor is singular in more than one direction");
    if (axis_ && (R.K_rr * *axis_).norm() > 1e-8 * R.K_rr.norm())
        throw MassModelError(kModule, "rhs", "inertia tensor is singular in a direction that is not a straight-body axis");
}

StateDerivative QuasiSteadyModel::derivative(const FallState &s) const {
    const Vec3 f = R_.force(s.xi, s.omega);
    const Vec3 t = R_.torque(s.xi, s.omega);
    StateDerivative d;
    d.xi = (mp_.m_e * s.G + f - Re_ * mp_.m * s.omega.cross(s.xi)) / mp_.m;
    // Restricted inverse: the axis of a straight body gets no angular acceleration.
    d.omega = J_pinv_ * (-mp_.m_c * mp_.r.cross(s.G) + t - Re_ * s.omega.cross(mp_.J * s.omega));
    d.G = Re_ * s.G.cross(s.omega);
    d.Q = Re_ * s.Q * cross_matrix(s.omega);
    d.c = Re_ * s.Q * s.xi;
    return d;
}

StateDerivative rhs(const FallState &s, const ResistanceSet &R, const MassProperties &mp, double Re) {
    return QuasiSteadyModel(R, mp, Re).derivative(s);
}

Trajectory integrate(const FallState &s0, const ResistanceSet &R, const MassProperties &mp,
                     const DynamicsParams &params) {
    return integrate(s0, QuasiSteadyModel(R, mp, params.Re), params);
}

Trajectory integrate(const FallState &s0, const QuasiSteadyModel &model, const DynamicsParams &params) {
    params.validate();
    if (std::abs(s0.G.norm() - 1.0) > 1e-8 || (s0.Q.transpose() * s0.Q - Mat3::Identity()).norm() > 1e-8)
        throw DomainError(kModule, "integrate", "initial state must have unit G and orthonormal Q");

    const long n = std::max(1L, static_cast<long>(std::ceil(params.t_end / params.dt - 1e-9)));
    const double h = params.t_end / static_cast<double>(n);

    Trajectory traj;
    traj.samples.push_back(s0);
    FallState s = s0;
    for (long step = 1; step <= n; ++step) {
        const StateDerivative k1 = model.derivative(s);
        const StateDerivative k2 = model.derivative(advance(s, k1, 0.5 * h));
        const StateDerivative k3 = model.derivative(advance(s, k2, 0.5 * h));
        const StateDerivative k4 = model.derivative(advance(s, k3, h));
        FallState next = s;
        next.t = s0.t + step * h;
        next.xi += (h / 6.0) * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi);
        next.omega += (h / 6.0) * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega);
        next.G += (h / 6.0) * (k1.G + 2.0 * k2.G + 2.0 * k3.G + k4.G);
        next.Q += (h / 6.0) * (k1.Q + 2.0 * k2.Q + 2.0 * k3.Q + k4.Q);
        next.c += (h / 6.0) * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c);
        if (!finite_state(next) || state_magnitude(next) > 1e12)
            throw InstabilityError(kModule, "integrate", "state blew up at step " + std::to_string(step), step);
        next.G.normalize();
        next.Q = nearest_rotation(next.Q);
        s = next;
        traj.steps = step;

        bool stop = false;
        if (params.steady_tol > 0.0) {
            const StateDerivative d = model.derivative(s);
            const double rate = std::sqrt(d.xi.squaredNorm() + d.omega.squaredNorm() + d.G.squaredNorm());
            stop = rate <= params.steady_tol;
        }
        if (step % params.stride == 0 || step == n || stop)
            traj.samples.push_back(s);
        if (stop) {
            traj.stopped_steady = true;
            break;
        }
    }
    return traj;
}

SteadyReport detect_steady(const Trajectory &traj, const std::vector<SteadyState> &states,
                           const QuasiSteadyModel &model, double tol) {
    SteadyReport rep;
    if (traj.samples.empty())
        return rep;

    std::map<int, std::vector<int>> families;
    for (int i = 0; i < static_cast<int>(states.size()); ++i)
        families[states[i].family].push_back(i);

    struct Match {
        double distance = std::numeric_limits<double>::infinity();
        int state = -1;
        bool mirrored = false;
    };
    auto match = [&](const FallState &s) {
        Match best;
        auto consider = [&](const Vec3 &g, const Vec3 &xi, const Vec3 &om, int idx, bool mirrored) {
            const double d = std::max({(s.xi - xi).norm(), (s.omega - om).norm(), angle_between(s.G, g)});
            if (d < best.distance)
                best = {d, idx, mirrored};
        };
        for (const auto &[fam, members] : families) {
            if (members.size() == 1) {
                const SteadyState &st = states[members.front()];
                consider(st.g, st.xi, st.omega, members.front(), false);
                consider(-st.g, -st.xi, -st.omega, members.front(), true);
                continue;
            }
            // Project G onto the eigenspace; xi and omega are linear in g.
            Vec3 g = Vec3::Zero();
            Vec3 xi = Vec3::Zero();
            Vec3 om = Vec3::Zero();
            int lead = members.front();
            double lead_weight = -1.0;
            for (int idx : members) {
                const double w = s.G.dot(states[idx].g);
                g += w * states[idx].g;
                xi += w * states[idx].xi;
                om += w * states[idx].omega;
                if (std::abs(w) > lead_weight) {
                    lead_weight = std::abs(w);
                    lead = idx;
                }
            }
            const double norm = g.norm();
            if (norm < 1e-12)
                continue;
            consider(g / norm, xi / norm, om / norm, lead, false);
        }
        return best;
    };

    for (const FallState &s : traj.samples) {
        if (match(s).distance < tol) {
            rep.detected_at = s.t;
            break;
        }
    }
    const FallState &end = traj.samples.back();
    const Match last = match(end);
    rep.distance = last.distance;
    rep.state = last.state;
    rep.mirrored = last.mirrored;
    rep.converged = last.distance < tol;

    const ResistanceSet &R = model.resistance();
    const MassProperties &mp = model.mass();
    const Vec3 f = R.force(end.xi, end.omega);
    const Vec3 t = R.torque(end.xi, end.omega);
    rep.balance_residual = std::max((mp.m_e * end.G + f).norm(), (-mp.m_c * mp.r.cross(end.G) + t).norm());
    return rep;
}

void write_trajectory_csv(std::ostream &out, const Trajectory &traj) {
    out << "t,xi1,xi2,xi3,omega1,omega2,omega3,G1,G2,G3,c1,c2,c3,"
           "Q11,Q12,Q13,Q21,Q22,Q23,Q31,Q32,Q33\n";
    const auto old_precision = out.precision(17);
    for (const FallState &s : traj.samples) {
        out << s.t;
        for (const Vec3 *v : {&s.xi, &s.omega, &s.G, &s.c})
            for (int i = 0; i < 3; ++i)
                out << ',' << (*v)(i);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                out << ',' << s.Q(i, j);
        out << '\n';
    }
    out.precision(old_precision);
}

} // namespace hyperfall
