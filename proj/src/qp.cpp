// SPDX-License-Identifier: Apache-2.0
//
// maisac - movable-antenna ISAC beamforming and positioning toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "maisac/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace maisac
{

void QpProblem::validate() const
{
    if (dim < 1)
        throw std::invalid_argument("QpProblem: dim must be >= 1");
    if (hessian.rows() != dim || hessian.cols() != dim || linear_term.size() != dim)
        throw std::invalid_argument("QpProblem: hessian / linear term size mismatch");
    if (a.cols() != dim || a.rows() != b.size())
        throw std::invalid_argument("QpProblem: constraint system size mismatch");
    if (!hessian.allFinite() || !linear_term.allFinite() || !a.allFinite() || !b.allFinite())
        throw std::invalid_argument("QpProblem: non-finite data");
    if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + hessian.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("QpProblem: hessian not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()))
        throw std::invalid_argument("QpProblem: hessian is not positive semidefinite");
}

std::pair<Eigen::VectorXd, SolveReport> solve_qp(const QpProblem &p, double tol, int max_iter)
{
    p.validate();
    const Eigen::Index n = p.dim;
    const Eigen::Index m = p.b.size();
    const Eigen::MatrixXd &h = p.hessian;
    const Eigen::MatrixXd &a = p.a;
    const Eigen::VectorXd &c = p.linear_term;
    const Eigen::VectorXd &b = p.b;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd s = (b - a * x).cwiseMax(1.0);
    Eigen::VectorXd z = Eigen::VectorXd::Ones(m);

    const double norm_b = b.norm();
    const double norm_c = c.norm();
    const double h_scale = std::max(1.0, h.cwiseAbs().maxCoeff());

    SolveReport report;
    for (int iter = 0;; ++iter)
    {
        const Eigen::VectorXd rd = h * x + c + a.transpose() * z;
        const Eigen::VectorXd rp = a * x + s - b;
        const double gap = s.dot(z);
        const double mu = m ? gap / static_cast<double>(m) : 0.0;
        const double pobj = 0.5 * x.dot(h * x) + c.dot(x);
        const double dobj = pobj + z.dot(rp) - gap; // Lagrangian value at (x, z)

        const double rel_p = rp.norm() / (1.0 + norm_b);
        const double rel_d = rd.norm() / (1.0 + norm_c);
        const double rel_gap = gap / (1.0 + std::abs(pobj));

        IterationRecord rec;
        rec.iteration = iter;
        rec.primal_objective = pobj;
        rec.dual_objective = dobj;
        rec.gap = gap;
        rec.primal_residual = rel_p;
        rec.dual_residual = rel_d;
        report.history.push_back(rec);
        report.objective = pobj;
        report.dual_objective = dobj;
        report.primal_residual = rel_p;
        report.dual_residual = rel_d;
        report.gap = gap;
        report.relative_gap = rel_gap;
        report.iterations = iter;

        if (!x.allFinite() || !z.allFinite() || !s.allFinite())
        {
            report.status = SolveStatus::max_iter;
            break;
        }
        if (rel_p <= tol && rel_d <= tol && rel_gap <= tol)
        {
            report.status = SolveStatus::optimal;
            break;
        }
        // Farkas ray: z >= 0, A'z = 0, b'z < 0
        if (m)
        {
            const double zs = z.sum();
            const Eigen::VectorXd zn = z / zs;
            if (zs > 1e6 && (a.transpose() * zn).norm() < 1e-9 * (1.0 + a.norm()) && b.dot(zn) < -1e-9)
            {
                report.status = SolveStatus::infeasible;
                break;
            }
        }
        if (x.norm() > 1e12 && rel_p <= tol)
        {
            report.status = SolveStatus::unbounded;
            break;
        }
        if (iter >= max_iter)
        {
            report.status = SolveStatus::max_iter;
            break;
        }

        const Eigen::VectorXd d = z.cwiseQuotient(s);
        Eigen::MatrixXd k = h + a.transpose() * d.asDiagonal() * a;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(k);
        if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14)
        {
            k += 1e-12 * h_scale * Eigen::MatrixXd::Identity(n, n);
            ldlt.compute(k);
        }

        // rc = target complementarity - s.z
        auto solve = [&](const Eigen::VectorXd &rc, Eigen::VectorXd &dx, Eigen::VectorXd &ds, Eigen::VectorXd &dz)
        {
            const Eigen::VectorXd t = (rc + z.cwiseProduct(rp)).cwiseQuotient(s);
            dx = ldlt.solve(-rd - a.transpose() * t);
            ds = -rp - a * dx;
            dz = (rc - z.cwiseProduct(ds)).cwiseQuotient(s);
        };
        auto max_step = [](const Eigen::VectorXd &v, const Eigen::VectorXd &dv)
        {
            double alpha = 1.0;
            for (Eigen::Index i = 0; i < v.size(); ++i)
                if (dv(i) < 0.0)
                    alpha = std::min(alpha, -v(i) / dv(i));
            return alpha;
        };

        Eigen::VectorXd dx, ds, dz;
        solve(-s.cwiseProduct(z), dx, ds, dz);
        const double ap_aff = max_step(s, ds);
        const double ad_aff = max_step(z, dz);
        double sigma = 0.0;
        if (m)
        {
            const double mu_aff = (s + ap_aff * ds).dot(z + ad_aff * dz) / static_cast<double>(m);
            sigma = std::clamp(std::pow(mu_aff / std::max(mu, 1e-300), 3.0), 0.0, 1.0);
        }
        const Eigen::VectorXd rc =
            Eigen::VectorXd::Constant(m, sigma * mu) - s.cwiseProduct(z) - ds.cwiseProduct(dz);
        solve(rc, dx, ds, dz);

        const double alpha = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(z, dz)));
        x += alpha * dx;
        s += alpha * ds;
        z += alpha * dz;
        report.history.back().step_primal = alpha;
        report.history.back().step_dual = alpha;
    }
    return {x, report};
}

namespace
{

// max of q t^2 + l t + c over [lo, hi], q <= 0
std::pair<double, double> max_concave_1d(double q, double l, double c, double lo, double hi)
{
    auto f = [&](double t) { return (q * t + l) * t + c; };
    double best_t = lo;
    double best = f(lo);
    if (f(hi) > best)
    {
        best_t = hi;
        best = f(hi);
    }
    if (q < 0.0)
    {
        const double t = std::clamp(-l / (2.0 * q), lo, hi);
        if (f(t) > best)
        {
            best_t = t;
            best = f(t);
        }
    }
    return {best_t, best};
}

} // namespace

BoxMaximum max_concave_quadratic_2d(const Eigen::Matrix2d &quad, const Eigen::Vector2d &lin, double constant,
                                    const Box2d &box)
{
    const Eigen::Matrix2d q = 0.5 * (quad + quad.transpose());
    auto value = [&](const Eigen::Vector2d &p) { return p.dot(q * p) + lin.dot(p) + constant; };

    BoxMaximum best;
    best.value = -std::numeric_limits<double>::infinity();
    auto consider = [&](const Eigen::Vector2d &p)
    {
        const double v = value(p);
        if (v > best.value)
        {
            best.value = v;
            best.point = p;
        }
    };

    const double det = q.determinant();
    const double scale = std::max(1e-300, q.cwiseAbs().maxCoeff());
    if (q.trace() < 0.0 && det > 1e-12 * scale * scale)
    {
        const Eigen::Vector2d p = q.ldlt().solve(-0.5 * lin);
        if (box.contains(p))
        {
            best.point = p;
            best.value = value(p);
            return best;
        }
    }

    // Edges x = const: q11 y^2 + (2 q01 x + l1) y + (q00 x^2 + l0 x + c)
    for (double x : {box.lo_x, box.hi_x})
    {
        const auto [y, v] = max_concave_1d(q(1, 1), 2.0 * q(0, 1) * x + lin(1), q(0, 0) * x * x + lin(0) * x + constant,
                                           box.lo_y, box.hi_y);
        (void)v;
        consider({x, y});
    }
    for (double y : {box.lo_y, box.hi_y})
    {
        const auto [x, v] = max_concave_1d(q(0, 0), 2.0 * q(0, 1) * y + lin(0), q(1, 1) * y * y + lin(1) * y + constant,
                                           box.lo_x, box.hi_x);
        (void)v;
        consider({x, y});
    }
    return best;
}

} // namespace maisac
