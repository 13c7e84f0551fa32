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

#include "maisac/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace maisac
{

std::string to_string(SolveStatus s)
{
    switch (s)
    {
    case SolveStatus::optimal:
        return "optimal";
    case SolveStatus::infeasible:
        return "infeasible";
    case SolveStatus::unbounded:
        return "unbounded";
    case SolveStatus::max_iter:
        return "max-iter";
    }
    return "unknown";
}

LinearFunctional &LinearFunctional::add_block(std::size_t block, Eigen::MatrixXd coef)
{
    blocks.push_back({block, std::move(coef)});
    return *this;
}

LinearFunctional &LinearFunctional::add_scalar(std::size_t index, double coef)
{
    scalars.emplace_back(index, coef);
    return *this;
}

LmiConstraint::LmiConstraint(Eigen::Index dim)
    : dim_(dim), entries_(static_cast<std::size_t>(dim * (dim + 1) / 2))
{
}

Eigen::Index LmiConstraint::index(Eigen::Index i, Eigen::Index j) const
{
    if (i > j)
        std::swap(i, j);
    if (i < 0 || j >= dim_)
        throw std::out_of_range("LmiConstraint: entry index out of range");
    return j * (j + 1) / 2 + i;
}

LinearFunctional &LmiConstraint::entry(Eigen::Index i, Eigen::Index j)
{
    return entries_[static_cast<std::size_t>(index(i, j))];
}

const LinearFunctional &LmiConstraint::entry(Eigen::Index i, Eigen::Index j) const
{
    return entries_[static_cast<std::size_t>(index(i, j))];
}

namespace
{

void check_functional(const LinearFunctional &f, const SdpProblem &p, const char *where)
{
    for (const auto &t : f.blocks)
    {
        if (t.block >= p.psd_block_dims.size())
            throw std::invalid_argument(std::string(where) + ": block index out of range");
        const auto n = p.psd_block_dims[t.block];
        if (t.coef.rows() != n || t.coef.cols() != n)
            throw std::invalid_argument(std::string(where) + ": coefficient size does not match its block");
        if (!t.coef.allFinite())
            throw std::invalid_argument(std::string(where) + ": non-finite coefficient");
    }
    for (const auto &[i, c] : f.scalars)
    {
        if (i >= p.scalar_var_count)
            throw std::invalid_argument(std::string(where) + ": scalar index out of range");
        if (!std::isfinite(c))
            throw std::invalid_argument(std::string(where) + ": non-finite coefficient");
    }
    if (!std::isfinite(f.constant))
        throw std::invalid_argument(std::string(where) + ": non-finite constant");
}

double inner(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) { return a.cwiseProduct(b).sum(); }

Eigen::MatrixXd sym(const Eigen::MatrixXd &m) { return 0.5 * (m + m.transpose()); }

// Standard form:  min <C,X> + c_lp'x + f'u  s.t.  A_i(X) + a_i'x + B_i u = b_i,
// X PSD blocks, x >= 0, u free.
struct StandardForm
{
    struct Row
    {
        std::vector<std::pair<std::size_t, Eigen::MatrixXd>> blocks;
        std::vector<std::pair<Eigen::Index, double>> lp;
        Eigen::VectorXd free;
        double rhs = 0.0;
    };

    std::vector<Eigen::Index> dims;
    Eigen::Index n_lp = 0;
    Eigen::Index n_free = 0;
    std::vector<Row> rows;
    std::vector<Eigen::MatrixXd> c;
    Eigen::VectorXd c_lp;
    Eigen::VectorXd f;
    double obj_const = 0.0;

    std::size_t n_user_blocks = 0;
    std::vector<std::size_t> lmi_block; // standard-form block index of each LMI slack
};

// Merge a functional's block terms into per-block symmetric coefficients.
void accumulate(const LinearFunctional &fn, double sign, std::vector<std::pair<std::size_t, Eigen::MatrixXd>> &out,
                Eigen::VectorXd &free)
{
    for (const auto &t : fn.blocks)
    {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto &e) { return e.first == t.block; });
        const Eigen::MatrixXd s = sign * sym(t.coef);
        if (it == out.end())
            out.emplace_back(t.block, s);
        else
            it->second += s;
    }
    for (const auto &[i, c] : fn.scalars)
        free(static_cast<Eigen::Index>(i)) += sign * c;
}

StandardForm to_standard_form(const SdpProblem &p)
{
    StandardForm s;
    s.n_user_blocks = p.psd_block_dims.size();
    s.dims = p.psd_block_dims;
    for (const auto &lmi : p.lmis)
    {
        s.lmi_block.push_back(s.dims.size());
        s.dims.push_back(lmi.dim());
    }
    s.n_lp = static_cast<Eigen::Index>(p.inequalities.size());
    s.n_free = static_cast<Eigen::Index>(p.scalar_var_count);

    s.c.reserve(s.dims.size());
    for (auto d : s.dims)
        s.c.push_back(Eigen::MatrixXd::Zero(d, d));
    s.c_lp = Eigen::VectorXd::Zero(s.n_lp);
    s.f = Eigen::VectorXd::Zero(s.n_free);
    {
        std::vector<std::pair<std::size_t, Eigen::MatrixXd>> obj_blocks;
        accumulate(p.objective, 1.0, obj_blocks, s.f);
        for (auto &[b, m] : obj_blocks)
            s.c[b] += m;
        s.obj_const = p.objective.constant;
    }

    auto new_row = [&]
    {
        StandardForm::Row r;
        r.free = Eigen::VectorXd::Zero(s.n_free);
        return r;
    };

    for (const auto &eq : p.equalities)
    {
        auto r = new_row();
        accumulate(eq.lhs, 1.0, r.blocks, r.free);
        r.rhs = eq.rhs - eq.lhs.constant;
        s.rows.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < p.inequalities.size(); ++i)
    {
        const auto &in = p.inequalities[i];
        auto r = new_row();
        accumulate(in.lhs, 1.0, r.blocks, r.free);
        r.lp.emplace_back(static_cast<Eigen::Index>(i), 1.0);
        r.rhs = in.rhs - in.lhs.constant;
        s.rows.push_back(std::move(r));
    }
    for (std::size_t l = 0; l < p.lmis.size(); ++l)
    {
        const auto &lmi = p.lmis[l];
        const auto n = lmi.dim();
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i <= j; ++i)
            {
                // <E_ij, S> - f_ij(x) = constant_ij
                auto r = new_row();
                Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
                if (i == j)
                    e(i, i) = 1.0;
                else
                    e(i, j) = e(j, i) = 0.5;
                r.blocks.emplace_back(s.lmi_block[l], e);
                accumulate(lmi.entry(i, j), -1.0, r.blocks, r.free);
                r.rhs = lmi.entry(i, j).constant;
                s.rows.push_back(std::move(r));
            }
    }
    return s;
}

struct Iterate
{
    std::vector<Eigen::MatrixXd> x;
    Eigen::VectorXd x_lp;
    Eigen::VectorXd u;
    Eigen::VectorXd y;
    std::vector<Eigen::MatrixXd> z;
    Eigen::VectorXd z_lp;
};

class Operators
{
public:
    explicit Operators(const StandardForm &s) : s_(s) {}

    Eigen::VectorXd apply(const std::vector<Eigen::MatrixXd> &x, const Eigen::VectorXd &x_lp,
                          const Eigen::VectorXd &u) const
    {
        Eigen::VectorXd out(static_cast<Eigen::Index>(s_.rows.size()));
        for (std::size_t i = 0; i < s_.rows.size(); ++i)
            out(static_cast<Eigen::Index>(i)) = apply_row(i, x, x_lp) + (u.size() ? s_.rows[i].free.dot(u) : 0.0);
        return out;
    }

    double apply_row(std::size_t i, const std::vector<Eigen::MatrixXd> &x, const Eigen::VectorXd &x_lp) const
    {
        const auto &r = s_.rows[i];
        double acc = 0.0;
        for (const auto &[b, m] : r.blocks)
            acc += inner(m, x[b]);
        for (const auto &[j, c] : r.lp)
            acc += c * x_lp(j);
        return acc;
    }

    void adjoint(const Eigen::VectorXd &y, std::vector<Eigen::MatrixXd> &out, Eigen::VectorXd &out_lp,
                 Eigen::VectorXd &out_free) const
    {
        out.resize(s_.dims.size());
        for (std::size_t b = 0; b < s_.dims.size(); ++b)
            out[b] = Eigen::MatrixXd::Zero(s_.dims[b], s_.dims[b]);
        out_lp = Eigen::VectorXd::Zero(s_.n_lp);
        out_free = Eigen::VectorXd::Zero(s_.n_free);
        for (std::size_t i = 0; i < s_.rows.size(); ++i)
        {
            const double yi = y(static_cast<Eigen::Index>(i));
            const auto &r = s_.rows[i];
            for (const auto &[b, m] : r.blocks)
                out[b] += yi * m;
            for (const auto &[j, c] : r.lp)
                out_lp(j) += yi * c;
            if (s_.n_free)
                out_free += yi * r.free;
        }
    }

private:
    const StandardForm &s_;
};

// Largest alpha with x + alpha dx PSD (infinity when unbounded).
double max_step(const Eigen::MatrixXd &x, const Eigen::MatrixXd &dx)
{
    Eigen::LLT<Eigen::MatrixXd> llt(x);
    if (llt.info() != Eigen::Success)
        return 0.0;
    const Eigen::MatrixXd l = llt.matrixL();
    Eigen::MatrixXd t = l.triangularView<Eigen::Lower>().solve(dx);
    t = l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym(t), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double max_step_lp(const Eigen::VectorXd &x, const Eigen::VectorXd &dx)
{
    double a = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (dx(i) < 0.0)
            a = std::min(a, -x(i) / dx(i));
    return a;
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd &m)
{
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success)
        return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
    return m.completeOrthogonalDecomposition().pseudoInverse();
}

double block_norm(const std::vector<Eigen::MatrixXd> &m, const Eigen::VectorXd &lp)
{
    double acc = lp.squaredNorm();
    for (const auto &b : m)
        acc += b.squaredNorm();
    return std::sqrt(acc);
}

} // namespace

void SdpProblem::validate() const
{
    for (auto d : psd_block_dims)
        if (d < 1)
            throw std::invalid_argument("SdpProblem: PSD block dimension must be >= 1");
    check_functional(objective, *this, "objective");
    for (const auto &c : equalities)
    {
        check_functional(c.lhs, *this, "equality");
        if (c.lhs.blocks.empty() && c.lhs.scalars.empty())
            throw std::invalid_argument("SdpProblem: equality with no variables");
    }
    for (const auto &c : inequalities)
        check_functional(c.lhs, *this, "inequality");
    for (const auto &l : lmis)
    {
        if (l.dim() < 1)
            throw std::invalid_argument("SdpProblem: LMI dimension must be >= 1");
        for (Eigen::Index j = 0; j < l.dim(); ++j)
            for (Eigen::Index i = 0; i <= j; ++i)
                check_functional(l.entry(i, j), *this, "lmi");
    }
}

double evaluate(const LinearFunctional &f, const std::vector<Eigen::MatrixXd> &blocks,
                const Eigen::VectorXd &scalars)
{
    double acc = f.constant;
    for (const auto &t : f.blocks)
        acc += inner(sym(t.coef), blocks.at(t.block));
    for (const auto &[i, c] : f.scalars)
        acc += c * scalars(static_cast<Eigen::Index>(i));
    return acc;
}

std::pair<SdpSolution, SolveReport> solve_sdp(const SdpProblem &p, double tol, int max_iter)
{
    p.validate();
    const StandardForm s = to_standard_form(p);
    const Operators ops(s);
    const auto m = static_cast<Eigen::Index>(s.rows.size());
    const auto nb = s.dims.size();

    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i)
        b(i) = s.rows[static_cast<std::size_t>(i)].rhs;

    double n_cone = static_cast<double>(s.n_lp);
    for (auto d : s.dims)
        n_cone += static_cast<double>(d);

    const double norm_b = b.norm();
    const double norm_c = std::sqrt(block_norm(s.c, s.c_lp) * block_norm(s.c, s.c_lp) + s.f.squaredNorm());

    // Starting point scaled to the data
    double xi = std::max(10.0, std::sqrt(std::max(n_cone, 1.0)));
    double eta = std::max(10.0, std::sqrt(std::max(n_cone, 1.0)));
    for (std::size_t i = 0; i < s.rows.size(); ++i)
    {
        double row_norm = 0.0;
        for (const auto &[bb, mm] : s.rows[i].blocks)
            row_norm += mm.squaredNorm();
        row_norm = std::sqrt(row_norm + static_cast<double>(s.rows[i].lp.size()) + s.rows[i].free.squaredNorm());
        xi = std::max(xi, std::max(n_cone, 1.0) * (1.0 + std::abs(b(static_cast<Eigen::Index>(i)))) / (1.0 + row_norm));
        eta = std::max(eta, row_norm);
    }
    eta = std::max(eta, norm_c);

    Iterate it;
    for (auto d : s.dims)
    {
        it.x.push_back(xi * Eigen::MatrixXd::Identity(d, d));
        it.z.push_back(eta * Eigen::MatrixXd::Identity(d, d));
    }
    it.x_lp = Eigen::VectorXd::Constant(s.n_lp, xi);
    it.z_lp = Eigen::VectorXd::Constant(s.n_lp, eta);
    it.u = Eigen::VectorXd::Zero(s.n_free);
    it.y = Eigen::VectorXd::Zero(m);

    SolveReport report;
    constexpr double kStepFactor = 0.95;
    constexpr double kInfeasRatio = 1e8;
    int stalls = 0;

    std::vector<Eigen::MatrixXd> aty, rd(nb), zinv(nb);
    Eigen::VectorXd aty_lp, aty_free;

    for (int iter = 0;; ++iter)
    {
        // Residuals
        const Eigen::VectorXd ax = ops.apply(it.x, it.x_lp, it.u);
        const Eigen::VectorXd rp = b - ax;
        ops.adjoint(it.y, aty, aty_lp, aty_free);
        for (std::size_t k = 0; k < nb; ++k)
            rd[k] = s.c[k] - it.z[k] - aty[k];
        const Eigen::VectorXd rd_lp = s.c_lp - it.z_lp - aty_lp;
        const Eigen::VectorXd rf = s.f - aty_free;

        double gap = it.x_lp.dot(it.z_lp);
        double cx = s.c_lp.dot(it.x_lp) + s.f.dot(it.u);
        for (std::size_t k = 0; k < nb; ++k)
        {
            gap += inner(it.x[k], it.z[k]);
            cx += inner(s.c[k], it.x[k]);
        }
        const double by = b.dot(it.y);
        const double pobj = cx + s.obj_const;
        const double dobj = by + s.obj_const;
        const double mu = gap / std::max(n_cone, 1.0);

        const double rel_p = rp.norm() / (1.0 + norm_b);
        const double rel_d = std::sqrt(std::pow(block_norm(rd, rd_lp), 2) + rf.squaredNorm()) / (1.0 + norm_c);
        const double rel_gap = std::max(gap, std::abs(pobj - dobj)) / (1.0 + std::abs(pobj) + std::abs(dobj));

        IterationRecord rec;
        rec.iteration = iter;
        rec.primal_objective = pobj;
        rec.dual_objective = dobj;
        rec.gap = gap;
        rec.primal_residual = rel_p;
        rec.dual_residual = rel_d;
        if (!report.history.empty())
        {
            rec.step_primal = report.history.back().step_primal;
            rec.step_dual = report.history.back().step_dual;
        }
        report.history.push_back(rec);

        report.objective = pobj;
        report.dual_objective = dobj;
        report.primal_residual = rel_p;
        report.dual_residual = rel_d;
        report.gap = gap;
        report.relative_gap = rel_gap;
        report.iterations = iter;

        if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(gap))
        {
            report.status = SolveStatus::max_iter;
            break;
        }
        if (rel_p <= tol && rel_d <= tol && rel_gap <= tol)
        {
            report.status = SolveStatus::optimal;
            break;
        }
        // Certificates of infeasibility along diverging rays
        if (by > 0.0)
        {
            double ray = 0.0;
            for (std::size_t k = 0; k < nb; ++k)
                ray += (aty[k] + it.z[k]).squaredNorm();
            ray = std::sqrt(ray + (aty_lp + it.z_lp).squaredNorm() + aty_free.squaredNorm());
            if (by > kInfeasRatio * std::max(ray, 1e-300) && rel_p > tol)
            {
                report.status = SolveStatus::infeasible;
                break;
            }
        }
        if (cx < 0.0 && -cx > kInfeasRatio * std::max(ax.norm(), 1e-300) && rel_d > tol)
        {
            report.status = SolveStatus::unbounded;
            break;
        }
        if (iter >= max_iter)
        {
            report.status = SolveStatus::max_iter;
            break;
        }

        // Schur complement  M_ij = sum_b <A_ib, X_b A_jb Z_b^-1> + LP part
        for (std::size_t k = 0; k < nb; ++k)
            zinv[k] = spd_inverse(it.z[k]);
        const Eigen::VectorXd d_lp = it.x_lp.cwiseQuotient(it.z_lp);

        Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index j = 0; j < m; ++j)
        {
            const auto &rj = s.rows[static_cast<std::size_t>(j)];
            for (const auto &[bj, aj] : rj.blocks)
            {
                const Eigen::MatrixXd g = it.x[bj] * aj * zinv[bj];
                for (Eigen::Index i = 0; i <= j; ++i)
                {
                    for (const auto &[bi, ai] : s.rows[static_cast<std::size_t>(i)].blocks)
                        if (bi == bj)
                            schur(i, j) += inner(ai, g);
                }
            }
            for (const auto &[lj, cj] : rj.lp)
                for (Eigen::Index i = 0; i <= j; ++i)
                    for (const auto &[li, ci] : s.rows[static_cast<std::size_t>(i)].lp)
                        if (li == lj)
                            schur(i, j) += ci * d_lp(lj) * cj;
        }
        schur = schur.selfadjointView<Eigen::Upper>();

        Eigen::LDLT<Eigen::MatrixXd> ldlt(schur);
        Eigen::MatrixXd bmat(m, s.n_free);
        for (Eigen::Index i = 0; i < m; ++i)
            if (s.n_free)
                bmat.row(i) = s.rows[static_cast<std::size_t>(i)].free.transpose();
        Eigen::MatrixXd minv_b;
        Eigen::LDLT<Eigen::MatrixXd> reduced;
        if (s.n_free)
        {
            minv_b = ldlt.solve(bmat);
            reduced.compute(bmat.transpose() * minv_b);
        }

        // Solve for a direction given the complementarity target  gamma
        // (per block, multiplied by Z^-1 on the right and symmetrized).
        struct Direction
        {
            std::vector<Eigen::MatrixXd> dx, dz;
            Eigen::VectorXd dx_lp, dz_lp, du, dy;
        };
        std::vector<Eigen::MatrixXd> xrz(nb);
        for (std::size_t k = 0; k < nb; ++k)
            xrz[k] = it.x[k] * rd[k] * zinv[k];
        const Eigen::VectorXd xrz_lp = it.x_lp.cwiseProduct(rd_lp).cwiseQuotient(it.z_lp);

        auto direction = [&](const std::vector<Eigen::MatrixXd> &target, const Eigen::VectorXd &target_lp)
        {
            Direction d;
            std::vector<Eigen::MatrixXd> h(nb);
            for (std::size_t k = 0; k < nb; ++k)
                h[k] = sym(target[k] * zinv[k]) - it.x[k];
            const Eigen::VectorXd h_lp = target_lp.cwiseQuotient(it.z_lp) - it.x_lp;

            auto solve_reduced = [&](const Eigen::VectorXd &rhs_p, const Eigen::VectorXd &rhs_f, Eigen::VectorXd &dy,
                                     Eigen::VectorXd &du)
            {
                if (s.n_free)
                {
                    const Eigen::VectorXd minv_rhs = ldlt.solve(rhs_p);
                    du = reduced.solve(bmat.transpose() * minv_rhs - rhs_f);
                    dy = minv_rhs - minv_b * du;
                }
                else
                {
                    du = Eigen::VectorXd::Zero(0);
                    dy = ldlt.solve(rhs_p);
                }
            };
            auto fill = [&](Direction &dd)
            {
                std::vector<Eigen::MatrixXd> atdy;
                Eigen::VectorXd atdy_lp, atdy_free;
                ops.adjoint(dd.dy, atdy, atdy_lp, atdy_free);
                dd.dx.resize(nb);
                dd.dz.resize(nb);
                for (std::size_t k = 0; k < nb; ++k)
                {
                    dd.dz[k] = rd[k] - atdy[k];
                    dd.dx[k] = h[k] - sym(it.x[k] * dd.dz[k] * zinv[k]);
                }
                dd.dz_lp = rd_lp - atdy_lp;
                dd.dx_lp = h_lp - it.x_lp.cwiseProduct(dd.dz_lp).cwiseQuotient(it.z_lp);
                return atdy_free;
            };

            const Eigen::VectorXd rhs = rp - ops.apply(h, h_lp, Eigen::VectorXd()) + ops.apply(xrz, xrz_lp, Eigen::VectorXd());
            solve_reduced(rhs, rf, d.dy, d.du);
            Eigen::VectorXd btdy = fill(d);
            // Iterative refinement against the unreduced linearized equations
            for (int pass = 0; pass < 3; ++pass)
            {
                const Eigen::VectorXd ep = rp - ops.apply(d.dx, d.dx_lp, d.du);
                const Eigen::VectorXd ef = rf - btdy;
                if (ep.norm() <= 1e-15 * (1.0 + rp.norm()) && ef.norm() <= 1e-15 * (1.0 + rf.norm()))
                    break;
                Eigen::VectorXd cy, cu;
                solve_reduced(ep, ef, cy, cu);
                d.dy += cy;
                d.du += cu;
                btdy = fill(d);
            }
            return d;
        };

        auto step_lengths = [&](const Direction &d)
        {
            double ap = max_step_lp(it.x_lp, d.dx_lp);
            double ad = max_step_lp(it.z_lp, d.dz_lp);
            for (std::size_t k = 0; k < nb; ++k)
            {
                ap = std::min(ap, max_step(it.x[k], d.dx[k]));
                ad = std::min(ad, max_step(it.z[k], d.dz[k]));
            }
            return std::pair{ap, ad};
        };

        // Predictor
        std::vector<Eigen::MatrixXd> zero_target(nb);
        for (std::size_t k = 0; k < nb; ++k)
            zero_target[k] = Eigen::MatrixXd::Zero(s.dims[k], s.dims[k]);
        const Direction aff = direction(zero_target, Eigen::VectorXd::Zero(s.n_lp));
        auto [ap_aff, ad_aff] = step_lengths(aff);
        ap_aff = std::min(1.0, ap_aff);
        ad_aff = std::min(1.0, ad_aff);

        double gap_aff = (it.x_lp + ap_aff * aff.dx_lp).dot(it.z_lp + ad_aff * aff.dz_lp);
        for (std::size_t k = 0; k < nb; ++k)
            gap_aff += inner(it.x[k] + ap_aff * aff.dx[k], it.z[k] + ad_aff * aff.dz[k]);
        const double sigma = std::clamp(std::pow(std::max(gap_aff, 0.0) / std::max(gap, 1e-300), 3.0), 0.0, 1.0);

        // Corrector
        std::vector<Eigen::MatrixXd> target(nb);
        for (std::size_t k = 0; k < nb; ++k)
            target[k] = sigma * mu * Eigen::MatrixXd::Identity(s.dims[k], s.dims[k]) - aff.dx[k] * aff.dz[k];
        const Eigen::VectorXd target_lp =
            Eigen::VectorXd::Constant(s.n_lp, sigma * mu) - aff.dx_lp.cwiseProduct(aff.dz_lp);
        const Direction dir = direction(target, target_lp);
        auto [ap, ad] = step_lengths(dir);
        ap = std::min(1.0, kStepFactor * ap);
        ad = std::min(1.0, kStepFactor * ad);

        if (!std::isfinite(ap) || !std::isfinite(ad) || !dir.dy.allFinite())
        {
            report.status = SolveStatus::max_iter;
            break;
        }
        stalls = (ap < 1e-10 && ad < 1e-10) ? stalls + 1 : 0;
        if (stalls >= 3)
        {
            report.status = SolveStatus::max_iter;
            break;
        }

        for (std::size_t k = 0; k < nb; ++k)
        {
            it.x[k] = sym(it.x[k] + ap * dir.dx[k]);
            it.z[k] = sym(it.z[k] + ad * dir.dz[k]);
        }
        it.x_lp += ap * dir.dx_lp;
        it.z_lp += ad * dir.dz_lp;
        it.u += ap * dir.du;
        it.y += ad * dir.dy;
        report.history.back().step_primal = ap;
        report.history.back().step_dual = ad;
    }

    SdpSolution sol;
    sol.blocks.assign(it.x.begin(), it.x.begin() + static_cast<std::ptrdiff_t>(s.n_user_blocks));
    sol.scalars = it.u;
    for (const auto &lmi : p.lmis)
    {
        Eigen::MatrixXd v(lmi.dim(), lmi.dim());
        for (Eigen::Index j = 0; j < lmi.dim(); ++j)
            for (Eigen::Index i = 0; i <= j; ++i)
                v(i, j) = v(j, i) = evaluate(lmi.entry(i, j), sol.blocks, sol.scalars);
        sol.lmi_values.push_back(std::move(v));
    }
    sol.inequality_slack.resize(static_cast<Eigen::Index>(p.inequalities.size()));
    for (std::size_t i = 0; i < p.inequalities.size(); ++i)
        sol.inequality_slack(static_cast<Eigen::Index>(i)) =
            p.inequalities[i].rhs - evaluate(p.inequalities[i].lhs, sol.blocks, sol.scalars);
    return {std::move(sol), report};
}

Eigen::MatrixXd realify(const Eigen::MatrixXcd &h)
{
    const auto n = h.rows();
    Eigen::MatrixXd r(2 * n, 2 * n);
    r.topLeftCorner(n, n) = h.real();
    r.topRightCorner(n, n) = -h.imag();
    r.bottomLeftCorner(n, n) = h.imag();
    r.bottomRightCorner(n, n) = h.real();
    return r;
}

Eigen::MatrixXcd complexify(const Eigen::MatrixXd &y)
{
    const auto n = y.rows() / 2;
    const Eigen::MatrixXd re = 0.5 * (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n));
    const Eigen::MatrixXd im = 0.5 * (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n));
    Eigen::MatrixXcd w(n, n);
    w.real() = re;
    w.imag() = im;
    return w;
}

} // namespace maisac
