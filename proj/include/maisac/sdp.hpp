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

#ifndef MAISAC_SDP_HPP
#define MAISAC_SDP_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace maisac
{

enum class SolveStatus
{
    optimal,
    infeasible,
    unbounded,
    max_iter,
};

std::string to_string(SolveStatus s);

struct IterationRecord
{
    int iteration = 0;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double gap = 0.0;             // complementarity <X, Z>, never negative
    double primal_residual = 0.0; // relative
    double dual_residual = 0.0;   // relative
    double step_primal = 0.0;
    double step_dual = 0.0;
};

struct SolveReport
{
    SolveStatus status = SolveStatus::max_iter;
    double objective = 0.0;
    double dual_objective = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    double relative_gap = 0.0;
    int iterations = 0;
    std::vector<IterationRecord> history;
};

// Affine functional  constant + sum_b <coef_b, X_b> + sum_i c_i u_i  over
// symmetric PSD blocks X_b and free scalars u_i. Coefficient matrices are
// taken symmetric; only their symmetric part matters.
struct LinearFunctional
{
    struct BlockTerm
    {
        std::size_t block = 0;
        Eigen::MatrixXd coef;
    };

    std::vector<BlockTerm> blocks;
    std::vector<std::pair<std::size_t, double>> scalars;
    double constant = 0.0;

    LinearFunctional &add_block(std::size_t block, Eigen::MatrixXd coef);
    LinearFunctional &add_scalar(std::size_t index, double coef);
};

// Affine symmetric-matrix-valued map required PSD: entry (i, j) for i <= j.
class LmiConstraint
{
public:
    explicit LmiConstraint(Eigen::Index dim = 0);

    Eigen::Index dim() const { return dim_; }
    LinearFunctional &entry(Eigen::Index i, Eigen::Index j);
    const LinearFunctional &entry(Eigen::Index i, Eigen::Index j) const;

private:
    Eigen::Index index(Eigen::Index i, Eigen::Index j) const;

    Eigen::Index dim_;
    std::vector<LinearFunctional> entries_;
};

struct LinearConstraint
{
    LinearFunctional lhs;
    double rhs = 0.0;
};

// minimize objective  s.t.  equalities (lhs == rhs), inequalities (lhs <= rhs),
// lmis PSD, every block in psd_block_dims PSD, scalars free.
struct SdpProblem
{
    std::vector<Eigen::Index> psd_block_dims;
    std::size_t scalar_var_count = 0;
    LinearFunctional objective;
    std::vector<LinearConstraint> equalities;
    std::vector<LinearConstraint> inequalities;
    std::vector<LmiConstraint> lmis;

    /// Throws std::invalid_argument on inconsistent dimensions or non-finite data.
    void validate() const;
};

struct SdpSolution
{
    std::vector<Eigen::MatrixXd> blocks;
    Eigen::VectorXd scalars;
    std::vector<Eigen::MatrixXd> lmi_values; // value of each LMI map at the solution
    Eigen::VectorXd inequality_slack;        // rhs - lhs, >= 0
};

/// Primal-dual path-following interior point (HKM direction, Mehrotra
/// predictor-corrector, infeasible start). Dense throughout.
std::pair<SdpSolution, SolveReport> solve_sdp(const SdpProblem &p, double tol = 1e-8, int max_iter = 100);

/// Evaluate a functional at a point.
double evaluate(const LinearFunctional &f, const std::vector<Eigen::MatrixXd> &blocks,
                const Eigen::VectorXd &scalars);

/// [[Re H, -Im H], [Im H, Re H]]: Hermitian PSD <=> realified PSD, and
/// tr(H W) = tr(realify(H) realify(W)) / 2.
Eigen::MatrixXd realify(const Eigen::MatrixXcd &h);

/// Inverse of realify for a general symmetric 2n x 2n matrix (averages the
/// two copies): W = (Y11 + Y22)/2 + j (Y21 - Y12)/2.
Eigen::MatrixXcd complexify(const Eigen::MatrixXd &y);

} // namespace maisac

#endif
