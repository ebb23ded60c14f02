#pragma once

#include <Eigen/Dense>

#include "lqml/field.hpp"
#include "lqml/gauge.hpp"
#include "lqml/geometry.hpp"
#include "lqml/wilson_dirac.hpp"

namespace lqml::oracle {

// Dense ground truth for small lattices. Deliberately written without the
// projector compression and site kernels of the production operator: every
// hop is a full 12x12 block (spin projector (x) color link) accumulated into
// an explicit matrix.
//
// Vector ordering: index = 12 * site + 3 * spin + color.

using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

/// Largest dimension the assemblers accept (a 6^4 lattice).
constexpr Eigen::Index kMaxDenseDim = 20736;

DenseMatrix assemble_dirac(const LatticeGeometry& geom, const GaugeField& u,
                           const CloverField& c, const DiracParams& params);

/// S = D_ee - D_eo D_oo^-1 D_oe over even sites, from dense parity blocks.
/// Even sites are taken in ascending natural order.
DenseMatrix assemble_schur(const LatticeGeometry& geom, const GaugeField& u,
                           const CloverField& c, const DiracParams& params);

/// Row-major submatrix of D between two parity classes.
DenseMatrix parity_block(const DenseMatrix& d, const LatticeGeometry& geom, Parity row,
                         Parity col);

/// Solve A X = B by LU with partial pivoting. Throws NumericalError if the
/// reciprocal condition estimate indicates singularity beyond 1e12.
DenseMatrix dense_solve(const DenseMatrix& a, const DenseMatrix& rhs);
/// min ||A y - g||_2 via Householder QR.
DenseVector dense_lstsq(const DenseMatrix& a, const DenseVector& g);

/// Field column i <-> dense vector (12 * sites entries).
DenseVector to_dense(const BlockSpinorField& v, int i);
void from_dense(const DenseVector& d, int i, BlockSpinorField& v);
/// Field restricted to one parity, sites ascending, 12 entries per site.
DenseVector to_dense_parity(const BlockSpinorField& full, const LatticeGeometry& geom, Parity p,
                            int i);

/// Number of nonzero 12x12 blocks in block-row `site` of D.
int nonzero_blocks_in_row(const DenseMatrix& d, std::size_t site, std::size_t n_sites);

}  // namespace lqml::oracle
