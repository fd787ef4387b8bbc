#pragma once

#include <complex>

#include <Eigen/SparseCore>

#include "gridbench/grid/case.hpp"
#include "gridbench/grid/topology.hpp"

namespace gridbench::grid {

using Complex = std::complex<double>;
using ComplexSparse = Eigen::SparseMatrix<Complex>;

/// Pi-model stamp of one branch: Y[or,or] += ff, Y[or,ex] += ft,
/// Y[ex,or] += tf, Y[ex,ex] += tt.
struct LineStamp {
  Complex ff, ft, tf, tt;
};

/// Throws ValidationError when R = X = 0.
LineStamp line_stamp(const Line& line);

/// Nodal admittance matrix over the energized nodes of a topology, with
/// Y[k,k] = sum of incident series + charging admittances + shunts and
/// Y[k,m] = -(series admittance) summed over parallel lines.
struct AdmittanceMatrix {
  NodeMap nodes;
  ComplexSparse y;

  Eigen::Index size() const noexcept { return y.rows(); }
};

/// Builds the admittance matrix. Contributions are accumulated line by line
/// in index order followed by shunts, so each entry's floating-point value is
/// reproducible by ybus_entry().
AdmittanceMatrix build_ybus(const GridCase& grid_case, const Topology& topo);

/// Recomputes a single entry of build_ybus(grid_case, topo) bit-exactly,
/// with k and m numbered by `nodes` (which may be a superset of the
/// topology's own node map).
Complex ybus_entry(const GridCase& grid_case, const Topology& topo, const NodeMap& nodes, int k, int m);

}  // namespace gridbench::grid
