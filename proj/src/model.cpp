#include "subsel/model.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace subsel {

Index Instance::rowCount() const {
  Index m = 0;
  for (const auto& block : blocks) m += block.rows();
  return m;
}

Index Instance::blockColumnCount() const {
  Index n = 0;
  for (const auto& block : blocks) n += block.cols();
  return n;
}

std::vector<Index> Instance::rowSizes() const {
  std::vector<Index> sizes;
  for (const auto& block : blocks) sizes.push_back(block.rows());
  return sizes;
}

std::vector<Index> Instance::columnSizes() const {
  std::vector<Index> sizes;
  for (const auto& block : blocks) sizes.push_back(block.cols());
  return sizes;
}

RatMatrix Instance::denseMatrix() const {
  const Index m = rowCount();
  const Index n = blockColumnCount();
  RatMatrix M = RatMatrix::Zero(m, n + couplingCount());
  Index row = 0;
  Index col = 0;
  for (const auto& block : blocks) {
    M.block(row, col, block.rows(), block.cols()) = block;
    row += block.rows();
    col += block.cols();
  }
  for (Index l = 0; l < couplingCount(); ++l) M.col(n + l) = coupling[static_cast<std::size_t>(l)];
  return M;
}

std::vector<std::string> validate(const Instance& instance) {
  std::vector<std::string> violations;
  if (instance.blocks.empty()) violations.emplace_back("instance has no blocks");
  for (std::size_t i = 0; i < instance.blocks.size(); ++i) {
    if (instance.blocks[i].rows() < 1)
      violations.push_back("block " + std::to_string(i + 1) + " has no rows");
    if (instance.blocks[i].cols() < 1)
      violations.push_back("block " + std::to_string(i + 1) + " has no columns");
  }
  const Index m = instance.rowCount();
  if (instance.b.size() != m)
    violations.push_back("b length mismatch: expected " + std::to_string(m) + ", got " +
                         std::to_string(instance.b.size()));
  for (std::size_t l = 0; l < instance.coupling.size(); ++l)
    if (instance.coupling[l].size() != m)
      violations.push_back("coupling column " + std::to_string(l + 1) +
                           " length mismatch: expected " + std::to_string(m) + ", got " +
                           std::to_string(instance.coupling[l].size()));
  if (instance.intercept && instance.intercept->size() != m)
    violations.push_back("intercept length mismatch: expected " + std::to_string(m) + ", got " +
                         std::to_string(instance.intercept->size()));
  if (instance.sigma < 0) violations.emplace_back("sigma is negative");
  if (instance.sigma > instance.variableCount())
    violations.push_back("sigma exceeds variable count: sigma " + std::to_string(instance.sigma) +
                         " > d " + std::to_string(instance.variableCount()));
  return violations;
}

Rational objectiveOf(const Instance& instance, const RatVector& x, const Rational& mu) {
  RatVector residual = instance.denseMatrix() * x - instance.b;
  if (instance.intercept) residual += *instance.intercept * mu;
  return residual.squaredNorm();
}

Index ReducedProblem::blockColumnCount() const {
  Index n = 0;
  for (const auto& block : blocks) n += block.cols();
  return n;
}

std::vector<Index> ReducedProblem::rowSizes() const {
  std::vector<Index> sizes;
  for (const auto& block : blocks) sizes.push_back(block.rows());
  return sizes;
}

std::vector<int> ReducedProblem::columnSizes() const {
  std::vector<int> sizes;
  for (const auto& block : blocks) sizes.push_back(static_cast<int>(block.cols()));
  return sizes;
}

bool ReducedProblem::isDiagonal() const {
  return std::all_of(blocks.begin(), blocks.end(),
                     [](const RatMatrix& a) { return a.rows() == 1 && a.cols() == 1; });
}

RatMatrix ReducedProblem::lambdaMatrix() const {
  RatMatrix C(b.size(), lambdaDim());
  for (Index l = 0; l < lambdaDim(); ++l) C.col(l) = lambdaCols[static_cast<std::size_t>(l)];
  return C;
}

std::vector<RatMatrix> ReducedProblem::lambdaMatrixByBlock() const {
  const RatMatrix C = lambdaMatrix();
  std::vector<RatMatrix> out;
  Index row = 0;
  for (const auto& block : blocks) {
    out.emplace_back(C.middleRows(row, block.rows()));
    row += block.rows();
  }
  return out;
}

std::vector<RatVector> ReducedProblem::bByBlock() const {
  const auto sizes = rowSizes();
  return sliceByBlock<Rational>(b, sizes);
}

int AllocationVector::sum() const { return std::accumulate(j_.begin(), j_.end(), 0); }

std::string toString(const AllocationVector& j) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < j.size(); ++i) out << (i ? "," : "") << j[i];
  out << ')';
  return out.str();
}

BlockStructure BlockStructure::fromSizes(std::vector<int> sizes) {
  BlockStructure s;
  s.h = static_cast<int>(sizes.size());
  for (int n : sizes)
    if (n < 1) throw std::invalid_argument("block column counts must be positive");
  s.theta = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
  s.thetaBar = (s.theta - 1) * s.theta * (s.theta + 1) / 2;
  s.nVec = std::move(sizes);
  return s;
}

int BlockStructure::totalColumns() const { return std::accumulate(nVec.begin(), nVec.end(), 0); }

bool BlockStructure::feasible(const AllocationVector& j) const {
  if (j.size() != nVec.size()) return false;
  for (std::size_t i = 0; i < j.size(); ++i)
    if (j[i] < 0 || j[i] > nVec[i]) return false;
  return true;
}

Support Support::make(Range range, std::vector<int> indices, int bound) {
  std::sort(indices.begin(), indices.end());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= bound)
      throw std::invalid_argument("support index out of range");
    if (i > 0 && indices[i] == indices[i - 1])
      throw std::invalid_argument("support index repeated");
  }
  return Support{range, std::move(indices)};
}

std::vector<int> Solution::support() const {
  std::vector<int> out;
  for (Index i = 0; i < x.size(); ++i)
    if (x[i].sign() != 0) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace subsel
