#include "linbp/model.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "linbp/kernels.hpp"

namespace linbp {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Vec relu_mask(const Matrix& W, const Vec& x) {
  require(W.cols() == x.size(), "relu_mask: dimension mismatch");
  Vec z(W.rows());
  kernels::matvec(W.data(), W.rows(), W.cols(), x.data(), z.data());
  Vec m(W.rows());
  kernels::relu_mask(z.data(), m.data(), z.size());
  return m;
}

Vec two_layer_forward(const TwoLayerModel& m, const Vec& x) {
  require(m.W.cols() == x.size(), "two_layer_forward: x does not match W");
  require(m.V.cols() == m.W.rows(), "two_layer_forward: V does not match W");
  Vec hidden(m.d2());
  kernels::matvec(m.W.data(), m.d2(), m.d1(), x.data(), hidden.data());
  kernels::relu(hidden.data(), hidden.data(), hidden.size());
  Vec out(m.d3());
  kernels::matvec(m.V.data(), m.d3(), m.d2(), hidden.data(), out.data());
  return out;
}

Vec mlp_forward(const MlpModel& m, const Vec& x, ActivationTrace* trace) {
  require(!m.weights.empty(), "mlp_forward: empty model");
  require(m.input_dim() == x.size(), "mlp_forward: x does not match W_1");
  for (std::size_t i = 0; i + 1 < m.weights.size(); ++i)
    require(m.weights[i].cols() == m.weights[i + 1].rows(),
            "mlp_forward: weight dimensions do not chain");
  if (trace) {
    trace->pre.clear();
    trace->post.clear();
  }
  Vec act = x;
  Vec out;
  for (std::size_t i = 0; i < m.weights.size(); ++i) {
    const Matrix& w = m.weights[i];
    out.assign(w.cols(), 0.0);
    kernels::matvec_t(w.data(), w.rows(), w.cols(), act.data(), out.data());
    Vec post(out.size());
    kernels::relu(out.data(), post.data(), out.size());
    if (trace) {
      trace->pre.push_back(out);
      trace->post.push_back(post);
    }
    act = std::move(post);
  }
  return out;
}

Vec one_layer_forward(const Matrix& X, const Vec& w) {
  require(X.cols() == w.size(), "one_layer_forward: w does not match X");
  Vec out(X.rows());
  kernels::matvec(X.data(), X.rows(), X.cols(), w.data(), out.data());
  kernels::relu(out.data(), out.data(), out.size());
  return out;
}

void write_matrix_text(const Matrix& m, std::ostream& out) {
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[40];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      out << buf << (c + 1 < m.cols() ? ' ' : '\n');
    }
  }
}

Matrix read_matrix_text(std::istream& in) {
  std::size_t rows = 0, cols = 0;
  if (!(in >> rows >> cols))
    throw std::runtime_error("read_matrix_text: bad header");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!(in >> m.data()[i]))
      throw std::runtime_error("read_matrix_text: truncated data");
  return m;
}

void save_matrix(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_matrix: cannot open " + path);
  write_matrix_text(m, out);
  if (!out) throw std::runtime_error("save_matrix: write failed for " + path);
}

Matrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_matrix: cannot open " + path);
  return read_matrix_text(in);
}

}  // namespace linbp
