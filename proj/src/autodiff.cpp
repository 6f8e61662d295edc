#include "gkpqec/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace gkpqec::ad {

namespace {

void check(bool ok, const char* what) {
  if (!ok) throw std::logic_error(std::string("tape misuse: ") + what);
}

MatrixXd kron_real(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

int Tape::push(Node n) {
  value_bytes_ += sizeof(double) * std::size_t(n.value.size());
  nodes_.push_back(std::move(n));
  return int(nodes_.size()) - 1;
}

int Tape::constant(const MatrixXd& v) {
  Node n;
  n.op = Op::kConst;
  n.value = v;
  return push(std::move(n));
}

int Tape::parameter(const MatrixXd& v) {
  Node n;
  n.op = Op::kParam;
  n.value = v;
  n.needs_grad = true;
  return push(std::move(n));
}

int Tape::add(int a, int b) {
  check(nodes_[a].value.rows() == nodes_[b].value.rows() &&
            nodes_[a].value.cols() == nodes_[b].value.cols(),
        "add shape mismatch");
  Node n;
  n.op = Op::kAdd;
  n.a = a;
  n.b = b;
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  n.value = nodes_[a].value + nodes_[b].value;
  return push(std::move(n));
}

int Tape::sub(int a, int b) {
  check(nodes_[a].value.rows() == nodes_[b].value.rows() &&
            nodes_[a].value.cols() == nodes_[b].value.cols(),
        "sub shape mismatch");
  Node n;
  n.op = Op::kSub;
  n.a = a;
  n.b = b;
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  n.value = nodes_[a].value - nodes_[b].value;
  return push(std::move(n));
}

int Tape::neg(int a) {
  Node n;
  n.op = Op::kNeg;
  n.a = a;
  n.needs_grad = nodes_[a].needs_grad;
  n.value = -nodes_[a].value;
  return push(std::move(n));
}

int Tape::axpy(int a, int b, double c) {
  check(nodes_[a].value.rows() == nodes_[b].value.rows() &&
            nodes_[a].value.cols() == nodes_[b].value.cols(),
        "axpy shape mismatch");
  Node n;
  n.op = Op::kAxpy;
  n.a = a;
  n.b = b;
  n.c = c;
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  n.value = nodes_[a].value + c * nodes_[b].value;
  return push(std::move(n));
}

int Tape::scale(int a, double c) {
  Node n;
  n.op = Op::kScale;
  n.a = a;
  n.c = c;
  n.needs_grad = nodes_[a].needs_grad;
  n.value = c * nodes_[a].value;
  return push(std::move(n));
}

int Tape::matmul(int a, int b) {
  check(nodes_[a].value.cols() == nodes_[b].value.rows(), "matmul shape mismatch");
  Node n;
  n.op = Op::kMatMul;
  n.a = a;
  n.b = b;
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  n.value.noalias() = nodes_[a].value * nodes_[b].value;
  return push(std::move(n));
}

int Tape::hadamard(int a, int b) {
  check(nodes_[a].value.rows() == nodes_[b].value.rows() &&
            nodes_[a].value.cols() == nodes_[b].value.cols(),
        "hadamard shape mismatch");
  Node n;
  n.op = Op::kHadamard;
  n.a = a;
  n.b = b;
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  n.value = nodes_[a].value.cwiseProduct(nodes_[b].value);
  return push(std::move(n));
}

int Tape::scalar_mul(int s, int m) {
  check(nodes_[s].value.size() == 1, "scalar_mul needs a 1x1 scalar");
  Node n;
  n.op = Op::kScalarMul;
  n.a = s;
  n.b = m;
  n.needs_grad = nodes_[s].needs_grad || nodes_[m].needs_grad;
  n.value = nodes_[s].value(0, 0) * nodes_[m].value;
  return push(std::move(n));
}

int Tape::scalar_div(int m, int s) {
  check(nodes_[s].value.size() == 1, "scalar_div needs a 1x1 scalar");
  Node n;
  n.op = Op::kScalarDiv;
  n.a = m;
  n.b = s;
  n.needs_grad = nodes_[m].needs_grad || nodes_[s].needs_grad;
  n.value = nodes_[m].value / nodes_[s].value(0, 0);
  return push(std::move(n));
}

int Tape::transpose(int a) {
  Node n;
  n.op = Op::kTranspose;
  n.a = a;
  n.needs_grad = nodes_[a].needs_grad;
  n.value = nodes_[a].value.transpose();
  return push(std::move(n));
}

int Tape::tanh_(int a) {
  Node n;
  n.op = Op::kTanh;
  n.a = a;
  n.needs_grad = nodes_[a].needs_grad;
  n.value = nodes_[a].value.array().tanh();
  return push(std::move(n));
}

int Tape::sigmoid_(int a) {
  Node n;
  n.op = Op::kSigmoid;
  n.a = a;
  n.needs_grad = nodes_[a].needs_grad;
  n.value = nodes_[a].value.unaryExpr([](double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  return push(std::move(n));
}

int Tape::sin_(int a) {
  Node n;
  n.op = Op::kSin;
  n.a = a;
  n.needs_grad = nodes_[a].needs_grad;
  n.value = nodes_[a].value.array().sin();
  return push(std::move(n));
}

int Tape::cos_(int a) {
  Node n;
  n.op = Op::kCos;
  n.a = a;
  n.needs_grad = nodes_[a].needs_grad;
  n.value = nodes_[a].value.array().cos();
  return push(std::move(n));
}

int Tape::log_(int a) {
  Node n;
  n.op = Op::kLog;
  n.a = a;
  n.needs_grad = nodes_[a].needs_grad;
  n.value = nodes_[a].value.array().log();
  return push(std::move(n));
}

int Tape::trace(int a) {
  check(nodes_[a].value.rows() == nodes_[a].value.cols(), "trace needs square");
  Node n;
  n.op = Op::kTrace;
  n.a = a;
  n.needs_grad = nodes_[a].needs_grad;
  n.value = MatrixXd::Constant(1, 1, nodes_[a].value.trace());
  return push(std::move(n));
}

int Tape::sum(int a) {
  Node n;
  n.op = Op::kSum;
  n.a = a;
  n.needs_grad = nodes_[a].needs_grad;
  n.value = MatrixXd::Constant(1, 1, nodes_[a].value.sum());
  return push(std::move(n));
}

int Tape::entry(int a, int r, int c) {
  check(r >= 0 && r < nodes_[a].value.rows() && c >= 0 && c < nodes_[a].value.cols(),
        "entry out of range");
  Node n;
  n.op = Op::kEntry;
  n.a = a;
  n.idx = {r, c};
  n.needs_grad = nodes_[a].needs_grad;
  n.value = MatrixXd::Constant(1, 1, nodes_[a].value(r, c));
  return push(std::move(n));
}

int Tape::from_entries(int rows, int cols,
                       const std::vector<std::tuple<int, int, int>>& entries) {
  Node n;
  n.op = Op::kFromEntries;
  n.value = MatrixXd::Zero(rows, cols);
  n.idx.reserve(entries.size() * 3);
  for (const auto& [r, c, id] : entries) {
    check(nodes_[id].value.size() == 1, "from_entries needs 1x1 inputs");
    check(r >= 0 && r < rows && c >= 0 && c < cols, "from_entries out of range");
    n.value(r, c) += nodes_[id].value(0, 0);
    n.needs_grad = n.needs_grad || nodes_[id].needs_grad;
    n.idx.push_back(r);
    n.idx.push_back(c);
    n.idx.push_back(id);
  }
  return push(std::move(n));
}

int Tape::kron_const_left(const MatrixXd& k, int b) {
  Node n;
  n.op = Op::kKronL;
  n.b = b;
  n.aux = k;
  n.needs_grad = nodes_[b].needs_grad;
  n.value = kron_real(k, nodes_[b].value);
  return push(std::move(n));
}

int Tape::kron_const_right(int a, const MatrixXd& k) {
  Node n;
  n.op = Op::kKronR;
  n.a = a;
  n.aux = k;
  n.needs_grad = nodes_[a].needs_grad;
  n.value = kron_real(nodes_[a].value, k);
  return push(std::move(n));
}

int Tape::qubit_block(int a, int rq, int cq) {
  const auto& v = nodes_[a].value;
  check(v.rows() == v.cols() && v.rows() % 2 == 0, "qubit_block needs joint matrix");
  const int n = int(v.rows()) / 2;
  Node out;
  out.op = Op::kQubitBlock;
  out.a = a;
  out.idx = {rq, cq};
  out.needs_grad = nodes_[a].needs_grad;
  out.value.resize(n, n);
  for (int jc = 0; jc < n; ++jc)
    for (int ic = 0; ic < n; ++ic)
      out.value(ic, jc) = v(ic * 2 + rq, jc * 2 + cq);
  return push(std::move(out));
}

int Tape::qubit_assemble(int n_fock,
                         const std::vector<std::tuple<int, int, int>>& blocks) {
  Node out;
  out.op = Op::kQubitAssemble;
  out.idx.push_back(n_fock);
  out.value = MatrixXd::Zero(2 * n_fock, 2 * n_fock);
  for (const auto& [rq, cq, id] : blocks) {
    const auto& b = nodes_[id].value;
    check(b.rows() == n_fock && b.cols() == n_fock, "qubit_assemble block shape");
    out.needs_grad = out.needs_grad || nodes_[id].needs_grad;
    for (int jc = 0; jc < n_fock; ++jc)
      for (int ic = 0; ic < n_fock; ++ic)
        out.value(ic * 2 + rq, jc * 2 + cq) += b(ic, jc);
    out.idx.push_back(rq);
    out.idx.push_back(cq);
    out.idx.push_back(id);
  }
  return push(std::move(out));
}

int Tape::pair_permute(int a, int n_fock, bool to_pair) {
  const auto& v = nodes_[a].value;
  Node out;
  out.op = Op::kPairPermute;
  out.a = a;
  out.idx = {n_fock, to_pair ? 1 : 0};
  out.needs_grad = nodes_[a].needs_grad;
  const int n = n_fock;
  if (to_pair) {
    check(v.rows() == 2 * n && v.cols() == 2 * n, "pair_permute joint shape");
    out.value.resize(n * n, 4);
    for (int jc = 0; jc < n; ++jc)
      for (int ic = 0; ic < n; ++ic)
        for (int jq = 0; jq < 2; ++jq)
          for (int iq = 0; iq < 2; ++iq)
            out.value(ic + jc * n, iq + jq * 2) = v(ic * 2 + iq, jc * 2 + jq);
  } else {
    check(v.rows() == n * n && v.cols() == 4, "pair_permute pair shape");
    out.value.resize(2 * n, 2 * n);
    for (int jc = 0; jc < n; ++jc)
      for (int ic = 0; ic < n; ++ic)
        for (int jq = 0; jq < 2; ++jq)
          for (int iq = 0; iq < 2; ++iq)
            out.value(ic * 2 + iq, jc * 2 + jq) = v(ic + jc * n, iq + jq * 2);
  }
  return push(std::move(out));
}

void Tape::accumulate(int id, const MatrixXd& g) {
  if (!nodes_[id].needs_grad) return;
  MatrixXd& slot = grads_[id];
  if (slot.size() == 0)
    slot = g;
  else
    slot += g;
}

void Tape::backward(int root) {
  check(root >= 0 && root < int(nodes_.size()), "backward root out of range");
  check(nodes_[root].value.size() == 1, "backward root must be 1x1");
  grads_.assign(nodes_.size(), MatrixXd());
  if (!nodes_[root].needs_grad) return;
  grads_[root] = MatrixXd::Constant(1, 1, 1.0);

  for (int i = root; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.needs_grad || grads_[i].size() == 0) continue;
    const MatrixXd& g = grads_[i];
    switch (n.op) {
      case Op::kConst:
      case Op::kParam:
        break;
      case Op::kAdd:
        accumulate(n.a, g);
        accumulate(n.b, g);
        break;
      case Op::kSub:
        accumulate(n.a, g);
        accumulate(n.b, -g);
        break;
      case Op::kNeg:
        accumulate(n.a, -g);
        break;
      case Op::kAxpy:
        accumulate(n.a, g);
        accumulate(n.b, n.c * g);
        break;
      case Op::kScale:
        accumulate(n.a, n.c * g);
        break;
      case Op::kMatMul:
        if (nodes_[n.a].needs_grad)
          accumulate(n.a, g * nodes_[n.b].value.transpose());
        if (nodes_[n.b].needs_grad)
          accumulate(n.b, nodes_[n.a].value.transpose() * g);
        break;
      case Op::kHadamard:
        if (nodes_[n.a].needs_grad) accumulate(n.a, g.cwiseProduct(nodes_[n.b].value));
        if (nodes_[n.b].needs_grad) accumulate(n.b, g.cwiseProduct(nodes_[n.a].value));
        break;
      case Op::kScalarMul:
        if (nodes_[n.a].needs_grad)
          accumulate(n.a,
                     MatrixXd::Constant(1, 1, g.cwiseProduct(nodes_[n.b].value).sum()));
        if (nodes_[n.b].needs_grad) accumulate(n.b, nodes_[n.a].value(0, 0) * g);
        break;
      case Op::kScalarDiv: {
        const double s = nodes_[n.b].value(0, 0);
        if (nodes_[n.a].needs_grad) accumulate(n.a, g / s);
        if (nodes_[n.b].needs_grad)
          accumulate(n.b, MatrixXd::Constant(
                              1, 1, -g.cwiseProduct(nodes_[n.a].value).sum() / (s * s)));
        break;
      }
      case Op::kTranspose:
        accumulate(n.a, g.transpose());
        break;
      case Op::kTanh:
        accumulate(n.a, g.cwiseProduct(
                            (1.0 - n.value.array().square()).matrix()));
        break;
      case Op::kSigmoid:
        accumulate(n.a, g.cwiseProduct(
                            (n.value.array() * (1.0 - n.value.array())).matrix()));
        break;
      case Op::kSin:
        accumulate(n.a, g.cwiseProduct(nodes_[n.a].value.array().cos().matrix()));
        break;
      case Op::kCos:
        accumulate(n.a, -g.cwiseProduct(nodes_[n.a].value.array().sin().matrix()));
        break;
      case Op::kLog:
        accumulate(n.a, g.cwiseQuotient(nodes_[n.a].value));
        break;
      case Op::kTrace:
        accumulate(n.a, MatrixXd(g(0, 0) * MatrixXd::Identity(nodes_[n.a].value.rows(),
                                                              nodes_[n.a].value.cols())));
        break;
      case Op::kSum:
        accumulate(n.a, MatrixXd(MatrixXd::Constant(nodes_[n.a].value.rows(),
                                                    nodes_[n.a].value.cols(), g(0, 0))));
        break;
      case Op::kEntry: {
        MatrixXd ga = MatrixXd::Zero(nodes_[n.a].value.rows(), nodes_[n.a].value.cols());
        ga(n.idx[0], n.idx[1]) = g(0, 0);
        accumulate(n.a, ga);
        break;
      }
      case Op::kFromEntries:
        for (std::size_t k = 0; k < n.idx.size(); k += 3) {
          const int id = n.idx[k + 2];
          if (nodes_[id].needs_grad)
            accumulate(id, MatrixXd::Constant(1, 1, g(n.idx[k], n.idx[k + 1])));
        }
        break;
      case Op::kKronL: {
        const MatrixXd& k = n.aux;
        const auto br = nodes_[n.b].value.rows(), bc = nodes_[n.b].value.cols();
        MatrixXd gb = MatrixXd::Zero(br, bc);
        for (Eigen::Index i = 0; i < k.rows(); ++i)
          for (Eigen::Index j = 0; j < k.cols(); ++j)
            if (k(i, j) != 0.0) gb += k(i, j) * g.block(i * br, j * bc, br, bc);
        accumulate(n.b, gb);
        break;
      }
      case Op::kKronR: {
        const MatrixXd& k = n.aux;
        const auto ar = nodes_[n.a].value.rows(), ac = nodes_[n.a].value.cols();
        MatrixXd ga(ar, ac);
        for (Eigen::Index i = 0; i < ar; ++i)
          for (Eigen::Index j = 0; j < ac; ++j)
            ga(i, j) =
                g.block(i * k.rows(), j * k.cols(), k.rows(), k.cols()).cwiseProduct(k).sum();
        accumulate(n.a, ga);
        break;
      }
      case Op::kQubitBlock: {
        const int nn = int(n.value.rows());
        MatrixXd ga = MatrixXd::Zero(2 * nn, 2 * nn);
        for (int jc = 0; jc < nn; ++jc)
          for (int ic = 0; ic < nn; ++ic)
            ga(ic * 2 + n.idx[0], jc * 2 + n.idx[1]) = g(ic, jc);
        accumulate(n.a, ga);
        break;
      }
      case Op::kQubitAssemble: {
        const int nn = n.idx[0];
        for (std::size_t k = 1; k < n.idx.size(); k += 3) {
          const int rq = n.idx[k], cq = n.idx[k + 1], id = n.idx[k + 2];
          if (!nodes_[id].needs_grad) continue;
          MatrixXd gb(nn, nn);
          for (int jc = 0; jc < nn; ++jc)
            for (int ic = 0; ic < nn; ++ic)
              gb(ic, jc) = g(ic * 2 + rq, jc * 2 + cq);
          accumulate(id, gb);
        }
        break;
      }
      case Op::kPairPermute: {
        const int nn = n.idx[0];
        const bool to_pair = n.idx[1] != 0;
        MatrixXd ga;
        if (to_pair) {
          ga.resize(2 * nn, 2 * nn);
          for (int jc = 0; jc < nn; ++jc)
            for (int ic = 0; ic < nn; ++ic)
              for (int jq = 0; jq < 2; ++jq)
                for (int iq = 0; iq < 2; ++iq)
                  ga(ic * 2 + iq, jc * 2 + jq) = g(ic + jc * nn, iq + jq * 2);
        } else {
          ga.resize(nn * nn, 4);
          for (int jc = 0; jc < nn; ++jc)
            for (int ic = 0; ic < nn; ++ic)
              for (int jq = 0; jq < 2; ++jq)
                for (int iq = 0; iq < 2; ++iq)
                  ga(ic + jc * nn, iq + jq * 2) = g(ic * 2 + iq, jc * 2 + jq);
        }
        accumulate(n.a, ga);
        break;
      }
    }
    // Intermediate adjoints are dropped once consumed; parameter (and root)
    // adjoints stay readable after the pass.
    if (i != root && n.op != Op::kParam) grads_[i].resize(0, 0);
  }
}

Var constant(Tape& t, const MatrixXd& v) { return {&t, t.constant(v)}; }
Var parameter(Tape& t, const MatrixXd& v) { return {&t, t.parameter(v)}; }
Var scalar(Tape& t, double v) { return {&t, t.constant(MatrixXd::Constant(1, 1, v))}; }

Var operator+(Var a, Var b) { return {a.tape, a.tape->add(a.id, b.id)}; }
Var operator-(Var a, Var b) { return {a.tape, a.tape->sub(a.id, b.id)}; }
Var operator-(Var a) { return {a.tape, a.tape->neg(a.id)}; }

Var operator*(Var a, Var b) {
  Tape& t = *a.tape;
  const bool sa = t.value(a.id).size() == 1;
  const bool sb = t.value(b.id).size() == 1;
  if (sa && !sb) return {&t, t.scalar_mul(a.id, b.id)};
  if (sb && !sa) return {&t, t.scalar_mul(b.id, a.id)};
  return {&t, t.matmul(a.id, b.id)};
}

Var operator*(double c, Var a) { return {a.tape, a.tape->scale(a.id, c)}; }
Var hadamard(Var a, Var b) { return {a.tape, a.tape->hadamard(a.id, b.id)}; }
Var axpy(Var a, Var b, double c) { return {a.tape, a.tape->axpy(a.id, b.id, c)}; }
Var scalar_div(Var m, Var s) { return {m.tape, m.tape->scalar_div(m.id, s.id)}; }
Var transpose(Var a) { return {a.tape, a.tape->transpose(a.id)}; }
Var tanh(Var a) { return {a.tape, a.tape->tanh_(a.id)}; }
Var sigmoid(Var a) { return {a.tape, a.tape->sigmoid_(a.id)}; }
Var sin(Var a) { return {a.tape, a.tape->sin_(a.id)}; }
Var cos(Var a) { return {a.tape, a.tape->cos_(a.id)}; }
Var log(Var a) { return {a.tape, a.tape->log_(a.id)}; }
Var trace(Var a) { return {a.tape, a.tape->trace(a.id)}; }
Var sum(Var a) { return {a.tape, a.tape->sum(a.id)}; }
Var entry(Var a, int r, int c) { return {a.tape, a.tape->entry(a.id, r, c)}; }
Var detach(Var a) { return {a.tape, a.tape->constant(a.value())}; }

CVar cconstant(Tape& t, const MatrixXcd& v) {
  return {constant(t, v.real()), constant(t, v.imag())};
}

MatrixXcd cvalue(const CVar& a) {
  return a.re.value().cast<Complex>() + Complex(0, 1) * a.im.value().cast<Complex>();
}

CVar cadd(CVar a, CVar b) { return {a.re + b.re, a.im + b.im}; }
CVar csub(CVar a, CVar b) { return {a.re - b.re, a.im - b.im}; }
CVar cneg(CVar a) { return {-a.re, -a.im}; }

CVar cmul(CVar a, CVar b) {
  Tape& t = *a.re.tape;
  Var rr{&t, t.matmul(a.re.id, b.re.id)};
  Var ii{&t, t.matmul(a.im.id, b.im.id)};
  Var ri{&t, t.matmul(a.re.id, b.im.id)};
  Var ir{&t, t.matmul(a.im.id, b.re.id)};
  return {rr - ii, ri + ir};
}

CVar cscale(CVar a, Complex c) {
  if (c.imag() == 0.0) return {c.real() * a.re, c.real() * a.im};
  if (c.real() == 0.0) return {-c.imag() * a.im, c.imag() * a.re};
  return {axpy({a.re.tape, a.re.tape->scale(a.re.id, c.real())}, a.im, -c.imag()),
          axpy({a.im.tape, a.im.tape->scale(a.im.id, c.real())}, a.re, c.imag())};
}

CVar cscalar_mul(Var s, CVar m) {
  Tape& t = *s.tape;
  return {{&t, t.scalar_mul(s.id, m.re.id)}, {&t, t.scalar_mul(s.id, m.im.id)}};
}

CVar cscalar_div(CVar m, Var s) {
  return {scalar_div(m.re, s), scalar_div(m.im, s)};
}

CVar cadjoint(CVar a) { return {transpose(a.re), -transpose(a.im)}; }

CVar ckron_const_left(const MatrixXcd& k, CVar b) {
  Tape& t = *b.re.tape;
  const MatrixXd kr = k.real(), ki = k.imag();
  const bool has_im = !ki.isZero(0.0);
  Var rr{&t, t.kron_const_left(kr, b.re.id)};
  Var rim{&t, t.kron_const_left(kr, b.im.id)};
  if (!has_im) return {rr, rim};
  Var iim{&t, t.kron_const_left(ki, b.im.id)};
  Var ire{&t, t.kron_const_left(ki, b.re.id)};
  return {rr - iim, rim + ire};
}

CVar ckron_const_right(CVar a, const MatrixXcd& k) {
  Tape& t = *a.re.tape;
  const MatrixXd kr = k.real(), ki = k.imag();
  const bool has_im = !ki.isZero(0.0);
  Var rr{&t, t.kron_const_right(a.re.id, kr)};
  Var rim{&t, t.kron_const_right(a.im.id, kr)};
  if (!has_im) return {rr, rim};
  Var iim{&t, t.kron_const_right(a.im.id, ki)};
  Var ire{&t, t.kron_const_right(a.re.id, ki)};
  return {rr - iim, rim + ire};
}

CVar cqubit_block(CVar a, int rq, int cq) {
  Tape& t = *a.re.tape;
  return {{&t, t.qubit_block(a.re.id, rq, cq)}, {&t, t.qubit_block(a.im.id, rq, cq)}};
}

CVar cqubit_assemble(int n_fock,
                     const std::vector<std::tuple<int, int, CVar>>& blocks) {
  Tape* t = nullptr;
  std::vector<std::tuple<int, int, int>> re, im;
  for (const auto& [rq, cq, b] : blocks) {
    t = b.re.tape;
    re.emplace_back(rq, cq, b.re.id);
    im.emplace_back(rq, cq, b.im.id);
  }
  return {{t, t->qubit_assemble(n_fock, re)}, {t, t->qubit_assemble(n_fock, im)}};
}

CVar cpair_permute(CVar a, int n_fock, bool to_pair) {
  Tape& t = *a.re.tape;
  return {{&t, t.pair_permute(a.re.id, n_fock, to_pair)},
          {&t, t.pair_permute(a.im.id, n_fock, to_pair)}};
}

Var creal_trace(CVar a) { return trace(a.re); }

CVar conjugate(CVar u, CVar rho) { return cmul(cmul(u, rho), cadjoint(u)); }

CVar cmatexp(CVar z) {
  Tape& t = *z.re.tape;
  const Eigen::Index d = z.re.value().rows();
  check(d == z.re.value().cols(), "cmatexp needs square input");

  const double norm1 =
      (z.re.value().cwiseAbs() + z.im.value().cwiseAbs()).colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > 1.0) s = int(std::ceil(std::log2(norm1)));

  CVar x = z;
  if (s > 0) x = cscale(z, std::ldexp(1.0, -s));

  CVar ident = cconstant(t, MatrixXcd::Identity(d, d));
  CVar acc = ident;
  const int order = 18;
  for (int k = order; k >= 1; --k)
    acc = cadd(ident, cscale(cmul(x, acc), 1.0 / double(k)));
  for (int k = 0; k < s; ++k) acc = cmul(acc, acc);
  return acc;
}

Var pure_state_overlap(const VectorXcd& psi, CVar rho) {
  Tape& t = *rho.re.tape;
  CVar row = cconstant(t, psi.adjoint());
  CVar col = cconstant(t, psi);
  return creal_trace(cmul(cmul(row, rho), col));
}

}  // namespace gkpqec::ad
