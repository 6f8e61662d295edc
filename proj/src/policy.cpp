#include "gkpqec/policy.hpp"

#include <cmath>
#include <fstream>

namespace gkpqec {

namespace {

MatrixXd uniform_matrix(int rows, int cols, std::mt19937& rng, double range) {
  std::uniform_real_distribution<double> u(-range, range);
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

VectorXd sigmoid_vec(const VectorXd& x) {
  return x.unaryExpr([](double v) {
    if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

nlohmann::json matrix_to_json(const MatrixXd& m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data;
  data.reserve(std::size_t(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index jx = 0; jx < m.cols(); ++jx) data.push_back(m(i, jx));
  j["data"] = std::move(data);
  return j;
}

MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw ConfigError("policy weight entry missing rows/cols/data");
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || data.size() != std::size_t(rows) * std::size_t(cols))
    throw ConfigError("policy weight entry has inconsistent dimensions");
  MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (int i = 0; i < rows; ++i)
    for (int jx = 0; jx < cols; ++jx) m(i, jx) = data[k++];
  return m;
}

// Input sequence fed to recurrent policies: start token 0, then the history.
double last_input(const std::vector<int>& outcomes) {
  return outcomes.empty() ? 0.0 : double(outcomes.back());
}

constexpr int kGruUnits = 10;
constexpr int kDenseUnits = 256;
constexpr int kOutputs = 15;

}  // namespace

PolicyKind policy_kind_from_name(const std::string& name) {
  if (name == "static" || name == "standard") return PolicyKind::kStatic;
  if (name == "lookup") return PolicyKind::kLookup;
  if (name == "fnn") return PolicyKind::kFnn;
  if (name == "gru" || name == "rnn") return PolicyKind::kGru;
  throw ConfigError("unknown policy kind '" + name +
                    "' (expected static, lookup, fnn or gru)");
}

std::string policy_kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kStatic: return "static";
    case PolicyKind::kLookup: return "lookup";
    case PolicyKind::kFnn: return "fnn";
    case PolicyKind::kGru: return "gru";
  }
  return "?";
}

std::array<double, 15> FeedbackPolicy::output_scale() {
  std::array<double, 15> s;
  s.fill(2.0);
  s[14] = 1.0;  // frame-rotation correction stays within [-1, 1]
  return s;
}

FeedbackPolicy FeedbackPolicy::make_static() {
  FeedbackPolicy p;
  p.kind_ = PolicyKind::kStatic;
  return p;
}

FeedbackPolicy FeedbackPolicy::make_lookup(int depth_half_cycles, std::mt19937& rng,
                                           double init_range) {
  if (depth_half_cycles < 1 || depth_half_cycles > 20)
    throw ConfigError("lookup depth must lie in [1, 20] half-cycles");
  FeedbackPolicy p;
  p.kind_ = PolicyKind::kLookup;
  p.depth_ = depth_half_cycles;
  const int nodes = (1 << depth_half_cycles) - 1;
  p.weights_.emplace_back("table",
                          init_range == 0.0
                              ? MatrixXd(MatrixXd::Zero(nodes, kOutputs))
                              : uniform_matrix(nodes, kOutputs, rng, init_range));
  return p;
}

FeedbackPolicy FeedbackPolicy::make_fnn(std::mt19937& rng, double init_range,
                                        double bias_init) {
  FeedbackPolicy p;
  p.kind_ = PolicyKind::kFnn;
  auto bias = [&](int n) { return MatrixXd(MatrixXd::Constant(n, 1, bias_init)); };
  p.weights_.emplace_back("W1", uniform_matrix(kDenseUnits, 1, rng, init_range));
  p.weights_.emplace_back("b1", bias(kDenseUnits));
  p.weights_.emplace_back("W2", uniform_matrix(kDenseUnits, kDenseUnits, rng, init_range));
  p.weights_.emplace_back("b2", bias(kDenseUnits));
  p.weights_.emplace_back("W3", uniform_matrix(kOutputs, kDenseUnits, rng, init_range));
  p.weights_.emplace_back("b3", bias(kOutputs));
  return p;
}

FeedbackPolicy FeedbackPolicy::make_gru(std::mt19937& rng, double init_range,
                                        double bias_init) {
  FeedbackPolicy p;
  p.kind_ = PolicyKind::kGru;
  auto bias = [&](int n) { return MatrixXd(MatrixXd::Constant(n, 1, bias_init)); };
  for (const char* gate : {"z", "r", "h"}) {
    p.weights_.emplace_back(std::string("W") + gate,
                            uniform_matrix(kGruUnits, 1, rng, init_range));
    p.weights_.emplace_back(std::string("U") + gate,
                            uniform_matrix(kGruUnits, kGruUnits, rng, init_range));
    p.weights_.emplace_back(std::string("b") + gate, bias(kGruUnits));
  }
  p.weights_.emplace_back("W1", uniform_matrix(kDenseUnits, kGruUnits, rng, init_range));
  p.weights_.emplace_back("b1", bias(kDenseUnits));
  p.weights_.emplace_back("W2", uniform_matrix(kDenseUnits, kDenseUnits, rng, init_range));
  p.weights_.emplace_back("b2", bias(kDenseUnits));
  p.weights_.emplace_back("W3", uniform_matrix(kOutputs, kDenseUnits, rng, init_range));
  p.weights_.emplace_back("b3", bias(kOutputs));
  return p;
}

const MatrixXd& FeedbackPolicy::weight(const std::string& name) const {
  for (const auto& [n, m] : weights_)
    if (n == name) return m;
  throw ConfigError("policy is missing weight '" + name + "'");
}

int FeedbackPolicy::lookup_node(const std::vector<int>& outcomes) const {
  const int level = std::min<int>(int(outcomes.size()), depth_ - 1);
  int path = 0;
  for (int j = 0; j < level; ++j)
    path = path * 2 + (outcomes[outcomes.size() - level + j] < 0 ? 1 : 0);
  return (1 << level) - 1 + path;
}

HalfCycleParams FeedbackPolicy::query(const std::vector<int>& outcomes) const {
  const auto scale = output_scale();
  const auto base = HalfCycleParams::standard().flatten();
  std::array<double, 15> out = base;

  switch (kind_) {
    case PolicyKind::kStatic:
      break;
    case PolicyKind::kLookup: {
      const int node = lookup_node(outcomes);
      const MatrixXd& table = weight("table");
      for (int i = 0; i < kOutputs; ++i)
        out[i] = base[i] + scale[i] * std::tanh(table(node, i));
      break;
    }
    case PolicyKind::kFnn: {
      VectorXd x(1);
      x << last_input(outcomes);
      const VectorXd y1 = (weight("W1") * x + weight("b1")).array().tanh();
      const VectorXd y2 = (weight("W2") * y1 + weight("b2")).array().tanh();
      const VectorXd d = (weight("W3") * y2 + weight("b3")).array().tanh();
      for (int i = 0; i < kOutputs; ++i) out[i] = base[i] + scale[i] * d(i);
      break;
    }
    case PolicyKind::kGru: {
      VectorXd h = VectorXd::Zero(kGruUnits);
      VectorXd x(1);
      for (std::size_t step = 0; step <= outcomes.size(); ++step) {
        x << (step == 0 ? 0.0 : double(outcomes[step - 1]));
        const VectorXd z =
            sigmoid_vec(weight("Wz") * x + weight("Uz") * h + weight("bz"));
        const VectorXd r =
            sigmoid_vec(weight("Wr") * x + weight("Ur") * h + weight("br"));
        const VectorXd hc =
            (weight("Wh") * x + weight("Uh") * (r.cwiseProduct(h)) + weight("bh"))
                .array()
                .tanh();
        h = z.cwiseProduct(h) + (VectorXd::Ones(kGruUnits) - z).cwiseProduct(hc);
      }
      const VectorXd y1 = (weight("W1") * h + weight("b1")).array().tanh();
      const VectorXd y2 = (weight("W2") * y1 + weight("b2")).array().tanh();
      const VectorXd d = (weight("W3") * y2 + weight("b3")).array().tanh();
      for (int i = 0; i < kOutputs; ++i) out[i] = base[i] + scale[i] * d(i);
      break;
    }
  }
  return HalfCycleParams::unflatten(out);
}

void FeedbackPolicy::begin_taped(ad::Tape& tape) {
  tape_ = &tape;
  taped_ids_.clear();
  taped_ids_.reserve(weights_.size());
  for (const auto& [name, m] : weights_) taped_ids_.push_back(tape.parameter(m));
}

std::array<ad::Var, 15> FeedbackPolicy::query_taped(
    const std::vector<int>& outcomes) const {
  if (tape_ == nullptr)
    throw std::logic_error("query_taped called without begin_taped");
  ad::Tape& t = *tape_;
  const auto scale = output_scale();
  const auto base = HalfCycleParams::standard().flatten();

  auto w = [&](const std::string& name) -> ad::Var {
    for (std::size_t i = 0; i < weights_.size(); ++i)
      if (weights_[i].first == name) return {&t, taped_ids_[i]};
    throw ConfigError("policy is missing weight '" + name + "'");
  };

  std::array<ad::Var, 15> out;
  auto finish = [&](ad::Var d) {
    for (int i = 0; i < kOutputs; ++i)
      out[i] = ad::axpy(ad::scalar(t, base[i]), ad::entry(d, i, 0), scale[i]);
  };

  switch (kind_) {
    case PolicyKind::kStatic: {
      for (int i = 0; i < kOutputs; ++i) out[i] = ad::scalar(t, base[i]);
      return out;
    }
    case PolicyKind::kLookup: {
      const int node = lookup_node(outcomes);
      ad::Var table = w("table");
      for (int i = 0; i < kOutputs; ++i)
        out[i] = ad::axpy(ad::scalar(t, base[i]),
                          ad::tanh(ad::entry(table, node, i)), scale[i]);
      return out;
    }
    case PolicyKind::kFnn: {
      ad::Var x = ad::constant(t, MatrixXd::Constant(1, 1, last_input(outcomes)));
      ad::Var y1 = ad::tanh(w("W1") * x + w("b1"));
      ad::Var y2 = ad::tanh(w("W2") * y1 + w("b2"));
      ad::Var d = ad::tanh(w("W3") * y2 + w("b3"));
      finish(d);
      return out;
    }
    case PolicyKind::kGru: {
      ad::Var h = ad::constant(t, MatrixXd::Zero(kGruUnits, 1));
      ad::Var ones = ad::constant(t, MatrixXd::Ones(kGruUnits, 1));
      for (std::size_t step = 0; step <= outcomes.size(); ++step) {
        const double xin = step == 0 ? 0.0 : double(outcomes[step - 1]);
        ad::Var x = ad::constant(t, MatrixXd::Constant(1, 1, xin));
        ad::Var z = ad::sigmoid(w("Wz") * x + w("Uz") * h + w("bz"));
        ad::Var r = ad::sigmoid(w("Wr") * x + w("Ur") * h + w("br"));
        ad::Var hc = ad::tanh(w("Wh") * x + w("Uh") * ad::hadamard(r, h) + w("bh"));
        h = ad::hadamard(z, h) + ad::hadamard(ones - z, hc);
      }
      ad::Var y1 = ad::tanh(w("W1") * h + w("b1"));
      ad::Var y2 = ad::tanh(w("W2") * y1 + w("b2"));
      ad::Var d = ad::tanh(w("W3") * y2 + w("b3"));
      finish(d);
      return out;
    }
  }
  throw std::logic_error("unreachable policy kind");
}

nlohmann::json FeedbackPolicy::to_json() const {
  nlohmann::json j;
  j["format"] = "gkpqec-policy-1";
  j["kind"] = policy_kind_name(kind_);
  if (kind_ == PolicyKind::kLookup) j["depth"] = depth_;
  // an array keeps the weight order stable through a round trip; a json
  // object would come back alphabetized
  nlohmann::json w = nlohmann::json::array();
  for (const auto& [name, m] : weights_) {
    nlohmann::json entry = matrix_to_json(m);
    entry["name"] = name;
    w.push_back(std::move(entry));
  }
  j["weights"] = std::move(w);
  return j;
}

FeedbackPolicy FeedbackPolicy::from_json(const nlohmann::json& j) {
  if (!j.contains("format") || j.at("format") != "gkpqec-policy-1")
    throw ConfigError("unrecognized policy checkpoint format");
  FeedbackPolicy p;
  p.kind_ = policy_kind_from_name(j.at("kind").get<std::string>());
  if (p.kind_ == PolicyKind::kLookup) {
    p.depth_ = j.at("depth").get<int>();
    if (p.depth_ < 1 || p.depth_ > 20)
      throw ConfigError("lookup depth must lie in [1, 20] half-cycles");
  }
  if (j.contains("weights")) {
    if (!j.at("weights").is_array())
      throw ConfigError("policy checkpoint weights must be an array");
    for (const auto& jm : j.at("weights")) {
      if (!jm.contains("name")) throw ConfigError("policy weight entry missing name");
      p.weights_.emplace_back(jm.at("name").get<std::string>(), matrix_from_json(jm));
    }
  }

  std::mt19937 dummy(0);
  FeedbackPolicy ref;
  switch (p.kind_) {
    case PolicyKind::kStatic:
      if (!p.weights_.empty()) throw ConfigError("static policy carries no weights");
      return p;
    case PolicyKind::kLookup: ref = make_lookup(p.depth_, dummy); break;
    case PolicyKind::kFnn: ref = make_fnn(dummy); break;
    case PolicyKind::kGru: ref = make_gru(dummy); break;
  }
  for (const auto& [name, m] : ref.weights_) {
    const MatrixXd& got = p.weight(name);
    if (got.rows() != m.rows() || got.cols() != m.cols())
      throw ConfigError("policy weight '" + name + "' has wrong shape");
  }
  if (p.weights_.size() != ref.weights_.size())
    throw ConfigError("policy checkpoint carries unexpected weights");
  return p;
}

void FeedbackPolicy::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << to_json().dump(2) << "\n";
}

FeedbackPolicy FeedbackPolicy::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open policy checkpoint '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("policy checkpoint '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

}  // namespace gkpqec
