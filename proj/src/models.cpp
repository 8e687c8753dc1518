// Copyright 2026 The vqmc authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vqmc/models.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace vqmc {

namespace {

void check_width(int n, const ConfigBatch& configs) {
  if (configs.cols() != n) {
    throw std::invalid_argument("configuration width " + std::to_string(configs.cols()) +
                                " does not match model n = " + std::to_string(n));
  }
}

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double scale,
                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
  }
  return m;
}

struct MadeForward {
  Matrix z1;       // B x h, pre-activation
  Matrix g1;       // B x h, relu(z1)
  Matrix p_raw;    // B x n, sigmoid(z2), unclamped
  Matrix p;        // B x n, clamped
};

MadeForward made_forward(const MadeModel& model, const ConfigBatch& configs) {
  check_width(model.n, configs);
  MadeForward f;
  f.z1 = (configs * (model.M1.cwiseProduct(model.W1)).transpose()).rowwise() +
         model.b1.transpose();
  f.g1 = f.z1.cwiseMax(0.0);
  Matrix z2 = (f.g1 * (model.M2.cwiseProduct(model.W2)).transpose()).rowwise() +
              model.b2.transpose();
  f.p_raw = z2.unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
  f.p = f.p_raw.cwiseMax(kProbEps).cwiseMin(1.0 - kProbEps);
  return f;
}

Vector bernoulli_log_likelihood(const ConfigBatch& configs, const Matrix& p) {
  // sum_i x_i log p_i + (1 - x_i) log(1 - p_i), row-wise
  Matrix terms = configs.cwiseProduct(p.array().log().matrix()) +
                 (Matrix::Ones(configs.rows(), configs.cols()) - configs)
                     .cwiseProduct((1.0 - p.array()).log().matrix());
  return terms.rowwise().sum();
}

inline double ln_cosh(double z) {
  const double az = std::abs(z);
  return az - std::log(2.0) + std::log1p(std::exp(-2.0 * az));
}

}  // namespace

int default_made_hidden(int n) {
  const double logn = std::log(static_cast<double>(n));
  return static_cast<int>(std::lround(5.0 * logn * logn));
}

MadeModel made_init(int n, int h, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("made_init requires n >= 2");
  if (h < 1) throw std::invalid_argument("made_init requires h >= 1");
  MadeModel model;
  model.n = n;
  model.h = h;
  model.degrees.resize(h);
  for (int k = 0; k < h; ++k) model.degrees[k] = 1 + (k % (n - 1));
  model.M1 = Matrix::Zero(h, n);
  model.M2 = Matrix::Zero(n, h);
  for (int k = 0; k < h; ++k) {
    for (int j = 0; j < n; ++j) model.M1(k, j) = (j + 1 <= model.degrees[k]) ? 1.0 : 0.0;
    for (int i = 0; i < n; ++i) model.M2(i, k) = (model.degrees[k] < i + 1) ? 1.0 : 0.0;
  }
  auto rng = make_stream(seed);
  model.W1 = uniform_matrix(h, n, 1.0 / std::sqrt(static_cast<double>(n)), rng);
  model.W2 = uniform_matrix(n, h, 1.0 / std::sqrt(static_cast<double>(h)), rng);
  model.b1 = Vector::Zero(h);
  model.b2 = Vector::Zero(n);
  return model;
}

RbmModel rbm_init(int n, int h, std::uint64_t seed) {
  if (n < 1 || h < 1) throw std::invalid_argument("rbm_init requires n, h >= 1");
  RbmModel model;
  model.n = n;
  model.h = h;
  auto rng = make_stream(seed);
  model.W = uniform_matrix(h, n, 1.0 / std::sqrt(static_cast<double>(n)), rng);
  model.c = Vector::Zero(h);
  model.a = Vector::Zero(n);
  return model;
}

Matrix conditionals(const MadeModel& model, const ConfigBatch& configs) {
  return made_forward(model, configs).p;
}

Vector log_prob(const MadeModel& model, const ConfigBatch& configs) {
  return bernoulli_log_likelihood(configs, made_forward(model, configs).p);
}

Vector log_psi_batch(const MadeModel& model, const ConfigBatch& configs) {
  return 0.5 * log_prob(model, configs);
}

Vector log_psi_batch(const RbmModel& model, const ConfigBatch& configs) {
  check_width(model.n, configs);
  Matrix z = (configs * model.W.transpose()).rowwise() + model.c.transpose();
  Vector out = z.unaryExpr([](double v) { return ln_cosh(v); }).rowwise().sum();
  out += configs * model.a;
  return out;
}

Vector log_psi_batch(const TableWavefunction& model, const ConfigBatch& configs) {
  check_width(model.n, configs);
  Vector out(configs.rows());
  for (Eigen::Index b = 0; b < configs.rows(); ++b) {
    const double amp = model.amplitudes[config_index(configs.row(b).transpose())];
    out[b] = std::max(std::log(amp), -700.0);
  }
  return out;
}

double log_psi(const MadeModel& model, const Config& x) {
  return log_psi_batch(model, x.transpose())[0];
}
double log_psi(const RbmModel& model, const Config& x) {
  return log_psi_batch(model, x.transpose())[0];
}
double log_psi(const TableWavefunction& model, const Config& x) {
  return log_psi_batch(model, x.transpose())[0];
}

namespace {

// Backward pass shared by the weighted gradient and the score matrix.
// dZ2 row b is d log psi(x_b) / d z2, zero where the clamp is active so the
// gradient differentiates exactly what log_prob computes.
Matrix made_dz2(const MadeModel& model, const ConfigBatch& configs, const MadeForward& f) {
  Matrix dz2 = 0.5 * (configs - f.p_raw);
  for (Eigen::Index b = 0; b < dz2.rows(); ++b) {
    for (int i = 0; i < model.n; ++i) {
      if (f.p_raw(b, i) <= kProbEps || f.p_raw(b, i) >= 1.0 - kProbEps) dz2(b, i) = 0.0;
    }
  }
  return dz2;
}

}  // namespace

Vector weighted_grad_log_psi(const MadeModel& model, const ConfigBatch& configs,
                             const Vector& weights) {
  const MadeForward f = made_forward(model, configs);
  Matrix dz2 = made_dz2(model, configs, f);
  dz2.array().colwise() *= weights.array();
  Matrix dg1 = dz2 * model.M2.cwiseProduct(model.W2);
  Matrix dz1 = dg1.cwiseProduct((f.z1.array() > 0.0).cast<double>().matrix());

  Matrix gW1 = (dz1.transpose() * configs).cwiseProduct(model.M1);
  Vector gb1 = dz1.colwise().sum().transpose();
  Matrix gW2 = (dz2.transpose() * f.g1).cwiseProduct(model.M2);
  Vector gb2 = dz2.colwise().sum().transpose();

  Vector grad(model.param_count());
  Eigen::Index off = 0;
  grad.segment(off, gW1.size()) = gW1.transpose().reshaped();
  off += gW1.size();
  grad.segment(off, gb1.size()) = gb1;
  off += gb1.size();
  grad.segment(off, gW2.size()) = gW2.transpose().reshaped();
  off += gW2.size();
  grad.segment(off, gb2.size()) = gb2;
  return grad;
}

Vector weighted_grad_log_psi(const RbmModel& model, const ConfigBatch& configs,
                             const Vector& weights) {
  check_width(model.n, configs);
  Matrix z = (configs * model.W.transpose()).rowwise() + model.c.transpose();
  Matrix t = z.array().tanh().matrix();
  Matrix tw = t.array().colwise() * weights.array();

  Matrix gW = tw.transpose() * configs;
  Vector gc = tw.colwise().sum().transpose();
  Vector ga = configs.transpose() * weights;

  Vector grad(model.param_count());
  Eigen::Index off = 0;
  grad.segment(off, gW.size()) = gW.transpose().reshaped();
  off += gW.size();
  grad.segment(off, gc.size()) = gc;
  off += gc.size();
  grad.segment(off, ga.size()) = ga;
  return grad;
}

Matrix score_matrix(const MadeModel& model, const ConfigBatch& configs) {
  const MadeForward f = made_forward(model, configs);
  const Matrix dz2 = made_dz2(model, configs, f);
  const Matrix a2 = model.M2.cwiseProduct(model.W2);
  const Eigen::Index B = configs.rows();
  Matrix scores(B, model.param_count());
  for (Eigen::Index b = 0; b < B; ++b) {
    Vector dz2_b = dz2.row(b).transpose();
    Vector dg1_b = a2.transpose() * dz2_b;
    Vector dz1_b =
        dg1_b.cwiseProduct((f.z1.row(b).array() > 0.0).cast<double>().matrix().transpose());
    Matrix gW1 = (dz1_b * configs.row(b)).cwiseProduct(model.M1);
    Matrix gW2 = (dz2_b * f.g1.row(b)).cwiseProduct(model.M2);
    Eigen::Index off = 0;
    scores.row(b).segment(off, gW1.size()) = gW1.transpose().reshaped().transpose();
    off += gW1.size();
    scores.row(b).segment(off, model.h) = dz1_b.transpose();
    off += model.h;
    scores.row(b).segment(off, gW2.size()) = gW2.transpose().reshaped().transpose();
    off += gW2.size();
    scores.row(b).segment(off, model.n) = dz2_b.transpose();
  }
  return 2.0 * scores;  // score of pi = 2 * grad log psi
}

Matrix score_matrix(const RbmModel& model, const ConfigBatch& configs) {
  check_width(model.n, configs);
  Matrix z = (configs * model.W.transpose()).rowwise() + model.c.transpose();
  Matrix t = z.array().tanh().matrix();
  const Eigen::Index B = configs.rows();
  Matrix scores(B, model.param_count());
  for (Eigen::Index b = 0; b < B; ++b) {
    Matrix gW = t.row(b).transpose() * configs.row(b);
    Eigen::Index off = 0;
    scores.row(b).segment(off, gW.size()) = gW.transpose().reshaped().transpose();
    off += gW.size();
    scores.row(b).segment(off, model.h) = t.row(b);
    off += model.h;
    scores.row(b).segment(off, model.n) = configs.row(b);
  }
  return 2.0 * scores;
}

Vector parameter_vector(const MadeModel& model) {
  Vector params(model.param_count());
  Eigen::Index off = 0;
  params.segment(off, model.W1.size()) = model.W1.transpose().reshaped();
  off += model.W1.size();
  params.segment(off, model.h) = model.b1;
  off += model.h;
  params.segment(off, model.W2.size()) = model.W2.transpose().reshaped();
  off += model.W2.size();
  params.segment(off, model.n) = model.b2;
  return params;
}

Vector parameter_vector(const RbmModel& model) {
  Vector params(model.param_count());
  Eigen::Index off = 0;
  params.segment(off, model.W.size()) = model.W.transpose().reshaped();
  off += model.W.size();
  params.segment(off, model.h) = model.c;
  off += model.h;
  params.segment(off, model.n) = model.a;
  return params;
}

void set_parameters(MadeModel& model, const Vector& params) {
  if (params.size() != model.param_count()) {
    throw std::invalid_argument("parameter vector length mismatch");
  }
  Eigen::Index off = 0;
  model.W1 = Eigen::Map<const Matrix>(params.data() + off, model.n, model.h).transpose();
  off += model.W1.size();
  model.b1 = params.segment(off, model.h);
  off += model.h;
  model.W2 = Eigen::Map<const Matrix>(params.data() + off, model.h, model.n).transpose();
  off += model.W2.size();
  model.b2 = params.segment(off, model.n);
}

void set_parameters(RbmModel& model, const Vector& params) {
  if (params.size() != model.param_count()) {
    throw std::invalid_argument("parameter vector length mismatch");
  }
  Eigen::Index off = 0;
  model.W = Eigen::Map<const Matrix>(params.data() + off, model.n, model.h).transpose();
  off += model.W.size();
  model.c = params.segment(off, model.h);
  off += model.h;
  model.a = params.segment(off, model.n);
}

namespace {

void write_params(std::ofstream& out, const Vector& params) {
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < params.size(); ++i) out << params[i] << "\n";
}

std::vector<std::string> read_header(std::ifstream& in, const std::string& path,
                                     const std::string& kind) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty checkpoint");
  std::istringstream stream(line);
  std::vector<std::string> tokens;
  std::string token;
  while (stream >> token) tokens.push_back(token);
  if (tokens.size() != 5 || tokens[0] != "vqmc-model" || tokens[1] != "1" ||
      tokens[2] != kind) {
    throw std::runtime_error(path + ": bad checkpoint header");
  }
  return tokens;
}

Vector read_params(std::ifstream& in, const std::string& path, Eigen::Index count) {
  Vector params(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!(in >> params[i])) throw std::runtime_error(path + ": truncated parameter block");
  }
  double extra;
  if (in >> extra) throw std::runtime_error(path + ": parameter count mismatch");
  return params;
}

}  // namespace

void save_model(const MadeModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "vqmc-model 1 made " << model.n << " " << model.h << "\n";
  out << "degrees";
  for (int d : model.degrees) out << " " << d;
  out << "\n";
  write_params(out, parameter_vector(model));
}

void save_model(const RbmModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "vqmc-model 1 rbm " << model.n << " " << model.h << "\n";
  write_params(out, parameter_vector(model));
}

MadeModel load_made(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  const auto header = read_header(in, path, "made");
  const int n = std::stoi(header[3]);
  const int h = std::stoi(header[4]);
  MadeModel model = made_init(n, h, 0);
  std::string label;
  if (!(in >> label) || label != "degrees") {
    throw std::runtime_error(path + ": missing degrees line");
  }
  for (int k = 0; k < h; ++k) {
    if (!(in >> model.degrees[k]) || model.degrees[k] < 1 || model.degrees[k] > n - 1) {
      throw std::runtime_error(path + ": invalid degrees");
    }
  }
  for (int k = 0; k < h; ++k) {
    for (int j = 0; j < n; ++j) model.M1(k, j) = (j + 1 <= model.degrees[k]) ? 1.0 : 0.0;
    for (int i = 0; i < n; ++i) model.M2(i, k) = (model.degrees[k] < i + 1) ? 1.0 : 0.0;
  }
  set_parameters(model, read_params(in, path, model.param_count()));
  return model;
}

RbmModel load_rbm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  const auto header = read_header(in, path, "rbm");
  RbmModel model = rbm_init(std::stoi(header[3]), std::stoi(header[4]), 0);
  set_parameters(model, read_params(in, path, model.param_count()));
  return model;
}

}  // namespace vqmc
