#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "emoeeg/classify/knn.hpp"
#include "emoeeg/classify/mlp.hpp"
#include "emoeeg/classify/svm.hpp"
#include "emoeeg/classify/train_config.hpp"
#include "emoeeg/error.hpp"

// Model persistence as JSON, for auditing trained parameters. Every document
// carries "format_version" and "type".

namespace emoeeg {

inline constexpr int kModelFormatVersion = 1;

using json = nlohmann::ordered_json;

inline json to_json(const TrainConfig& c) {
  return json{{"seed", c.seed},
              {"knn_k", c.knn_k},
              {"svm_kernel", kernel_name(c.svm_kernel)},
              {"svm_c", c.svm_c},
              {"svm_gamma", c.svm_gamma},
              {"svm_tol", c.svm_tol},
              {"svm_max_passes", c.svm_max_passes},
              {"mlp_hidden", c.mlp_hidden},
              {"mlp_lr", c.mlp_learning_rate},
              {"mlp_batch", c.mlp_batch},
              {"mlp_epochs", c.mlp_epochs}};
}

inline TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.knn_k = j.at("knn_k").get<std::size_t>();
  c.svm_kernel = parse_kernel(j.at("svm_kernel").get<std::string>());
  c.svm_c = j.at("svm_c").get<double>();
  c.svm_gamma = j.at("svm_gamma").get<double>();
  c.svm_tol = j.at("svm_tol").get<double>();
  c.svm_max_passes = j.at("svm_max_passes").get<std::size_t>();
  c.mlp_hidden = j.at("mlp_hidden").get<std::size_t>();
  c.mlp_learning_rate = j.at("mlp_lr").get<double>();
  c.mlp_batch = j.at("mlp_batch").get<std::size_t>();
  c.mlp_epochs = j.at("mlp_epochs").get<std::size_t>();
  return c;
}

inline json to_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

inline Matrix matrix_from_json(const json& j) {
  return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                j.at("data").get<std::vector<double>>());
}

inline json to_json(const KnnModel& m, const TrainConfig& config = {}) {
  return json{{"format_version", kModelFormatVersion}, {"type", "knn"},    {"config", to_json(config)},
              {"k", m.k},                               {"train", to_json(m.train)}, {"labels", m.labels}};
}

inline json to_json(const SvmModel& m, const TrainConfig& config = {}) {
  return json{{"format_version", kModelFormatVersion},
              {"type", "svm"},
              {"config", to_json(config)},
              {"kernel", kernel_name(m.kernel.type)},
              {"gamma", m.kernel.gamma},
              {"c", m.c},
              {"bias", m.bias},
              {"alpha", m.alpha},
              {"sv_labels", m.sv_labels},
              {"support_indices", m.support_indices},
              {"support_vectors", to_json(m.support_vectors)},
              {"iterations", m.iterations},
              {"converged", m.converged}};
}

inline json to_json(const MlpModel& m, const TrainConfig& config = {}) {
  return json{{"format_version", kModelFormatVersion},
              {"type", "mlp"},
              {"config", to_json(config)},
              {"n_inputs", m.n_inputs},
              {"n_hidden", m.n_hidden},
              {"n_classes", m.n_classes},
              {"params", m.params},
              {"initial_loss", m.initial_loss},
              {"final_loss", m.final_loss},
              {"epoch_loss", m.epoch_loss}};
}

namespace detail {

inline void check_model_doc(const json& j, const char* type) {
  if (!j.contains("format_version") || j.at("format_version").get<int>() != kModelFormatVersion)
    throw Error(Errc::malformed_header, "model json: unsupported format_version");
  if (j.value("type", std::string{}) != type)
    throw Error(Errc::malformed_header, std::string("model json: expected type '") + type + "'");
}

}  // namespace detail

inline KnnModel knn_from_json(const json& j) {
  detail::check_model_doc(j, "knn");
  return knn_fit(matrix_from_json(j.at("train")), j.at("labels").get<std::vector<int>>(), j.at("k").get<std::size_t>());
}

inline SvmModel svm_from_json(const json& j) {
  detail::check_model_doc(j, "svm");
  SvmModel m;
  m.kernel = {parse_kernel(j.at("kernel").get<std::string>()), j.at("gamma").get<double>()};
  m.c = j.at("c").get<double>();
  m.bias = j.at("bias").get<double>();
  m.alpha = j.at("alpha").get<std::vector<double>>();
  m.sv_labels = j.at("sv_labels").get<std::vector<int>>();
  m.support_indices = j.at("support_indices").get<std::vector<std::size_t>>();
  m.support_vectors = matrix_from_json(j.at("support_vectors"));
  m.iterations = j.at("iterations").get<std::size_t>();
  m.converged = j.at("converged").get<bool>();
  if (m.alpha.size() != m.sv_labels.size() || m.alpha.size() != m.support_vectors.rows())
    throw Error(Errc::malformed_header, "model json: svm support vector arrays disagree");
  for (std::size_t i = 0; i < m.alpha.size(); ++i) m.coef.push_back(m.alpha[i] * m.sv_labels[i]);
  return m;
}

inline MlpModel mlp_from_json(const json& j) {
  detail::check_model_doc(j, "mlp");
  MlpModel m;
  m.n_inputs = j.at("n_inputs").get<std::size_t>();
  m.n_hidden = j.at("n_hidden").get<std::size_t>();
  m.n_classes = j.at("n_classes").get<std::size_t>();
  m.params = j.at("params").get<std::vector<double>>();
  m.initial_loss = j.at("initial_loss").get<double>();
  m.final_loss = j.at("final_loss").get<double>();
  m.epoch_loss = j.at("epoch_loss").get<std::vector<double>>();
  if (m.params.size() != m.n_params()) throw Error(Errc::malformed_header, "model json: mlp parameter count mismatch");
  return m;
}

inline void save_json(const json& j, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(Errc::io, "cannot write '" + path.string() + "'");
  f << j.dump(2) << '\n';
}

inline json load_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::io, "cannot open '" + path.string() + "'");
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_header, "invalid json in '" + path.string() + "': " + e.what());
  }
}

}  // namespace emoeeg
