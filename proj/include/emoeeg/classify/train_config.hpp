#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "emoeeg/error.hpp"

namespace emoeeg {

enum class KernelType { rbf, linear };

inline std::string_view kernel_name(KernelType k) { return k == KernelType::rbf ? "rbf" : "linear"; }

inline KernelType parse_kernel(std::string_view s) {
  if (s == "rbf") return KernelType::rbf;
  if (s == "linear") return KernelType::linear;
  throw Error(Errc::invalid_argument, "unknown kernel '" + std::string(s) + "'");
}

/// Hyperparameters for all three trainers.
struct TrainConfig {
  std::uint64_t seed = 0;

  std::size_t knn_k = 5;

  KernelType svm_kernel = KernelType::rbf;
  double svm_c = 1.0;
  /// 0 selects 1 / (d * mean column variance) at training time.
  double svm_gamma = 0.0;
  double svm_tol = 1e-3;
  std::size_t svm_max_passes = 10;

  std::size_t mlp_hidden = 64;
  double mlp_learning_rate = 1e-3;
  std::size_t mlp_batch = 32;
  std::size_t mlp_epochs = 200;

  void validate() const {
    auto bad = [](const char* what) { throw Error(Errc::invalid_config, std::string("train config: ") + what); };
    if (knn_k == 0) bad("knn_k must be positive");
    if (!(svm_c > 0.0)) bad("svm_c must be positive");
    if (!(svm_gamma >= 0.0)) bad("svm_gamma must be >= 0 (0 = auto)");
    if (!(svm_tol > 0.0)) bad("svm_tol must be positive");
    if (svm_max_passes == 0) bad("svm_max_passes must be positive");
    if (mlp_hidden == 0) bad("mlp_hidden must be positive");
    if (!(mlp_learning_rate > 0.0)) bad("mlp_learning_rate must be positive");
    if (mlp_batch == 0) bad("mlp_batch must be positive");
  }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

}  // namespace emoeeg
