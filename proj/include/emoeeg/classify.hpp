#pragma once

#include "emoeeg/classify/knn.hpp"
#include "emoeeg/classify/mlp.hpp"
#include "emoeeg/classify/svm.hpp"
#include "emoeeg/classify/train_config.hpp"
#include "emoeeg/classify/model_io.hpp"
