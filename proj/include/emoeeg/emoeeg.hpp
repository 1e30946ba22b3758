#pragma once

#include "emoeeg/classify.hpp"
#include "emoeeg/error.hpp"
#include "emoeeg/evaluate.hpp"
#include "emoeeg/featurize.hpp"
#include "emoeeg/ingest.hpp"
#include "emoeeg/matrix.hpp"
#include "emoeeg/pipeline.hpp"
#include "emoeeg/random.hpp"
#include "emoeeg/report.hpp"
#include "emoeeg/run_config.hpp"
#include "emoeeg/spectral.hpp"
