#pragma once

#include "faultnet/bundle.hpp"
#include "faultnet/checkpoint.hpp"
#include "faultnet/csv_io.hpp"
#include "faultnet/data_pipeline.hpp"
#include "faultnet/error.hpp"
#include "faultnet/layers.hpp"
#include "faultnet/loss_metrics.hpp"
#include "faultnet/model.hpp"
#include "faultnet/optimizers.hpp"
#include "faultnet/random.hpp"
#include "faultnet/synthetic.hpp"
#include "faultnet/tensor.hpp"
#include "faultnet/trainer.hpp"
