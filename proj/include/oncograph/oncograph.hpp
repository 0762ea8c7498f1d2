#pragma once

// Umbrella header.

#include "oncograph/core/adam.hpp"
#include "oncograph/core/checkpoint.hpp"
#include "oncograph/core/error.hpp"
#include "oncograph/core/ops.hpp"
#include "oncograph/core/parameters.hpp"
#include "oncograph/core/rng.hpp"
#include "oncograph/core/sparse.hpp"
#include "oncograph/core/tape.hpp"
#include "oncograph/core/tensor.hpp"
#include "oncograph/core/trainer.hpp"

#include "oncograph/ingest/cohort.hpp"
#include "oncograph/ingest/ingest.hpp"
#include "oncograph/ingest/report.hpp"
#include "oncograph/ingest/synthetic.hpp"
#include "oncograph/ingest/vocabulary.hpp"

#include "oncograph/graph/feature_graph.hpp"
#include "oncograph/graph/operators.hpp"

#include "oncograph/gnn/config.hpp"
#include "oncograph/gnn/layers.hpp"
#include "oncograph/gnn/model.hpp"
#include "oncograph/gnn/train.hpp"

#include "oncograph/baselines/boosting.hpp"
#include "oncograph/baselines/common.hpp"
#include "oncograph/baselines/forest.hpp"
#include "oncograph/baselines/mlp.hpp"
#include "oncograph/baselines/naive_bayes.hpp"
#include "oncograph/baselines/tree.hpp"

#include "oncograph/eval/metrics.hpp"
#include "oncograph/eval/roc.hpp"
#include "oncograph/eval/split.hpp"
#include "oncograph/eval/tables.hpp"

#include "oncograph/bench/benchmark.hpp"
