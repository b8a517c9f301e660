#pragma once

#include "subseas/combine.hpp"
#include "subseas/metrics.hpp"
#include "subseas/models/dshw.hpp"
#include "subseas/models/ets.hpp"
#include "subseas/models/forecaster.hpp"
#include "subseas/models/snaive.hpp"
#include "subseas/optim.hpp"
#include "subseas/series.hpp"
#include "subseas/subsample.hpp"
#include "subseas/harness/dataset.hpp"
#include "subseas/harness/experiment.hpp"
#include "subseas/harness/load.hpp"
#include "subseas/harness/report.hpp"
