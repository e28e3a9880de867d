#pragma once

#include "types.hpp"
#include "util.hpp"
#include "corpus.hpp"
#include "stackoverflow.hpp"
#include "github.hpp"
#include "interests.hpp"
#include "features.hpp"
#include "auc.hpp"
#include "svm.hpp"
#include "experiment.hpp"
#include "tag_stats.hpp"
#include "synth.hpp"
#include "kv_config.hpp"
